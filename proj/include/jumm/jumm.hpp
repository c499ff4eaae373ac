/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "jumm/error.hpp"
#include "jumm/rng.hpp"
#include "jumm/scenario.hpp"
#include "jumm/closed_form.hpp"
#include "jumm/parallel.hpp"
#include "jumm/optimizers.hpp"
#include "jumm/oracle.hpp"
#include "jumm/montecarlo.hpp"
#include "jumm/experiment.hpp"
#include "jumm/output.hpp"
#include "jumm/cli.hpp"
