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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace jumm {

using Rng = std::mt19937_64;

/// Independent generator for stream `index` under `seed`.
///
/// The state depends on (seed, index) only, so realization i is the same
/// whether it is evaluated first, last, or on another thread.
inline Rng substream(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x6a756d6du};
    return Rng(seq);
}

/// One draw from CN(0, variance).
inline std::complex<double> complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> normal;
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {scale * re, scale * im};
}

} // namespace jumm
