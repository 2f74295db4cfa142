/*
 * Copyright 2026 The opdelta authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OPDELTA_RNG_HPP
#define OPDELTA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace opdelta {

/// SplitMix64 step; used both to scramble user seeds and to derive
/// independent per-replication streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream-splitting rule: stream k of master seed s is seeded with the
/// (k+1)-th SplitMix64 output of s, computed in closed form. Distinct
/// (seed, stream) pairs give decorrelated mt19937_64 states; the mapping is
/// part of the reproducibility contract, so do not change it.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed + stream * 0x9e3779b97f4a7c15ULL;
    return splitmix64(state);
}

/// Seeded standard-normal sampler: mt19937_64 + Box-Muller. The stdlib
/// normal_distribution is implementation-defined, which would make seeded
/// studies non-portable across standard libraries; Box-Muller on explicit
/// uniforms pins the exact sequence.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace opdelta

#endif  // OPDELTA_RNG_HPP
