// SPDX-License-Identifier: Apache-2.0
//
// noma-airlink — outage probabilities and sum rates for two-user NOMA
// downlink from a UAV base station with limited-feedback user ordering
// Copyright (C) 2026 the noma-airlink authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Self-contained generator and samplers so that results are bit-identical
// across platforms, standard libraries and thread counts. Streams are
// counter-based: one generator per (seed, trial index).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "noma_airlink/errors.hpp"

namespace noma_airlink {

// Single scramble round of SplitMix64.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    constexpr result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

// Stream for one Monte Carlo trial: seed xor scrambled trial index.
inline SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    return SplitMix64(mix64(seed ^ mix64(trial_index + 0x51ed2701a2b8e4d5ull)));
}

// Uniform on the open interval (0, 1) from the top 53 bits.
template <class Rng>
double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

template <class Rng>
double uniform(Rng& rng, double a, double b) {
    return a + (b - a) * uniform01(rng);
}

// Unit-mean exponential by inversion.
template <class Rng>
double exponential_unit_mean(Rng& rng) {
    return -std::log(uniform01(rng));
}

// Poisson variate by linear-domain CDF inversion; exact halving for large mu
// keeps e^{-mu} representable.
template <class Rng>
long long sample_poisson(Rng& rng, double mu) {
    if (!(mu > 0.0))
        throw DomainError("sample_poisson: mu must be > 0");
    if (mu > 500.0) {
        const double half = 0.5 * mu;
        return sample_poisson(rng, half) + sample_poisson(rng, mu - half);
    }
    const double u = uniform01(rng);
    double p = std::exp(-mu);
    double cum = p;
    long long k = 0;
    const long long k_cap = static_cast<long long>(mu + 60.0 * std::sqrt(mu) + 60.0);
    while (u > cum && k < k_cap) {
        ++k;
        p *= mu / static_cast<double>(k);
        cum += p;
    }
    return k;
}

} // namespace noma_airlink
