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
// Annular-sector user region, HPPP user counts and uniform user placement.
// The beam axis is fixed at angle 0; user angles are measured from it.

#pragma once

#include <cmath>

#include "noma_airlink/errors.hpp"
#include "noma_airlink/rng.hpp"

namespace noma_airlink {

struct UserRegion {
    double l1;     // inner radius [m]
    double l2;     // outer radius [m]
    double delta;  // horizontal angle [rad]
    double lambda; // HPPP density [users/m^2]

    UserRegion(double l1_, double l2_, double delta_, double lambda_)
        : l1(l1_), l2(l2_), delta(delta_), lambda(lambda_) {
        if (!(l1 > 0.0) || !(l1 < l2))
            throw ValidationError("UserRegion requires 0 < l1 < l2");
        if (!(delta > 0.0) || !(delta <= 3.14159265358979323846 + 1e-12))
            throw ValidationError("UserRegion requires 0 < delta <= pi");
        if (!(lambda > 0.0))
            throw ValidationError("UserRegion requires lambda > 0");
    }

    double area() const { return 0.5 * delta * (l2 * l2 - l1 * l1); }

    // L = (L2^2 - L1^2) * lambda: mean user count per radian of half-angle.
    double line_density() const { return (l2 * l2 - l1 * l1) * lambda; }

    double half_angle() const { return 0.5 * delta; }
};

struct UserSample {
    double distance;     // d_k [m]
    double angle;        // theta_k [rad], in [-delta/2, delta/2]
    double fading_power; // |alpha_k|^2, unit-mean exponential
};

// mu = (L2^2 - L1^2) * (delta/2) * lambda
inline double mean_count(const UserRegion& region) {
    return region.area() * region.lambda;
}

template <class Rng>
long long sample_count(const UserRegion& region, Rng& rng) {
    return sample_poisson(rng, mean_count(region));
}

// Uniform placement in the sector: distance by inverse transform of the
// CDF (r^2 - L1^2)/(L2^2 - L1^2), angle uniform, fading exponential.
template <class Rng>
UserSample sample_user(const UserRegion& region, Rng& rng) {
    const double u = uniform01(rng);
    const double d = std::sqrt(region.l1 * region.l1 +
                               u * (region.l2 * region.l2 - region.l1 * region.l1));
    const double th = uniform(rng, -region.half_angle(), region.half_angle());
    const double fad = exponential_unit_mean(rng);
    return {d, th, fad};
}

} // namespace noma_airlink
