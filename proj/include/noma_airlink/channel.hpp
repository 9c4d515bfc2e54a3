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
// mmWave LoS channel quantities: Fejer kernel beam gain of a critically
// spaced ULA, air-to-ground path loss, effective channel gain and SINR.

#pragma once

#include <cmath>

#include "noma_airlink/errors.hpp"
#include "noma_airlink/geometry.hpp"

namespace noma_airlink {

inline constexpr double kPi = 3.14159265358979323846;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

struct RadioConfig {
    int m;           // ULA element count M
    double altitude; // hovering altitude h [m]
    double p_tx;     // total transmit power [W]
    double n0;       // noise power [W]
    double gamma;    // path-loss exponent

    RadioConfig(int m_, double altitude_, double p_tx_, double n0_, double gamma_)
        : m(m_), altitude(altitude_), p_tx(p_tx_), n0(n0_), gamma(gamma_) {
        if (m < 1)
            throw ValidationError("RadioConfig requires m >= 1");
        if (!(altitude > 0.0))
            throw ValidationError("RadioConfig requires altitude > 0");
        if (!(p_tx > 0.0) || !(n0 > 0.0))
            throw ValidationError("RadioConfig requires p_tx > 0 and n0 > 0");
        if (!(gamma >= 1.0))
            throw ValidationError("RadioConfig requires gamma >= 1");
    }

    double rho() const { return p_tx / n0; } // transmit SNR
};

struct NomaPower {
    double beta_j_sq; // strong-user power fraction
    double beta_i_sq; // weak-user power fraction

    NomaPower(double beta_j_sq_, double beta_i_sq_)
        : beta_j_sq(beta_j_sq_), beta_i_sq(beta_i_sq_) {
        if (std::fabs(beta_j_sq + beta_i_sq - 1.0) > 1e-9)
            throw ValidationError("NomaPower requires beta_j_sq + beta_i_sq = 1");
        if (!(beta_j_sq > 0.0) || !(beta_j_sq <= beta_i_sq))
            throw ValidationError("NomaPower requires 0 < beta_j_sq <= beta_i_sq");
    }
};

struct NomaPair {
    int j; // strong-user rank
    int i; // weak-user rank

    NomaPair(int j_, int i_) : j(j_), i(i_) {
        if (j < 1 || !(j < i))
            throw ValidationError("NomaPair requires 1 <= j < i");
    }
};

enum class GainModel { Exact, Approx };

// F_M(x) = |sin(pi M x / 2) / sin(pi x / 2)|^2 / M. The singularity at
// x = 0 (mod 2) is removable with limit value M.
inline double fejer_kernel(int m, double offset) {
    if (m < 1)
        throw DomainError("fejer_kernel: m must be >= 1");
    const double den = std::sin(0.5 * kPi * offset);
    if (std::fabs(den) < 1e-12)
        return static_cast<double>(m);
    const double num = std::sin(0.5 * kPi * m * offset);
    return (num * num) / (den * den * static_cast<double>(m));
}

// PL = 1 + (sqrt(d^2 + h^2))^gamma
inline double path_loss(double distance, double altitude, double gamma) {
    if (distance < 0.0 || !(altitude > 0.0))
        throw DomainError("path_loss: distance >= 0 and altitude > 0 required");
    return 1.0 + std::pow(distance * distance + altitude * altitude, 0.5 * gamma);
}

// Effective channel gain. Approx feeds the angle itself to the kernel; Exact
// uses sin(theta), the argument before the small-angle approximation.
inline double effective_gain(const UserSample& user, const RadioConfig& cfg, GainModel model) {
    const double arg = model == GainModel::Approx ? user.angle : std::sin(user.angle);
    return user.fading_power * fejer_kernel(cfg.m, arg) /
           path_loss(user.distance, cfg.altitude, cfg.gamma);
}

// SINR of a user of rank own_rank_k decoding the message of decode_rank_m,
// two-user pair. For the pair (j, i) only the weak message sees the strong
// user's power in the denominator; the strongest user's own message sees
// noise only.
inline double sinr(double gain_k, int decode_rank_m, int own_rank_k, const NomaPair& pair,
                   const NomaPower& powers, const RadioConfig& cfg) {
    if (decode_rank_m < own_rank_k)
        throw RankError("sinr: stronger user cannot be decoded by a weaker one");
    const double rho_g = cfg.rho() * gain_k;
    if (decode_rank_m == pair.i)
        return rho_g * powers.beta_i_sq / (rho_g * powers.beta_j_sq + 1.0);
    if (decode_rank_m == pair.j)
        return rho_g * powers.beta_j_sq; // in-pair interferer set is empty
    throw RankError("sinr: decode_rank_m is not a member of the NOMA pair");
}

} // namespace noma_airlink
