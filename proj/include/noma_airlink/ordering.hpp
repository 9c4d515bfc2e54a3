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
// User ranking under the four feedback strategies and NOMA pair selection
// from the ranked population.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "noma_airlink/channel.hpp"

namespace noma_airlink {

enum class OrderingStrategy { Distance, AbsAngle, FejerKernel, FullCSI };

inline const char* to_string(OrderingStrategy s) {
    switch (s) {
    case OrderingStrategy::Distance: return "distance";
    case OrderingStrategy::AbsAngle: return "abs_angle";
    case OrderingStrategy::FejerKernel: return "fejer";
    case OrderingStrategy::FullCSI: return "full_csi";
    }
    return "?";
}

inline OrderingStrategy parse_strategy(const std::string& name) {
    if (name == "distance") return OrderingStrategy::Distance;
    if (name == "abs_angle" || name == "angle") return OrderingStrategy::AbsAngle;
    if (name == "fejer" || name == "fejer_kernel") return OrderingStrategy::FejerKernel;
    if (name == "full_csi" || name == "csi") return OrderingStrategy::FullCSI;
    throw ValidationError("unknown ordering strategy: " + name);
}

// Permutation of user indices, best channel first under the strategy's
// criterion. Ties break by original index (stable sort on the key alone).
// FullCSI ranks by the Approx gain model, consistent with the analytic
// unordered-gain CDF.
inline std::vector<int> rank_users(std::span<const UserSample> users, OrderingStrategy strategy,
                                   const RadioConfig& cfg) {
    if (users.empty())
        throw DomainError("rank_users: empty user list");

    std::vector<double> key(users.size());
    for (std::size_t n = 0; n < users.size(); ++n) {
        const UserSample& u = users[n];
        switch (strategy) {
        case OrderingStrategy::Distance:
            key[n] = u.distance;
            break;
        case OrderingStrategy::AbsAngle:
            key[n] = std::fabs(u.angle);
            break;
        case OrderingStrategy::FejerKernel:
            key[n] = -fejer_kernel(cfg.m, u.angle); // descending kernel value
            break;
        case OrderingStrategy::FullCSI:
            key[n] = -effective_gain(u, cfg, GainModel::Approx); // descending gain
            break;
        }
    }

    std::vector<int> perm(users.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return key[a] < key[b]; });
    return perm;
}

struct Selection {
    enum class Kind { NoTransmission, SingleUser, NomaPairActive };
    Kind kind = Kind::NoTransmission;
    int strong = -1; // original index of the rank-j user, if served
    int weak = -1;   // original index of the rank-i user, if NOMA is active
};

// K < j: no transmission; j <= K < i: rank-j user served alone; K >= i:
// both pair members served.
inline Selection select_pair(const std::vector<int>& perm, const NomaPair& pair, int count) {
    if (count != static_cast<int>(perm.size()))
        throw DomainError("select_pair: count does not match permutation size");
    Selection sel;
    if (count < pair.j)
        return sel;
    sel.strong = perm[pair.j - 1];
    if (count < pair.i) {
        sel.kind = Selection::Kind::SingleUser;
        return sel;
    }
    sel.kind = Selection::Kind::NomaPairActive;
    sel.weak = perm[pair.i - 1];
    return sel;
}

} // namespace noma_airlink
