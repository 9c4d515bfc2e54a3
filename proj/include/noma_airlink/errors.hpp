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

#pragma once

#include <stdexcept>
#include <string>

namespace noma_airlink {

// Quadrature ran out of subdivisions before reaching the requested tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Target value outside the range of the function on the bracketing interval.
struct OutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Order-statistic rank inconsistent with the population size or decode chain.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Count regime not applicable to the requested distribution or threshold.
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// beta_i^2 - beta_j^2 * eps_i <= 0: the weak user's target rate is
// unachievable at any SNR and its outage is identically 1.
struct InfeasiblePowerSplit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A kernel critical point coincides with the region boundary Delta/2.
struct DegeneratePartition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file is not syntactically valid (JSON error, wrong type, unknown key).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file parsed but violates a domain invariant; message names it.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace noma_airlink
