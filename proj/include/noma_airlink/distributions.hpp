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
// Analytic distributions: unordered distance, unordered/ordered Fejer
// kernel value, ordered absolute and signed angle, ordered distance under
// both count regimes, unordered/ordered effective gain.
//
// All Poisson-weighted series are evaluated in the log domain; terms like
// (theta*L)^(k-1)/(k-1)! overflow well before the defaults otherwise.

#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "noma_airlink/channel.hpp"
#include "noma_airlink/geometry.hpp"
#include "noma_airlink/numerics.hpp"

namespace noma_airlink {

// Conditioning on the user count K: one exact value (S_K1), the single-user
// band j <= K < i (S_K2), or the NOMA band K >= i (S_K3).
struct CountRegime {
    enum class Kind { ExactK, Between, AtLeastI };
    Kind kind;
    int k = 0;

    static CountRegime exact_k(int k) {
        if (k < 1)
            throw DomainError("CountRegime::exact_k requires k >= 1");
        return {Kind::ExactK, k};
    }
    static CountRegime between() { return {Kind::Between, 0}; }
    static CountRegime at_least_i() { return {Kind::AtLeastI, 0}; }
};

// Rank convention for the ordered kernel value. The ordering (Eq.-15 style)
// lists users best-first, so rank k is the k-th largest kernel value; the
// k-th smallest variant is kept selectable for comparison.
enum class RankConvention { BestIsLargest, BestIsSmallest };

inline double unordered_distance_pdf(double r, const UserRegion& region) {
    if (r < region.l1 || r > region.l2)
        return 0.0;
    return 2.0 * r / (region.l2 * region.l2 - region.l1 * region.l1);
}

inline double unordered_distance_cdf(double r, const UserRegion& region) {
    if (r <= region.l1)
        return 0.0;
    if (r >= region.l2)
        return 1.0;
    return (r * r - region.l1 * region.l1) / (region.l2 * region.l2 - region.l1 * region.l1);
}

namespace detail {

// log Pr{Poisson(x) <= n} for the short tail sums of Theorems 2-4
// (n is at most i-1, never large).
inline double log_pois_cdf_small(int n, double x) {
    if (n < 0)
        return -std::numeric_limits<double>::infinity();
    if (x <= 0.0)
        return 0.0;
    LogSumExp acc;
    for (int l = 0; l <= n; ++l)
        acc.add(static_cast<double>(l) * std::log(x) - x - std::lgamma(l + 1.0));
    return std::min(acc.value(), 0.0);
}

// Pr{Poisson(x) <= n} and its complement, clamped to [0,1].
inline double pois_cdf_small(int n, double x) { return std::exp(log_pois_cdf_small(n, x)); }
inline double pois_sf_small(int n, double x) {
    const double sf = -std::expm1(log_pois_cdf_small(n, x));
    return sf < 0.0 ? 0.0 : sf;
}

// log of the complement, -inf when the tail vanishes.
inline double log_pois_sf_small(int n, double x) {
    const double sf = pois_sf_small(n, x);
    return sf > 0.0 ? std::log(sf) : -std::numeric_limits<double>::infinity();
}

// Pr{Bin(n, p) >= l_from}, log-domain binomial upper tail.
inline double binomial_tail(int n, int l_from, double p) {
    if (l_from <= 0)
        return 1.0;
    if (l_from > n)
        return 0.0;
    if (p <= 0.0)
        return 0.0;
    if (p >= 1.0)
        return 1.0;
    const double lp = std::log(p);
    const double l1p = std::log1p(-p);
    const double lgn = std::lgamma(n + 1.0);
    LogSumExp acc;
    for (int l = l_from; l <= n; ++l)
        acc.add(lgn - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0) +
                static_cast<double>(l) * lp + static_cast<double>(n - l) * l1p);
    return std::min(1.0, std::exp(acc.value()));
}

} // namespace detail

// The Fejer kernel on [0, delta/2] split into monotone pieces at the
// interior critical points, with delta/2 appended as the final boundary.
struct FejerPartition {
    int m = 0;
    double delta = 0.0;
    std::vector<double> breakpoints; // theta_1 .. theta_P, last == delta/2
    std::vector<double> values;      // kernel at 0, theta_1, ..., theta_P

    int piece_count() const { return static_cast<int>(breakpoints.size()); }
    double half_angle() const { return 0.5 * delta; }
    double piece_lo(int p) const { return p == 0 ? 0.0 : breakpoints[p - 1]; }
    double piece_hi(int p) const { return breakpoints[p]; }
};

inline FejerPartition build_fejer_partition(int m, double delta) {
    if (m < 1 || !(delta > 0.0))
        throw DomainError("build_fejer_partition: m >= 1 and delta > 0 required");
    const double half = 0.5 * delta;

    // nulls sit at exactly 2k/m; a boundary collapsing onto one makes the
    // last piece degenerate
    const double nearest_null = std::round(half * m / 2.0) * 2.0 / m;
    if (nearest_null > 0.0 && std::fabs(half - nearest_null) < 1e-12)
        throw DegeneratePartition("build_fejer_partition: delta/2 coincides with a kernel null");

    auto f = [m](double x) { return fejer_kernel(m, x); };
    // scan resolution: 1e4 per unit interval, never coarser than the null
    // spacing 2/m
    const int grid = std::max({512, static_cast<int>(std::ceil(half * 1e4)),
                               static_cast<int>(std::ceil(half * m * 16.0))});
    std::vector<double> cps = find_critical_points(f, Interval(0.0, half), grid);

    if (!cps.empty() && half - cps.back() < 1e-12)
        throw DegeneratePartition("build_fejer_partition: critical point at delta/2");

    FejerPartition part;
    part.m = m;
    part.delta = delta;
    part.breakpoints = cps;
    part.breakpoints.push_back(half);
    part.values.push_back(f(0.0));
    for (double b : part.breakpoints)
        part.values.push_back(f(b));

    // sampled monotonicity check of every piece
    for (int p = 0; p < part.piece_count(); ++p) {
        const double lo = part.piece_lo(p), hi = part.piece_hi(p);
        const bool dec = part.values[p] > part.values[p + 1];
        double prev = f(lo);
        for (int s = 1; s <= 256; ++s) {
            const double v = f(lo + (hi - lo) * s / 256.0);
            if (dec ? v > prev + 1e-9 : v + 1e-9 < prev)
                throw DegeneratePartition("build_fejer_partition: piece not monotone");
            prev = v;
        }
    }
    return part;
}

// F_U(u): probability that the kernel value of a uniformly placed user is
// below u, computed as the Lebesgue measure of the sublevel set per piece.
inline double unordered_fejer_cdf(double u, const FejerPartition& part) {
    if (u <= 0.0)
        return 0.0;
    if (u >= static_cast<double>(part.m))
        return 1.0;
    auto f = [&part](double x) { return fejer_kernel(part.m, x); };
    double measure = 0.0;
    for (int p = 0; p < part.piece_count(); ++p) {
        const double lo = part.piece_lo(p), hi = part.piece_hi(p);
        const double va = part.values[p], vb = part.values[p + 1];
        if (u >= std::max(va, vb)) {
            measure += hi - lo;
        } else if (u > std::min(va, vb)) {
            const double theta = invert_monotone(f, Interval(lo, hi), u);
            measure += (va > vb) ? (hi - theta) : (theta - lo);
        }
    }
    return measure / part.half_angle();
}

inline double unordered_fejer_cdf_inverse(double q, const FejerPartition& part) {
    if (q < 0.0 || q > 1.0)
        throw DomainError("unordered_fejer_cdf_inverse: q must be in [0,1]");
    if (q <= 0.0)
        return 0.0;
    if (q >= 1.0)
        return static_cast<double>(part.m);
    double a = 0.0, b = static_cast<double>(part.m);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        if (unordered_fejer_cdf(mid, part) < q)
            a = mid;
        else
            b = mid;
        if (b - a <= 1e-13 * (b + 1.0))
            break;
    }
    return 0.5 * (a + b);
}

namespace detail {

// dF_U/du via the preimage sum: 1/(delta/2) * sum over active pieces of
// 1/|F'| at the piece preimage of u.
inline double unordered_fejer_pdf(double u, const FejerPartition& part) {
    if (u <= 0.0 || u >= static_cast<double>(part.m))
        return 0.0;
    auto f = [&part](double x) { return fejer_kernel(part.m, x); };
    const double step = std::max(part.half_angle() * 2.5e-7, 1e-10);
    double density = 0.0;
    for (int p = 0; p < part.piece_count(); ++p) {
        const double lo = part.piece_lo(p), hi = part.piece_hi(p);
        const double va = part.values[p], vb = part.values[p + 1];
        if (u >= std::max(va, vb) || u <= std::min(va, vb))
            continue;
        const double theta = invert_monotone(f, Interval(lo, hi), u);
        const double slope = (f(theta + step) - f(theta - step)) / (2.0 * step);
        if (std::fabs(slope) > 0.0)
            density += 1.0 / std::fabs(slope);
    }
    return density / part.half_angle();
}

} // namespace detail

// Ordered kernel-value PDF for rank k of `count` users (Theorem-1 form,
// with the rank convention made explicit).
inline double ordered_fejer_pdf(double z, int k, int count, const FejerPartition& part,
                                RankConvention conv = RankConvention::BestIsLargest) {
    if (k < 1 || k > count)
        throw RankError("ordered_fejer_pdf: need 1 <= k <= count");
    if (z <= 0.0 || z >= static_cast<double>(part.m))
        return 0.0;
    const double q = unordered_fejer_cdf(z, part);
    const double dens = detail::unordered_fejer_pdf(z, part);
    // beta exponents: k-th largest pairs (count-k) with q, (k-1) with 1-q
    const int a = conv == RankConvention::BestIsLargest ? count - k : k - 1;
    const int b = conv == RankConvention::BestIsLargest ? k - 1 : count - k;
    if ((q == 0.0 && a > 0) || (q == 1.0 && b > 0))
        return 0.0;
    const double log_c = std::lgamma(count + 1.0) - std::lgamma(static_cast<double>(k)) -
                         std::lgamma(static_cast<double>(count - k + 1));
    double log_term = log_c;
    if (a > 0)
        log_term += a * std::log(q);
    if (b > 0)
        log_term += b * std::log1p(-q);
    return dens * std::exp(log_term);
}

namespace detail {

inline double log_regime_weight(CountRegime::Kind kind, const NomaPair& pair, double mu) {
    if (kind == CountRegime::Kind::Between) {
        LogSumExp acc;
        for (int l = pair.j; l < pair.i; ++l)
            acc.add(log_poisson_pmf(l, mu));
        return acc.value();
    }
    return log_poisson_sf(pair.i - 1, mu);
}

inline double ordered_abs_angle_pdf_norm(double theta, int k, const NomaPair& pair,
                                         CountRegime::Kind kind, const UserRegion& region,
                                         double log_c) {
    const double half = region.half_angle();
    if (theta < 0.0 || theta > half)
        return 0.0;
    const double L = region.line_density();
    const double x = theta * L;
    const double y = (half - theta) * L;
    const int tail_n = pair.i - k - 1;

    double log_base;
    if (x > 0.0)
        log_base = std::log(L) + log_poisson_pmf(k - 1, x);
    else if (k == 1)
        log_base = std::log(L); // pmf(0; 0) = 1
    else
        return 0.0;

    const double log_factor = kind == CountRegime::Kind::Between ? log_pois_cdf_small(tail_n, y)
                                                                 : log_pois_sf_small(tail_n, y);
    return std::exp(log_base - log_c + log_factor);
}

inline double ordered_distance_pdf_norm(double r, int k, const NomaPair& pair,
                                        CountRegime::Kind kind, const UserRegion& region,
                                        double log_c) {
    if (r < region.l1 || r > region.l2)
        return 0.0;
    const double area_r = region.half_angle() * (r * r - region.l1 * region.l1) * region.lambda;
    const double rem = mean_count(region) - area_r;
    const int tail_n = pair.i - k - 1;

    const double jac = region.delta * region.lambda * r; // d(area_r)/dr
    double log_base;
    if (area_r > 0.0)
        log_base = std::log(jac) + log_poisson_pmf(k - 1, area_r);
    else if (k == 1)
        log_base = std::log(jac);
    else
        return 0.0;

    const double y = rem < 0.0 ? 0.0 : rem;
    const double log_factor = kind == CountRegime::Kind::Between ? log_pois_cdf_small(tail_n, y)
                                                                 : log_pois_sf_small(tail_n, y);
    return std::exp(log_base - log_c + log_factor);
}

inline void check_angle_distance_regime(int k, const NomaPair& pair, const CountRegime& regime) {
    if (regime.kind == CountRegime::Kind::ExactK)
        throw RegimeError("angle/distance ordering distributions are regime-joint; ExactK invalid");
    if (k < 1 || k > pair.i)
        throw RankError("ordered pdf: need 1 <= k <= i");
}

} // namespace detail

// Theorem-2 PDF of the k-th smallest absolute angle given the count regime.
inline double ordered_abs_angle_pdf(double theta, int k, const NomaPair& pair,
                                    const CountRegime& regime, const UserRegion& region) {
    detail::check_angle_distance_regime(k, pair, regime);
    const double log_c = detail::log_regime_weight(regime.kind, pair, mean_count(region));
    return detail::ordered_abs_angle_pdf_norm(theta, k, pair, regime.kind, region, log_c);
}

// Theorem-3 signed-angle PDF: half the absolute-angle PDF, mirrored.
inline double ordered_angle_pdf(double theta, int k, const NomaPair& pair,
                                const CountRegime& regime, const UserRegion& region) {
    detail::check_angle_distance_regime(k, pair, regime);
    const double log_c = detail::log_regime_weight(regime.kind, pair, mean_count(region));
    return 0.5 *
           detail::ordered_abs_angle_pdf_norm(std::fabs(theta), k, pair, regime.kind, region, log_c);
}

// Lemma-3 / Theorem-4 PDF of the k-th nearest distance given the count regime.
inline double ordered_distance_pdf(double r, int k, const NomaPair& pair,
                                   const CountRegime& regime, const UserRegion& region) {
    detail::check_angle_distance_regime(k, pair, regime);
    const double log_c = detail::log_regime_weight(regime.kind, pair, mean_count(region));
    return detail::ordered_distance_pdf_norm(r, k, pair, regime.kind, region, log_c);
}

namespace detail {

// Inner integral of the gain CDF / outage kernel over the distance marginal:
// E_r[1 - exp(-y PL(r) / F)] with F fixed.
inline double gain_cdf_inner(double y, double kernel_value, const UserRegion& region,
                             const RadioConfig& cfg, const QuadSpec& spec) {
    if (y <= 0.0)
        return 0.0;
    if (kernel_value <= 0.0)
        return 1.0;
    auto f = [&](double r) {
        const double pl = path_loss(r, cfg.altitude, cfg.gamma);
        return (1.0 - std::exp(-y * pl / kernel_value)) * unordered_distance_pdf(r, region);
    };
    return integrate(f, Interval(region.l1, region.l2), spec);
}

inline QuadSpec inner_quad_spec() { return {1e-10, 1e-14, 400}; }

} // namespace detail

// Eq.-31 style CDF of the unordered effective gain, nested quadrature with
// the kernel's critical points as subdivision anchors.
inline double unordered_gain_cdf(double y, const UserRegion& region, const RadioConfig& cfg,
                                 const FejerPartition& part, QuadSpec spec = {}) {
    if (y <= 0.0)
        return 0.0;
    const QuadSpec inner = detail::inner_quad_spec();
    auto outer = [&](double theta) {
        return detail::gain_cdf_inner(y, fejer_kernel(cfg.m, theta), region, cfg, inner);
    };
    const double v = integrate_with_knots(outer, Interval(0.0, region.half_angle()),
                                          part.breakpoints, spec) /
                     region.half_angle();
    return std::min(1.0, std::max(0.0, v));
}

inline double unordered_gain_cdf(double y, const UserRegion& region, const RadioConfig& cfg,
                                 QuadSpec spec = {}) {
    return unordered_gain_cdf(y, region, cfg, build_fejer_partition(cfg.m, region.delta), spec);
}

// Ordered-gain CDF by order statistics: with ranks descending in gain, the
// k-th ranked gain falls below y iff at least count-k+1 of the count gains do.
inline double ordered_gain_cdf(double y, int k, int count, const UserRegion& region,
                               const RadioConfig& cfg, const FejerPartition& part,
                               QuadSpec spec = {}) {
    if (k < 1 || k > count)
        throw RankError("ordered_gain_cdf: need 1 <= k <= count");
    const double p = unordered_gain_cdf(y, region, cfg, part, spec);
    return detail::binomial_tail(count, count - k + 1, p);
}

inline double ordered_gain_cdf(double y, int k, int count, const UserRegion& region,
                               const RadioConfig& cfg, QuadSpec spec = {}) {
    return ordered_gain_cdf(y, k, count, region, cfg, build_fejer_partition(cfg.m, region.delta),
                            spec);
}

} // namespace noma_airlink
