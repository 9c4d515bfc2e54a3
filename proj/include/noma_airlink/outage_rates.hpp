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
// SIC decode thresholds, conditional/unconditional outage probabilities for
// each ordering strategy, and NOMA/OMA outage sum rates.
//
// Outage events reduce to {effective gain < eta} with the fading exponential
// integrated out; the per-strategy work is the double integral against the
// strategy's ordered/unordered distribution pair. Strategies conditioned on
// exact counts (Fejer kernel, full CSI) are combined over the Poisson law
// with the order-statistic weight pulled inside the quadrature, so the
// whole count mixture costs one integral per threshold.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <vector>

#include "noma_airlink/distributions.hpp"
#include "noma_airlink/ordering.hpp"

namespace noma_airlink {

struct QosTargets {
    double rate_j; // target rate of the strong user [BPCU]
    double rate_i; // target rate of the weak user [BPCU]

    QosTargets(double rate_j_, double rate_i_) : rate_j(rate_j_), rate_i(rate_i_) {
        if (!(rate_j > 0.0) || !(rate_i > 0.0))
            throw ValidationError("QosTargets requires positive rates");
    }

    double eps_j() const { return std::exp2(rate_j) - 1.0; }
    double eps_i() const { return std::exp2(rate_i) - 1.0; }
};

// Everything fixed for one configuration point.
struct LinkModel {
    UserRegion region;
    RadioConfig radio;
    NomaPower powers;
    NomaPair pair;
    QosTargets qos;
};

enum class UserRole { WeakI, StrongJ };

struct OutageReport {
    double p_out_i = std::numeric_limits<double>::quiet_NaN(); // Pr{i in outage | K >= i}
    double p_out_j = std::numeric_limits<double>::quiet_NaN(); // Pr{j in outage | K >= j}
    double noma_rate = 0.0;
    double oma_rate = 0.0;
    OrderingStrategy strategy = OrderingStrategy::Distance;
};

// Gain threshold whose crossing is the outage event for the role/regime.
// The weak user's own-message SIC event gives eta_i = eps_i/(rho (beta_i^2 -
// beta_j^2 eps_i)); the literal eps_i/rho stated in the text is available
// behind paper_literal_eta_i. ExactK counts are treated as NOMA-active.
inline double eta_threshold(UserRole role, const CountRegime& regime, const QosTargets& qos,
                            const NomaPower& powers, const RadioConfig& cfg,
                            bool paper_literal_eta_i = false) {
    const double rho = cfg.rho();
    if (regime.kind == CountRegime::Kind::Between) {
        if (role == UserRole::WeakI)
            throw RegimeError("eta_threshold: weak user absent in the single-user band");
        return qos.eps_j() / rho; // full power, full resources
    }
    const double margin = powers.beta_i_sq - powers.beta_j_sq * qos.eps_i();
    if (!(margin > 0.0))
        throw InfeasiblePowerSplit("eta_threshold: beta_i^2 - beta_j^2*eps_i <= 0");
    const double eta_weak_stage = qos.eps_i() / (rho * margin);
    if (role == UserRole::WeakI)
        return paper_literal_eta_i ? qos.eps_i() / rho : eta_weak_stage;
    return std::max(eta_weak_stage, qos.eps_j() / (rho * powers.beta_j_sq));
}

// OMA counterpart: full power, 1/K_N of the resources.
inline double oma_eta_threshold(UserRole role, const CountRegime& regime, const QosTargets& qos,
                                const RadioConfig& cfg, int k_n = 2) {
    const double rho = cfg.rho();
    if (regime.kind == CountRegime::Kind::Between) {
        if (role == UserRole::WeakI)
            throw RegimeError("oma_eta_threshold: weak user absent in the single-user band");
        return qos.eps_j() / rho; // single user keeps all resources
    }
    const double rate = role == UserRole::WeakI ? qos.rate_i : qos.rate_j;
    return (std::exp2(static_cast<double>(k_n) * rate) - 1.0) / rho;
}

// Shared evaluator for one LinkModel: caches the kernel partition, the
// Poisson table and the inverse-CDF lookups that dominate the Fejer route.
class AnalyticEngine {
  public:
    explicit AnalyticEngine(const LinkModel& lm, QuadSpec outer_spec = {},
                            bool paper_literal_eta_i = false)
        : lm_(lm), spec_(outer_spec), paper_eta_i_(paper_literal_eta_i),
          part_(build_fejer_partition(lm.radio.m, lm.region.delta)), mu_(mean_count(lm.region)) {
        n_max_ = std::max(poisson_truncation(mu_, 1e-12), lm.pair.i);
        log_pois_.resize(n_max_ + 1);
        lgam_.resize(n_max_ + 2);
        for (int n = 0; n <= n_max_; ++n)
            log_pois_[n] = log_poisson_pmf(n, mu_);
        for (int n = 0; n <= n_max_ + 1; ++n)
            lgam_[n] = std::lgamma(static_cast<double>(n) + 1.0);
        log_w2_ = detail::log_regime_weight(CountRegime::Kind::Between, lm.pair, mu_);
        log_w3_ = detail::log_regime_weight(CountRegime::Kind::AtLeastI, lm.pair, mu_);
        LogSumExp ge_j;
        ge_j.add(log_w2_);
        ge_j.add(log_w3_);
        log_wgej_ = ge_j.value();
    }

    const LinkModel& model() const { return lm_; }
    const FejerPartition& partition() const { return part_; }
    double mean_count_mu() const { return mu_; }
    double log_pr_between() const { return log_w2_; }
    double log_pr_at_least_i() const { return log_w3_; }
    double log_pr_serviceable() const { return log_wgej_; }

    // Conditional outage of Eq.-19 shape for the given strategy/role/regime.
    double conditional_outage(OrderingStrategy strategy, UserRole role,
                              const CountRegime& regime) const {
        const int k = rank_of(role);
        switch (strategy) {
        case OrderingStrategy::AbsAngle:
        case OrderingStrategy::Distance: {
            if (regime.kind == CountRegime::Kind::ExactK)
                throw RegimeError("conditional_outage: angle/distance use Between/AtLeastI");
            const double eta = eta_for(role, regime);
            return strategy == OrderingStrategy::AbsAngle
                       ? angle_route(k, regime.kind, eta)
                       : distance_route(k, regime.kind, eta);
        }
        case OrderingStrategy::FejerKernel:
        case OrderingStrategy::FullCSI: {
            if (regime.kind != CountRegime::Kind::ExactK)
                throw RegimeError("conditional_outage: Fejer/FullCSI condition on exact counts");
            const int n = regime.k;
            if (n < lm_.pair.j)
                throw RegimeError("conditional_outage: no transmission for K < j");
            if (k > n)
                throw RankError("conditional_outage: rank exceeds the count");
            const double eta = n < lm_.pair.i ? eta_for(role, CountRegime::between())
                                              : eta_for(role, CountRegime::at_least_i());
            return strategy == OrderingStrategy::FejerKernel ? fejer_exact(k, n, eta)
                                                             : csi_exact(k, n, eta);
        }
        }
        throw DomainError("conditional_outage: unknown strategy");
    }

    // Eq.-20/21 unconditional outage (no-service counts as outage).
    double unconditional_outage(OrderingStrategy strategy, UserRole role) const {
        const Conditionals c = conditionals(strategy, thresholds(false));
        const double w2 = std::exp(log_w2_);
        const double w3 = std::exp(log_w3_);
        if (role == UserRole::WeakI)
            return 1.0 - w3 * (1.0 - c.p_i_s3);
        return 1.0 - (w2 * (1.0 - c.p_j_s2) + w3 * (1.0 - c.p_j_s3));
    }

    double noma_sum_rate(OrderingStrategy strategy) const { return report(strategy).noma_rate; }
    double oma_sum_rate(OrderingStrategy strategy) const { return report(strategy).oma_rate; }

    // All four outputs for one strategy, sharing intermediates.
    OutageReport report(OrderingStrategy strategy) const {
        const Conditionals noma = conditionals(strategy, thresholds(false));
        const Conditionals oma = conditionals(strategy, thresholds(true));

        const double w2 = std::exp(log_w2_ - log_wgej_); // Pr{S_K2 | K >= j}
        const double w3 = std::exp(log_w3_ - log_wgej_); // Pr{S_K3 | K >= j}
        const double rj = lm_.qos.rate_j;
        const double ri = lm_.qos.rate_i;

        OutageReport rep;
        rep.strategy = strategy;
        rep.noma_rate = rj * (w2 * (1.0 - noma.p_j_s2) + w3 * (1.0 - noma.p_j_s3)) +
                        ri * w3 * (1.0 - noma.p_i_s3);
        rep.oma_rate = rj * (w2 * (1.0 - oma.p_j_s2) + w3 * (1.0 - oma.p_j_s3)) +
                       ri * w3 * (1.0 - oma.p_i_s3);
        rep.p_out_j = w2 * noma.p_j_s2 + w3 * noma.p_j_s3;
        rep.p_out_i = std::exp(log_w3_) > 0.0 ? noma.p_i_s3
                                              : std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

  private:
    struct Conditionals {
        double p_j_s2 = 0.0; // strong user, single-user band
        double p_j_s3 = 0.0; // strong user, NOMA band
        double p_i_s3 = 0.0; // weak user, NOMA band
    };

    struct Thresholds {
        double sng_j, noma_j, noma_i;
    };

    int rank_of(UserRole role) const {
        return role == UserRole::WeakI ? lm_.pair.i : lm_.pair.j;
    }

    double eta_for(UserRole role, const CountRegime& regime) const {
        return eta_threshold(role, regime, lm_.qos, lm_.powers, lm_.radio, paper_eta_i_);
    }

    Thresholds thresholds(bool oma) const {
        Thresholds t;
        if (oma) {
            t.sng_j = oma_eta_threshold(UserRole::StrongJ, CountRegime::between(), lm_.qos, lm_.radio);
            t.noma_j = oma_eta_threshold(UserRole::StrongJ, CountRegime::at_least_i(), lm_.qos, lm_.radio);
            t.noma_i = oma_eta_threshold(UserRole::WeakI, CountRegime::at_least_i(), lm_.qos, lm_.radio);
        } else {
            t.sng_j = eta_for(UserRole::StrongJ, CountRegime::between());
            t.noma_j = eta_for(UserRole::StrongJ, CountRegime::at_least_i());
            t.noma_i = eta_for(UserRole::WeakI, CountRegime::at_least_i());
        }
        return t;
    }

    Conditionals conditionals(OrderingStrategy strategy, const Thresholds& t) const {
        Conditionals c;
        const int j = lm_.pair.j;
        const int i = lm_.pair.i;
        switch (strategy) {
        case OrderingStrategy::AbsAngle:
            c.p_j_s2 = angle_route(j, CountRegime::Kind::Between, t.sng_j);
            c.p_j_s3 = angle_route(j, CountRegime::Kind::AtLeastI, t.noma_j);
            c.p_i_s3 = angle_route(i, CountRegime::Kind::AtLeastI, t.noma_i);
            break;
        case OrderingStrategy::Distance:
            c.p_j_s2 = distance_route(j, CountRegime::Kind::Between, t.sng_j);
            c.p_j_s3 = distance_route(j, CountRegime::Kind::AtLeastI, t.noma_j);
            c.p_i_s3 = distance_route(i, CountRegime::Kind::AtLeastI, t.noma_i);
            break;
        case OrderingStrategy::FejerKernel:
            c.p_j_s2 = fejer_mixed(j, t.sng_j, j, i - 1, log_w2_);
            c.p_j_s3 = fejer_mixed(j, t.noma_j, i, n_max_, log_w3_);
            c.p_i_s3 = fejer_mixed(i, t.noma_i, i, n_max_, log_w3_);
            break;
        case OrderingStrategy::FullCSI:
            c.p_j_s2 = csi_mixed(j, t.sng_j, j, i - 1, log_w2_);
            c.p_j_s3 = csi_mixed(j, t.noma_j, i, n_max_, log_w3_);
            c.p_i_s3 = csi_mixed(i, t.noma_i, i, n_max_, log_w3_);
            break;
        }
        return c;
    }

    // --- angle / distance routes (regime-joint distributions) ---

    double angle_route(int k, CountRegime::Kind kind, double eta) const {
        if (eta <= 0.0)
            return 0.0;
        const double log_c = kind == CountRegime::Kind::Between ? log_w2_ : log_w3_;
        if (log_c == -std::numeric_limits<double>::infinity())
            return 0.0;
        const QuadSpec inner = detail::inner_quad_spec();
        auto outer = [&](double theta) {
            const double f_th =
                detail::ordered_abs_angle_pdf_norm(theta, k, lm_.pair, kind, lm_.region, log_c);
            if (f_th == 0.0)
                return 0.0;
            return detail::gain_cdf_inner(eta, fejer_kernel(lm_.radio.m, theta), lm_.region,
                                          lm_.radio, inner) *
                   f_th;
        };
        const double v = integrate_with_knots(outer, Interval(0.0, lm_.region.half_angle()),
                                              part_.breakpoints, spec_);
        return clamp01(v);
    }

    double distance_route(int k, CountRegime::Kind kind, double eta) const {
        if (eta <= 0.0)
            return 0.0;
        const double log_c = kind == CountRegime::Kind::Between ? log_w2_ : log_w3_;
        if (log_c == -std::numeric_limits<double>::infinity())
            return 0.0;
        const QuadSpec inner = detail::inner_quad_spec();
        auto outer = [&](double theta) {
            const double f_m = fejer_kernel(lm_.radio.m, theta);
            auto integrand = [&](double r) {
                const double f_r =
                    detail::ordered_distance_pdf_norm(r, k, lm_.pair, kind, lm_.region, log_c);
                if (f_r == 0.0)
                    return 0.0;
                const double pl = path_loss(r, lm_.radio.altitude, lm_.radio.gamma);
                const double w = f_m <= 0.0 ? 1.0 : 1.0 - std::exp(-eta * pl / f_m);
                return w * f_r;
            };
            return integrate(integrand, Interval(lm_.region.l1, lm_.region.l2), inner);
        };
        const double v = integrate_with_knots(outer, Interval(0.0, lm_.region.half_angle()),
                                              part_.breakpoints, spec_) /
                         lm_.region.half_angle();
        return clamp01(v);
    }

    // --- Fejer-kernel route (exact counts, CDF-substituted form) ---

    // P_{k|K=n}(eta) with q = F_U(u): the rank-k (k-th largest) kernel value
    // has q ~ Beta(n-k+1, k).
    double fejer_exact(int k, int n, double eta) const {
        if (eta <= 0.0)
            return 0.0;
        const double log_c = lgam_[n] - lgam_[k - 1] - lgam_[n - k];
        const QuadSpec inner = detail::inner_quad_spec();
        auto f = [&](double q) {
            if (q <= 0.0 || q >= 1.0)
                return 0.0;
            const double w =
                std::exp(log_c + (n - k) * std::log(q) + (k - 1) * std::log1p(-q));
            if (w == 0.0)
                return 0.0;
            return w * detail::gain_cdf_inner(eta, fu_inverse(q), lm_.region, lm_.radio, inner);
        };
        return clamp01(integrate(f, Interval(0.0, 1.0), spec_));
    }

    // sum_n Pr{K=n} P_{k|K=n}(eta) / exp(log_norm), the Poisson mixture with
    // the order-statistic weight folded into the q-integral.
    double fejer_mixed(int k, double eta, int n_lo, int n_hi, double log_norm) const {
        if (eta <= 0.0 || log_norm == -std::numeric_limits<double>::infinity())
            return 0.0;
        n_lo = std::max(n_lo, k);
        if (n_lo > n_hi)
            return 0.0;

        // coefficients of the polynomial sum_n c_n q^{n-k}, scaled by the
        // largest log term so Horner evaluation stays in range
        std::vector<double> coeff(n_hi - n_lo + 1);
        double max_a = -std::numeric_limits<double>::infinity();
        std::vector<double> a(n_hi - n_lo + 1);
        for (int n = n_lo; n <= n_hi; ++n) {
            a[n - n_lo] = log_pois_[n] - log_norm + lgam_[n] - lgam_[n - k] - lgam_[k - 1];
            max_a = std::max(max_a, a[n - n_lo]);
        }
        for (std::size_t t = 0; t < a.size(); ++t)
            coeff[t] = std::exp(a[t] - max_a);

        const QuadSpec inner = detail::inner_quad_spec();
        auto f = [&](double q) {
            if (q <= 0.0 || q >= 1.0)
                return 0.0;
            double poly = 0.0;
            for (std::size_t t = coeff.size(); t-- > 0;)
                poly = poly * q + coeff[t];
            if (poly <= 0.0)
                return 0.0;
            const double log_w = max_a + (n_lo - k) * std::log(q) +
                                 (k - 1) * std::log1p(-q) + std::log(poly);
            const double w = std::exp(log_w);
            if (w == 0.0)
                return 0.0;
            return w * detail::gain_cdf_inner(eta, fu_inverse(q), lm_.region, lm_.radio, inner);
        };
        return clamp01(integrate(f, Interval(0.0, 1.0), spec_));
    }

    // --- full-CSI route (ordered gain CDF) ---

    double csi_exact(int k, int n, double eta) const {
        if (eta <= 0.0)
            return 0.0;
        return detail::binomial_tail(n, n - k + 1, unordered_gain_cdf_cached(eta));
    }

    double csi_mixed(int k, double eta, int n_lo, int n_hi, double log_norm) const {
        if (eta <= 0.0 || log_norm == -std::numeric_limits<double>::infinity())
            return 0.0;
        const double p = unordered_gain_cdf_cached(eta);
        double sum = 0.0;
        for (int n = std::max(n_lo, k); n <= n_hi; ++n)
            sum += std::exp(log_pois_[n] - log_norm) * detail::binomial_tail(n, n - k + 1, p);
        return clamp01(sum);
    }

    // --- caches ---

    double fu_inverse(double q) const {
        std::uint64_t key;
        std::memcpy(&key, &q, sizeof(key));
        auto it = fu_inv_memo_.find(key);
        if (it != fu_inv_memo_.end())
            return it->second;
        const double u = unordered_fejer_cdf_inverse(q, part_);
        fu_inv_memo_.emplace(key, u);
        return u;
    }

    double unordered_gain_cdf_cached(double eta) const {
        std::uint64_t key;
        std::memcpy(&key, &eta, sizeof(key));
        auto it = gain_cdf_memo_.find(key);
        if (it != gain_cdf_memo_.end())
            return it->second;
        const double p = unordered_gain_cdf(eta, lm_.region, lm_.radio, part_, spec_);
        gain_cdf_memo_.emplace(key, p);
        return p;
    }

    static double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

    LinkModel lm_;
    QuadSpec spec_;
    bool paper_eta_i_;
    FejerPartition part_;
    double mu_;
    int n_max_ = 0;
    double log_w2_ = 0.0, log_w3_ = 0.0, log_wgej_ = 0.0;
    std::vector<double> log_pois_;
    std::vector<double> lgam_;
    mutable std::unordered_map<std::uint64_t, double> fu_inv_memo_;
    mutable std::unordered_map<std::uint64_t, double> gain_cdf_memo_;
};

// Free-function forms of the spec operations; each builds a fresh engine.

inline double conditional_outage(OrderingStrategy strategy, UserRole role,
                                 const CountRegime& regime, const LinkModel& lm,
                                 QuadSpec spec = {}) {
    return AnalyticEngine(lm, spec).conditional_outage(strategy, role, regime);
}

inline double unconditional_outage(OrderingStrategy strategy, UserRole role, const LinkModel& lm,
                                   QuadSpec spec = {}) {
    return AnalyticEngine(lm, spec).unconditional_outage(strategy, role);
}

inline double noma_sum_rate(OrderingStrategy strategy, const LinkModel& lm, QuadSpec spec = {}) {
    return AnalyticEngine(lm, spec).noma_sum_rate(strategy);
}

inline double oma_sum_rate(OrderingStrategy strategy, const LinkModel& lm, QuadSpec spec = {}) {
    return AnalyticEngine(lm, spec).oma_sum_rate(strategy);
}

} // namespace noma_airlink
