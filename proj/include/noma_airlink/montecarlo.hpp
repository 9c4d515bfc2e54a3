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
// Trial-level simulation of deployment, ordering and SIC decoding, built
// directly on the SINR chain. This is the oracle every analytic result is
// validated against; it never touches the eta thresholds.
//
// Determinism: each trial draws from its own counter-based stream, trials
// are reduced in fixed 4096-trial blocks, and blocks are merged in index
// order, so estimates are bit-identical for any thread count.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "noma_airlink/montecarlo_fwd.hpp"
#include "noma_airlink/outage_rates.hpp"

namespace noma_airlink {

enum class TrialRegime { NoTx, Single, Noma };

struct TrialOutcome {
    TrialRegime regime = TrialRegime::NoTx;
    bool decoded_i = false;
    bool decoded_j = false;
    double rate_contrib = 0.0;
};

struct McEstimate {
    double p_out_i = std::numeric_limits<double>::quiet_NaN();
    double p_out_i_stderr = std::numeric_limits<double>::quiet_NaN();
    double p_out_j = std::numeric_limits<double>::quiet_NaN();
    double p_out_j_stderr = std::numeric_limits<double>::quiet_NaN();
    double noma_rate = 0.0;
    double noma_rate_stderr = 0.0;
    double oma_rate = 0.0;
    double oma_rate_stderr = 0.0;
    double noma_minus_oma = 0.0;        // paired difference of the two rates
    double noma_minus_oma_stderr = 0.0; // its stderr (trials are shared)
    long long n_trials = 0;
    long long n_serviceable = 0; // trials with K >= j
    long long n_noma = 0;        // trials with K >= i
    std::uint64_t seed = 0;
};

namespace detail {

struct TrialDetail {
    TrialOutcome noma;
    bool oma_decoded_i = false;
    bool oma_decoded_j = false;
    double oma_rate_contrib = 0.0;
};

template <class Rng>
TrialDetail run_trial_detail(const LinkModel& lm, OrderingStrategy strategy, GainModel gain_model,
                             Rng& rng) {
    TrialDetail td;
    const long long count = sample_count(lm.region, rng);
    if (count < lm.pair.j)
        return td;

    std::vector<UserSample> users(static_cast<std::size_t>(count));
    for (auto& u : users)
        u = sample_user(lm.region, rng);

    const std::vector<int> perm = rank_users(users, strategy, lm.radio);
    const Selection sel = select_pair(perm, lm.pair, static_cast<int>(count));

    const double rho = lm.radio.rho();
    const double eps_i = lm.qos.eps_i();
    const double eps_j = lm.qos.eps_j();

    if (sel.kind == Selection::Kind::SingleUser) {
        td.noma.regime = TrialRegime::Single;
        const double g = effective_gain(users[sel.strong], lm.radio, gain_model);
        const bool dec = std::log2(1.0 + rho * g) >= lm.qos.rate_j; // full power and resources
        td.noma.decoded_j = dec;
        td.noma.rate_contrib = dec ? lm.qos.rate_j : 0.0;
        td.oma_decoded_j = dec; // OMA degenerates to the same single-user rule
        td.oma_rate_contrib = td.noma.rate_contrib;
        return td;
    }

    td.noma.regime = TrialRegime::Noma;
    const double g_j = effective_gain(users[sel.strong], lm.radio, gain_model);
    const double g_i = effective_gain(users[sel.weak], lm.radio, gain_model);

    // strong user: decode the weak message, cancel it, then decode its own
    td.noma.decoded_j = sinr(g_j, lm.pair.i, lm.pair.j, lm.pair, lm.powers, lm.radio) > eps_i &&
                        sinr(g_j, lm.pair.j, lm.pair.j, lm.pair, lm.powers, lm.radio) > eps_j;
    // weak user: decode its own message under the strong user's interference
    td.noma.decoded_i = sinr(g_i, lm.pair.i, lm.pair.i, lm.pair, lm.powers, lm.radio) > eps_i;
    td.noma.rate_contrib = (td.noma.decoded_j ? lm.qos.rate_j : 0.0) +
                           (td.noma.decoded_i ? lm.qos.rate_i : 0.0);

    // OMA: each pair member gets full power but half the resources
    td.oma_decoded_j = 0.5 * std::log2(1.0 + rho * g_j) >= lm.qos.rate_j;
    td.oma_decoded_i = 0.5 * std::log2(1.0 + rho * g_i) >= lm.qos.rate_i;
    td.oma_rate_contrib = (td.oma_decoded_j ? lm.qos.rate_j : 0.0) +
                          (td.oma_decoded_i ? lm.qos.rate_i : 0.0);
    return td;
}

struct BlockAccum {
    long long n = 0, n_gej = 0, n_noma = 0;
    long long dec_i = 0, dec_j_any = 0;
    double rate = 0.0, rate_sq = 0.0;
    double oma = 0.0, oma_sq = 0.0;
    double diff = 0.0, diff_sq = 0.0;

    void add(const TrialDetail& td) {
        ++n;
        if (td.noma.regime == TrialRegime::NoTx)
            return;
        ++n_gej;
        if (td.noma.regime == TrialRegime::Noma) {
            ++n_noma;
            dec_i += td.noma.decoded_i ? 1 : 0;
        }
        dec_j_any += td.noma.decoded_j ? 1 : 0;
        rate += td.noma.rate_contrib;
        rate_sq += td.noma.rate_contrib * td.noma.rate_contrib;
        oma += td.oma_rate_contrib;
        oma_sq += td.oma_rate_contrib * td.oma_rate_contrib;
        const double d = td.noma.rate_contrib - td.oma_rate_contrib;
        diff += d;
        diff_sq += d * d;
    }

    void merge(const BlockAccum& o) {
        n += o.n;
        n_gej += o.n_gej;
        n_noma += o.n_noma;
        dec_i += o.dec_i;
        dec_j_any += o.dec_j_any;
        rate += o.rate;
        rate_sq += o.rate_sq;
        oma += o.oma;
        oma_sq += o.oma_sq;
        diff += o.diff;
        diff_sq += o.diff_sq;
    }
};

inline constexpr long long kMcBlock = 4096;

} // namespace detail

// One simulated transmission attempt (the spec's TrialOutcome view).
template <class Rng>
TrialOutcome run_trial(const LinkModel& lm, OrderingStrategy strategy, GainModel gain_model,
                       Rng& rng) {
    return detail::run_trial_detail(lm, strategy, gain_model, rng).noma;
}

// n_trials independent trials with per-trial streams derived from `seed`.
inline McEstimate estimate(long long n_trials, const LinkModel& lm, OrderingStrategy strategy,
                           GainModel gain_model, std::uint64_t seed, int n_threads = 1) {
    if (n_trials < 1)
        throw DomainError("estimate: n_trials must be >= 1");
    if (n_threads < 1)
        n_threads = 1;

    const long long n_blocks = (n_trials + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<detail::BlockAccum> blocks(static_cast<std::size_t>(n_blocks));

    auto run_block = [&](long long b) {
        detail::BlockAccum acc;
        const long long t0 = b * detail::kMcBlock;
        const long long t1 = std::min(n_trials, t0 + detail::kMcBlock);
        for (long long t = t0; t < t1; ++t) {
            SplitMix64 rng = trial_rng(seed, static_cast<std::uint64_t>(t));
            acc.add(detail::run_trial_detail(lm, strategy, gain_model, rng));
        }
        blocks[static_cast<std::size_t>(b)] = acc;
    };

    if (n_threads == 1 || n_blocks == 1) {
        for (long long b = 0; b < n_blocks; ++b)
            run_block(b);
    } else {
        std::atomic<long long> next{0};
        std::vector<std::thread> pool;
        const int workers = static_cast<int>(std::min<long long>(n_threads, n_blocks));
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (long long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool)
            th.join();
    }

    detail::BlockAccum total;
    for (const auto& b : blocks)
        total.merge(b);

    McEstimate est;
    est.n_trials = total.n;
    est.n_serviceable = total.n_gej;
    est.n_noma = total.n_noma;
    est.seed = seed;

    if (total.n_noma > 0) {
        const double p = 1.0 - static_cast<double>(total.dec_i) / total.n_noma;
        est.p_out_i = p;
        est.p_out_i_stderr = std::sqrt(std::max(0.0, p * (1.0 - p)) / total.n_noma);
    }
    if (total.n_gej > 0) {
        const double p = 1.0 - static_cast<double>(total.dec_j_any) / total.n_gej;
        est.p_out_j = p;
        est.p_out_j_stderr = std::sqrt(std::max(0.0, p * (1.0 - p)) / total.n_gej);

        auto mean_se = [&](double s, double sq, double& mean, double& se) {
            mean = s / total.n_gej;
            const double var = std::max(0.0, sq / total.n_gej - mean * mean);
            se = std::sqrt(var / total.n_gej);
        };
        mean_se(total.rate, total.rate_sq, est.noma_rate, est.noma_rate_stderr);
        mean_se(total.oma, total.oma_sq, est.oma_rate, est.oma_rate_stderr);
        mean_se(total.diff, total.diff_sq, est.noma_minus_oma, est.noma_minus_oma_stderr);
    }
    return est;
}

// Count sampler conditioned on a regime: exact counts are generated
// directly, bands sample the truncated Poisson law (the exact conditional
// of the HPPP; rejection would need ~1/Pr{band} populations per sample).
class RegimeCountSampler {
  public:
    RegimeCountSampler(const CountRegime& regime, const NomaPair& pair, double mu) {
        switch (regime.kind) {
        case CountRegime::Kind::ExactK:
            lo_ = regime.k;
            cum_ = {1.0};
            return;
        case CountRegime::Kind::Between:
            lo_ = pair.j;
            build(mu, pair.j, pair.i - 1);
            return;
        case CountRegime::Kind::AtLeastI:
            lo_ = pair.i;
            build(mu, pair.i, std::max(poisson_truncation(mu, 1e-12), pair.i) + 8);
            return;
        }
    }

    template <class Rng>
    int sample(Rng& rng) const {
        if (cum_.size() == 1)
            return lo_;
        const double u = uniform01(rng);
        int idx = 0;
        while (idx + 1 < static_cast<int>(cum_.size()) && u > cum_[static_cast<std::size_t>(idx)])
            ++idx;
        return lo_ + idx;
    }

  private:
    void build(double mu, int lo, int hi) {
        LogSumExp norm;
        std::vector<double> logp;
        for (int n = lo; n <= hi; ++n) {
            logp.push_back(log_poisson_pmf(n, mu));
            norm.add(logp.back());
        }
        cum_.resize(logp.size());
        double run = 0.0;
        for (std::size_t t = 0; t < logp.size(); ++t) {
            run += std::exp(logp[t] - norm.value());
            cum_[t] = run;
        }
        cum_.back() = 1.0;
    }

    int lo_ = 1;
    std::vector<double> cum_;
};

// Samples of a ranked user's statistic over trials satisfying the regime.
inline std::vector<double> collect_ranked_statistic(RankedStat stat, int k,
                                                    OrderingStrategy order_by,
                                                    const CountRegime& regime, long long n_trials,
                                                    const LinkModel& lm, GainModel gain_model,
                                                    std::uint64_t seed) {
    if (k < 1)
        throw RankError("collect_ranked_statistic: k must be >= 1");
    const RegimeCountSampler counts(regime, lm.pair, mean_count(lm.region));

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_trials));
    for (long long t = 0; t < n_trials; ++t) {
        SplitMix64 rng = trial_rng(seed, static_cast<std::uint64_t>(t));
        const int count = counts.sample(rng);
        if (count < k)
            continue;
        std::vector<UserSample> users(static_cast<std::size_t>(count));
        for (auto& u : users)
            u = sample_user(lm.region, rng);
        const std::vector<int> perm = rank_users(users, order_by, lm.radio);
        const UserSample& sel = users[static_cast<std::size_t>(perm[static_cast<std::size_t>(k - 1)])];
        switch (stat) {
        case RankedStat::Distance:
            out.push_back(sel.distance);
            break;
        case RankedStat::AbsAngle:
            out.push_back(std::fabs(sel.angle));
            break;
        case RankedStat::FejerValue:
            out.push_back(fejer_kernel(lm.radio.m, sel.angle));
            break;
        case RankedStat::Gain:
            out.push_back(effective_gain(sel, lm.radio, gain_model));
            break;
        }
    }
    return out;
}

struct Histogram {
    std::vector<double> edges;   // bin_count + 1 ascending edges
    std::vector<double> density; // normalized so the histogram integrates to 1
    long long n_samples = 0;
};

// Normalized histogram of a ranked statistic under the regime condition.
inline Histogram empirical_distribution(RankedStat stat, int k, OrderingStrategy order_by,
                                        const CountRegime& regime, long long n_trials,
                                        const LinkModel& lm, GainModel gain_model,
                                        std::uint64_t seed, int bins = 64) {
    if (bins < 1)
        throw DomainError("empirical_distribution: bins must be >= 1");
    const std::vector<double> samples =
        collect_ranked_statistic(stat, k, order_by, regime, n_trials, lm, gain_model, seed);
    Histogram h;
    h.n_samples = static_cast<long long>(samples.size());
    if (samples.empty())
        return h;

    double lo = samples[0], hi = samples[0];
    for (double s : samples) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi <= lo)
        hi = lo + 1.0;

    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.density.assign(static_cast<std::size_t>(bins), 0.0);
    const double bin_w = (hi - lo) / bins;
    for (double s : samples) {
        int b = static_cast<int>((s - lo) / bin_w);
        b = std::min(std::max(b, 0), bins - 1);
        h.density[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& d : h.density)
        d /= static_cast<double>(samples.size()) * bin_w;
    return h;
}

} // namespace noma_airlink
