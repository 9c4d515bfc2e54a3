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
// Quadrature, bracketed root finding, monotone inversion and numerically
// stable Poisson/factorial arithmetic. Everything here is pure and reentrant.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "noma_airlink/errors.hpp"

namespace noma_airlink {

struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw DomainError("Interval requires finite lo < hi");
    }

    double length() const { return hi - lo; }
};

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;

    void check() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw DomainError("QuadSpec tolerances must be positive");
        if (max_subdivisions < 1)
            throw DomainError("QuadSpec max_subdivisions must be >= 1");
    }
};

namespace detail {

// 15-point Gauss-Kronrod pair (QUADPACK dqk15 abscissae/weights).
inline constexpr double kGkNodes[8] = {
    0.000000000000000000e+00, 2.077849550078984676e-01, 4.058451513773971669e-01,
    5.860872354676911303e-01, 7.415311855993944399e-01, 8.648644233597690728e-01,
    9.491079123427585245e-01, 9.914553711208126392e-01};
inline constexpr double kKronrodW[8] = {
    2.094821410847278280e-01, 2.044329400752988924e-01, 1.903505780647854099e-01,
    1.690047266392679028e-01, 1.406532597155259187e-01, 1.047900103222501838e-01,
    6.309209262997855329e-02, 2.293532201052922496e-02};
inline constexpr double kGaussW[4] = {
    4.179591836734693878e-01, 3.818300505051189449e-01, 2.797053914892766679e-01,
    1.294849661688696933e-01};

struct PanelResult {
    double integral;
    double error;
};

// One Gauss7/Kronrod15 panel with the QUADPACK error heuristic.
template <class F>
PanelResult gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    const double fc = f(center);
    double resk = kKronrodW[0] * fc;
    double resg = kGaussW[0] * fc;
    double resabs = kKronrodW[0] * std::fabs(fc);
    double fv[8][2];
    fv[0][0] = fv[0][1] = fc;
    for (int i = 1; i < 8; ++i) {
        const double dx = hlgth * kGkNodes[i];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[i][0] = f1;
        fv[i][1] = f2;
        const double s = f1 + f2;
        resk += kKronrodW[i] * s;
        resabs += kKronrodW[i] * (std::fabs(f1) + std::fabs(f2));
        if (i % 2 == 0)
            resg += kGaussW[i / 2] * s;
    }

    const double reskh = resk * 0.5;
    double resasc = kKronrodW[0] * std::fabs(fc - reskh);
    for (int i = 1; i < 8; ++i)
        resasc += kKronrodW[i] * (std::fabs(fv[i][0] - reskh) + std::fabs(fv[i][1] - reskh));

    const double result = resk * hlgth;
    resabs *= std::fabs(hlgth);
    resasc *= std::fabs(hlgth);

    double err = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(eps * 50.0 * resabs, err);
    return {result, err};
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over iv. The subdivision budget is
// global; local panels are accepted when their error fits a length-
// proportional share of the total tolerance, so the accumulated error is
// bounded by max(rel_tol*|result|, abs_tol).
template <class F>
double integrate(F&& f, Interval iv, QuadSpec spec = {}) {
    spec.check();

    struct Seg {
        double a, b, integral, error;
    };
    detail::PanelResult first = detail::gk15(f, iv.lo, iv.hi);
    double rough = std::fabs(first.integral);

    std::vector<Seg> stack;
    stack.push_back({iv.lo, iv.hi, first.integral, first.error});

    const double total_len = iv.length();
    double result = 0.0;
    double err_sum = 0.0;
    int used = 0;

    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const double tol = std::max(spec.abs_tol, spec.rel_tol * rough);
        const double share = tol * ((s.b - s.a) / total_len);
        if (s.error <= share || used >= spec.max_subdivisions) {
            result += s.integral;
            err_sum += s.error;
            continue;
        }
        ++used;
        const double mid = 0.5 * (s.a + s.b);
        detail::PanelResult left = detail::gk15(f, s.a, mid);
        detail::PanelResult right = detail::gk15(f, mid, s.b);
        rough = std::max(rough, std::fabs(result) + std::fabs(left.integral) + std::fabs(right.integral));
        stack.push_back({s.a, mid, left.integral, left.error});
        stack.push_back({mid, s.b, right.integral, right.error});
    }

    if (err_sum > std::max(spec.abs_tol, spec.rel_tol * std::fabs(result)) && used >= spec.max_subdivisions)
        throw NonConvergence("integrate: subdivision budget exhausted with error above tolerance");
    return result;
}

// Integration with interior knots inserted as hard subdivision boundaries.
// Knots outside (lo, hi) are ignored; used to anchor panels at kernel nulls.
template <class F>
double integrate_with_knots(F&& f, Interval iv, const std::vector<double>& knots, QuadSpec spec = {}) {
    spec.check();
    std::vector<double> pts;
    pts.push_back(iv.lo);
    for (double k : knots)
        if (k > iv.lo && k < iv.hi)
            pts.push_back(k);
    pts.push_back(iv.hi);
    std::sort(pts.begin(), pts.end());

    const int pieces = static_cast<int>(pts.size()) - 1;
    QuadSpec piece_spec = spec;
    piece_spec.abs_tol = spec.abs_tol / pieces;
    piece_spec.max_subdivisions = std::max(1, spec.max_subdivisions / pieces);

    double total = 0.0;
    for (int p = 0; p < pieces; ++p)
        if (pts[p + 1] > pts[p])
            total += integrate(f, Interval(pts[p], pts[p + 1]), piece_spec);
    return total;
}

// Interior points of iv where the numerical derivative of f changes sign,
// each refined by bisection on a symmetric difference. grid_n sets the
// sign-change scan resolution. Returns an ascending, deduplicated list;
// empty if f is monotone on iv.
template <class F>
std::vector<double> find_critical_points(F&& f, Interval iv, int grid_n) {
    if (grid_n < 4)
        throw DomainError("find_critical_points: grid_n must be >= 4");

    const double h = iv.length() / grid_n;
    std::vector<double> fx(grid_n + 1);
    for (int k = 0; k <= grid_n; ++k)
        fx[k] = f(iv.lo + k * h);

    // central-difference slope sign at interior nodes; zeros inherit the
    // previous nonzero sign so flat patches do not fabricate extrema
    std::vector<int> sign(grid_n + 1, 0);
    int prev = 0;
    for (int k = 1; k < grid_n; ++k) {
        const double d = fx[k + 1] - fx[k - 1];
        int s = (d > 0.0) - (d < 0.0);
        if (s == 0)
            s = prev;
        sign[k] = s;
        if (s != 0)
            prev = s;
    }

    const double delta = std::max(iv.length() * 1e-9, 1e-14);
    auto diff = [&](double x) { return f(x + delta) - f(x - delta); };

    std::vector<double> roots;
    for (int k = 1; k < grid_n - 1; ++k) {
        if (sign[k] == 0 || sign[k + 1] == 0 || sign[k] == sign[k + 1])
            continue;
        double a = iv.lo + k * h;
        double b = iv.lo + (k + 1) * h;
        double da = diff(a);
        double db = diff(b);
        if (da == 0.0) {
            roots.push_back(a);
            continue;
        }
        if (db == 0.0 || (da > 0.0) == (db > 0.0)) {
            roots.push_back(0.5 * (a + b));
            continue;
        }
        for (int it = 0; it < 120 && (b - a) > 1e-13; ++it) {
            const double m = 0.5 * (a + b);
            const double dm = diff(m);
            if (dm == 0.0) {
                a = b = m;
                break;
            }
            if ((dm > 0.0) == (da > 0.0)) {
                a = m;
                da = dm;
            } else {
                b = m;
            }
        }
        roots.push_back(0.5 * (a + b));
    }

    std::vector<double> out;
    for (double r : roots) {
        if (r <= iv.lo + delta || r >= iv.hi - delta)
            continue;
        if (!out.empty() && std::fabs(r - out.back()) < 1e-12)
            continue;
        out.push_back(r);
    }
    return out;
}

// Bisection inverse of a strictly monotone g on iv. Throws OutOfRange when
// target is not bracketed by g(lo), g(hi).
template <class G>
double invert_monotone(G&& g, Interval iv, double target) {
    double a = iv.lo, b = iv.hi;
    double ga = g(a), gb = g(b);
    if (!std::isfinite(ga) || !std::isfinite(gb))
        throw DomainError("invert_monotone: g not finite at interval ends");
    const bool increasing = gb > ga;
    const double lo_v = std::min(ga, gb);
    const double hi_v = std::max(ga, gb);
    if (target < lo_v || target > hi_v)
        throw OutOfRange("invert_monotone: target outside g(iv)");

    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break; // interval no longer splittable in double precision
        const double gm = g(m);
        if (gm == target)
            return m;
        if ((gm < target) == increasing)
            a = m;
        else
            b = m;
        if ((b - a) <= 1e-15 * (std::fabs(a) + std::fabs(b) + 1.0))
            break;
    }
    return 0.5 * (a + b);
}

// log Pr{K = k} for K ~ Poisson(mu), exact in the log domain.
inline double log_poisson_pmf(long long k, double mu) {
    if (k < 0)
        throw DomainError("log_poisson_pmf: k must be >= 0");
    if (!(mu > 0.0))
        throw DomainError("log_poisson_pmf: mu must be > 0");
    return static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0);
}

// Streaming log-sum-exp accumulator.
class LogSumExp {
  public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity())
            return;
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    double value() const {
        if (sum_ == 0.0)
            return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

  private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

// log Pr{K <= n}; -inf for n < 0.
inline double log_poisson_cdf(long long n, double mu) {
    if (n < 0)
        return -std::numeric_limits<double>::infinity();
    LogSumExp acc;
    for (long long k = 0; k <= n; ++k)
        acc.add(log_poisson_pmf(k, mu));
    return std::min(acc.value(), 0.0);
}

// log Pr{K > n}, summed over the upper tail directly so the result keeps
// full relative precision even when the tail is tiny.
inline double log_poisson_sf(long long n, double mu) {
    LogSumExp acc;
    long long k = std::max<long long>(n + 1, 0);
    double prev = -std::numeric_limits<double>::infinity();
    for (;; ++k) {
        const double lp = log_poisson_pmf(k, mu);
        acc.add(lp);
        // terms decay monotonically once past the mode; stop when negligible
        if (static_cast<double>(k) > mu && lp < prev && lp < acc.value() - 45.0)
            break;
        prev = lp;
        if (k > static_cast<long long>(mu + 60.0 * std::sqrt(mu) + 1e6))
            break; // unreachable safety stop
    }
    return std::min(acc.value(), 0.0);
}

// Smallest n_max with Pr{K > n_max} < tail_tol, by cumulative pmf.
inline int poisson_truncation(double mu, double tail_tol) {
    if (!(mu > 0.0))
        throw DomainError("poisson_truncation: mu must be > 0");
    if (!(tail_tol > 0.0) || !(tail_tol < 1.0))
        throw DomainError("poisson_truncation: tail_tol must be in (0,1)");
    double cum = 0.0;
    for (long long k = 0;; ++k) {
        cum += std::exp(log_poisson_pmf(k, mu));
        if (1.0 - cum < tail_tol)
            return static_cast<int>(k);
        if (k > static_cast<long long>(mu + 80.0 * std::sqrt(mu) + 1e6))
            throw NonConvergence("poisson_truncation: tail did not fall below tolerance");
    }
}

} // namespace noma_airlink
