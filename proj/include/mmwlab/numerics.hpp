// SPDX-License-Identifier: Apache-2.0
//
// mmwlab: indoor millimeter-wave network laboratory
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

#ifndef MMWLAB_NUMERICS_HPP
#define MMWLAB_NUMERICS_HPP

// Small numerical toolbox: globally adaptive Gauss-Kronrod quadrature,
// golden-section search and Nelder-Mead.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "mmwlab/detail/summation.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::numerics {

struct QuadPolicy {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = kron * h;
    double error = std::fabs((kron - gauss) * h);
    if (!std::isfinite(value))
        throw QuadratureError("numerics", "integrand is not finite on [" + std::to_string(a) + ", " +
                                              std::to_string(b) + "]");
    // Floor at rounding level so flat integrands still terminate.
    error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(value));
    return {a, b, value, error};
}

} // namespace detail

/// Globally adaptive G7/K15 quadrature of f over [a, b]. Optional interior
/// breakpoints (kinks, discontinuities) seed the initial partition.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadPolicy& policy = {},
                     const std::vector<double>& breakpoints = {}) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("numerics", "integrate requires finite limits");
    if (a == b) return {};
    if (b < a) {
        QuadResult r = integrate(f, b, a, policy, breakpoints);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Segment> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = detail::gk15(f, cuts[i], cuts[i + 1]);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }
    int count = static_cast<int>(heap.size());
    while (total_err > std::max(policy.abs_tol, policy.rel_tol * std::fabs(total))) {
        if (count >= policy.max_intervals)
            throw QuadratureError("numerics", "tolerance not reached within " +
                                                  std::to_string(policy.max_intervals) +
                                                  " intervals (error estimate " +
                                                  std::to_string(total_err) + ")");
        const detail::Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b))
            throw QuadratureError("numerics", "interval cannot be subdivided further");
        const auto left = detail::gk15(f, s.a, mid);
        const auto right = detail::gk15(f, mid, s.b);
        heap.push(left);
        heap.push(right);
        ++count;
        // Re-sum from the heap contents occasionally to avoid drift.
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        if (count % 64 == 0) {
            auto copy = heap;
            mmwlab::detail::CompensatedSum v, e;
            while (!copy.empty()) {
                v.add(copy.top().value);
                e.add(copy.top().error);
                copy.pop();
            }
            total = v.value();
            total_err = e.value();
        }
    }
    mmwlab::detail::CompensatedSum v;
    auto copy = heap;
    while (!copy.empty()) {
        v.add(copy.top().value);
        copy.pop();
    }
    return {v.value(), total_err, count};
}

/// Integral of f over [a, inf) via the map x = a + t / (1 - t).
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, const QuadPolicy& policy = {}) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double u = 1.0 - t;
        const double v = f(a + t / u);
        return v == 0.0 ? 0.0 : v / (u * u);
    };
    return integrate(g, 0.0, 1.0, policy);
}

struct ScalarMin {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Golden-section minimization of a unimodal function on [a, b].
template <class F>
ScalarMin golden_section(F&& f, double a, double b, double x_tol, int max_iter = 500) {
    if (!(b > a)) throw DomainError("numerics", "golden_section requires a < b");
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    while (b - a > x_tol) {
        if (++it > max_iter)
            throw ConvergenceError("numerics", "golden_section did not reach the interval tolerance");
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? ScalarMin{c, fc, it} : ScalarMin{d, fd, it};
}

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double f_tol = 1e-12;  // spread of simplex values, relative to |best| + f_tol
    double x_tol = 1e-9;   // simplex diameter
    double initial_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead downhill simplex (standard coefficients 1, 2, 0.5, 0.5).
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw DomainError("numerics", "nelder_mead needs at least one parameter");
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step * (x0[i] == 0.0 ? 1.0 : std::fabs(x0[i]));
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    while (true) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return vals[p] < vals[q]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::fabs(pts[i][k] - pts[best][k]));
        const double spread = vals[worst] - vals[best];
        if (std::isfinite(spread) && spread <= opt.f_tol * (std::fabs(vals[best]) + opt.f_tol) &&
            diam <= opt.x_tol * 1e3)
            return {pts[best], vals[best], evals, true};
        if (diam <= opt.x_tol) return {pts[best], vals[best], evals, true};
        if (evals >= opt.max_evaluations) return {pts[best], vals[best], evals, false};

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
            return p;
        };
        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fcon = eval(xc);
            if (fcon < std::min(fr, vals[worst])) {
                pts[worst] = xc;
                vals[worst] = fcon;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
}

} // namespace mmwlab::numerics

#endif // MMWLAB_NUMERICS_HPP
