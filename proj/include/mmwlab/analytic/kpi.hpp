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

#ifndef MMWLAB_ANALYTIC_KPI_HPP
#define MMWLAB_ANALYTIC_KPI_HPP

// Spectral efficiency, area traffic capacity and experienced data rate from
// an SINR distribution given as samples, a tabulated tail or a callable.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmwlab/analytic/sinr.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/netgeom.hpp"
#include "mmwlab/numerics.hpp"

namespace mmwlab::analytic {

/// Sorted linear SINR samples.
struct EmpiricalSinr {
    std::vector<double> sorted;
};

/// P(SINR > s) on an ascending dB grid, interpolated linearly in dB. Below
/// the grid the first value holds; above it the tail is zero.
struct TabulatedSinr {
    std::vector<double> zeta_db;
    std::vector<double> ccdf;
};

struct FunctionSinr {
    std::function<double(double)> ccdf;  // argument in linear scale
};

class SinrDistribution {
public:
    using Repr = std::variant<EmpiricalSinr, TabulatedSinr, FunctionSinr>;

    static SinrDistribution empirical(std::vector<double> samples) {
        if (samples.empty()) throw DomainError("analytic", "empirical distribution needs samples");
        for (double s : samples)
            if (!(s >= 0.0) || std::isinf(s)) throw DomainError("analytic", "SINR samples must be finite and >= 0");
        std::sort(samples.begin(), samples.end());
        return SinrDistribution(EmpiricalSinr{std::move(samples)});
    }

    static SinrDistribution tabulated(std::vector<double> zeta_db, std::vector<double> ccdf) {
        if (zeta_db.size() < 2 || zeta_db.size() != ccdf.size())
            throw DomainError("analytic", "tabulated distribution needs >= 2 matching points");
        for (std::size_t i = 0; i < zeta_db.size(); ++i) {
            if (i > 0 && !(zeta_db[i] > zeta_db[i - 1])) throw DomainError("analytic", "dB grid must ascend");
            if (!(ccdf[i] >= 0.0 && ccdf[i] <= 1.0)) throw DomainError("analytic", "tail values must lie in [0, 1]");
            if (i > 0 && ccdf[i] > ccdf[i - 1] + 1e-12) throw DomainError("analytic", "tail must be non-increasing");
        }
        return SinrDistribution(TabulatedSinr{std::move(zeta_db), std::move(ccdf)});
    }

    static SinrDistribution function(std::function<double(double)> ccdf) {
        if (!ccdf) throw DomainError("analytic", "function distribution needs a callable");
        return SinrDistribution(FunctionSinr{std::move(ccdf)});
    }

    const Repr& repr() const { return repr_; }

    /// P(SINR > s), s linear.
    double ccdf(double s) const {
        if (std::holds_alternative<EmpiricalSinr>(repr_)) {
            const auto& v = std::get<EmpiricalSinr>(repr_).sorted;
            const auto it = std::upper_bound(v.begin(), v.end(), s);
            return static_cast<double>(v.end() - it) / static_cast<double>(v.size());
        }
        if (std::holds_alternative<TabulatedSinr>(repr_)) {
            const auto& t = std::get<TabulatedSinr>(repr_);
            if (s <= 0.0) return t.ccdf.front();
            const double db = netgeom::linear_to_db(s);
            if (db <= t.zeta_db.front()) return t.ccdf.front();
            if (db > t.zeta_db.back()) return 0.0;
            const auto it = std::lower_bound(t.zeta_db.begin(), t.zeta_db.end(), db);
            const std::size_t i = static_cast<std::size_t>(it - t.zeta_db.begin());
            if (i == 0) return t.ccdf.front();
            const double w = (db - t.zeta_db[i - 1]) / (t.zeta_db[i] - t.zeta_db[i - 1]);
            return (1.0 - w) * t.ccdf[i - 1] + w * t.ccdf[i];
        }
        return std::clamp(std::get<FunctionSinr>(repr_).ccdf(s), 0.0, 1.0);
    }

    /// Spectral-efficiency values r = log2(1 + s) where the tail may jump or
    /// bend; used as quadrature breakpoints.
    std::vector<double> rate_breakpoints() const {
        std::vector<double> out;
        if (std::holds_alternative<TabulatedSinr>(repr_))
            for (double db : std::get<TabulatedSinr>(repr_).zeta_db) out.push_back(std::log2(1.0 + netgeom::db_to_linear(db)));
        return out;
    }

private:
    explicit SinrDistribution(Repr r) : repr_(std::move(r)) {}
    Repr repr_;
};

/// Evaluates sinr_ccdf on a dB grid.
inline SinrDistribution tabulate_sinr_ccdf(const SinrQuery& q, const netgeom::Arena& arena, const RadioConfig& radio,
                                           const netgeom::AlignmentGainDist& gains, const std::vector<double>& zeta_db,
                                           const AnalyticPolicy& policy = {}) {
    std::vector<double> values;
    values.reserve(zeta_db.size());
    double prev = 1.0;
    for (double db : zeta_db) {
        SinrQuery qi = q;
        qi.zeta = netgeom::db_to_linear(db);
        // Truncation noise may leave tiny upward steps; keep the table monotone.
        prev = std::min(prev, sinr_ccdf(qi, arena, radio, gains, policy));
        values.push_back(prev);
    }
    return SinrDistribution::tabulated(zeta_db, values);
}

struct KpiPolicy {
    numerics::QuadPolicy quad{1e-12, 1e-9, 4000};
    double tail_cutoff = 1e-6;   // integration stops where the tail falls below this
    double max_rate = 64.0;      // bit/s/Hz search limit for the cutoff
};

namespace detail {

// Spectral efficiency beyond which P(log2(1+S) > r) < cutoff.
inline double rate_cutoff(const SinrDistribution& d, const KpiPolicy& p) {
    double r = 1.0;
    while (d.ccdf(std::exp2(r) - 1.0) >= p.tail_cutoff) {
        r *= 2.0;
        if (r > p.max_rate) return p.max_rate;
    }
    return r;
}

// integral over [u, inf) of P(log2(1+S) > r) dr, for u >= 0.
inline double tail_integral(const SinrDistribution& d, double u, const KpiPolicy& p) {
    if (std::holds_alternative<EmpiricalSinr>(d.repr())) {
        // Exact: mean of (log2(1+s) - u)^+.
        const auto& v = std::get<EmpiricalSinr>(d.repr()).sorted;
        mmwlab::detail::CompensatedSum s;
        for (double x : v) s.add(std::max(0.0, std::log2(1.0 + x) - u));
        return s.value() / static_cast<double>(v.size());
    }
    const double hi = rate_cutoff(d, p);
    if (u >= hi) return 0.0;
    auto f = [&](double r) { return d.ccdf(std::exp2(r) - 1.0); };
    return numerics::integrate(f, u, hi, p.quad, d.rate_breakpoints()).value;
}

} // namespace detail

/// E[log2(1 + SINR)] as the integral of P(log2(1+S) > r) over r >= 0.
inline double spectral_efficiency(const SinrDistribution& d, const KpiPolicy& policy = {}) {
    return detail::tail_integral(d, 0.0, policy);
}

/// Transmitter density times bandwidth times spectral efficiency, bit/s/m^2.
inline double area_traffic_capacity(double se, int n_tx, const netgeom::Arena& arena, double bandwidth_hz) {
    if (!(arena.area_m2() > 0.0)) throw DomainError("analytic", "arena area must be > 0");
    if (n_tx < 0) throw DomainError("analytic", "n_tx must be >= 0");
    return n_tx / arena.area_m2() * bandwidth_hz * se;
}

/// Lower beta-quantile of the rate bw log2(1 + SINR), found as the leftmost
/// minimizer of u + (1/(1-beta)) int_u^inf P(rate > r) dr.
inline double experienced_data_rate(const SinrDistribution& d, double bandwidth_hz, double beta = 0.05,
                                    const KpiPolicy& policy = {}) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("analytic", "beta must lie in (0, 1)");
    if (!(bandwidth_hz > 0.0)) throw DomainError("analytic", "bandwidth must be > 0");
    // Work in bit/s/Hz; the objective scales by bw.
    auto objective = [&](double u) { return u + detail::tail_integral(d, u, policy) / (1.0 - beta); };
    auto rate_tail = [&](double u) { return d.ccdf(std::exp2(u) - 1.0); };
    const double hi = std::max(1.0, detail::rate_cutoff(d, policy));
    const double x_tol = 1e-9 * hi;
    const auto gs = numerics::golden_section(objective, 0.0, hi, x_tol);

    // The objective is flat across the whole quantile interval; take its
    // left end, the first u with P(rate > u) <= 1 - beta.
    double lo = 0.0, up = gs.x;
    if (rate_tail(up) > 1.0 - beta) {
        // Golden section stopped just left of the flat part; widen.
        up = hi;
    }
    if (rate_tail(0.0) <= 1.0 - beta) return 0.0;
    for (int it = 0; it < 200 && up - lo > 1e-12 * std::max(1.0, up); ++it) {
        const double mid = 0.5 * (lo + up);
        (rate_tail(mid) <= 1.0 - beta ? up : lo) = mid;
    }
    const double f_left = objective(up);
    if (f_left > gs.value + 1e-6 * std::max(1.0, std::fabs(gs.value)))
        throw ConvergenceError("analytic", "quantile refinement disagrees with the golden-section minimum");
    return bandwidth_hz * up;
}

} // namespace mmwlab::analytic

#endif // MMWLAB_ANALYTIC_KPI_HPP
