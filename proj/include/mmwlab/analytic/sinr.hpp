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

#ifndef MMWLAB_ANALYTIC_SINR_HPP
#define MMWLAB_ANALYTIC_SINR_HPP

// Conditional SINR tail of the reference receiver.
//
// With the serving link in state t at horizontal distance r0 and alignment
// gain g0, the serving mean gain is v0 = g0 l_t(sqrt(r0^2 + eta)) and
//
//   SINR = v0 H0 / (I + 1/tau),   I = sum_i G_i l_{V_i}(R_i) H_i.
//
// Let A = zeta theta1_t / v0 and B = A / tau. For integer mu_t the serving
// tail gives
//
//   P(SINR > zeta) = sum_n P_n P(L >= n - mu_t + 1),  L ~ Poisson(theta2_t),
//   P_n = e^{-B} sum_{k <= n} B^{n-k} / (n-k)! J(k),
//   J(k) = E[(A I)^k e^{-A I}] / k! = sum over compositions of k of prod_i m(k_i),
//
// where m(j) = E[(A X)^j e^{-A X}] / j! for a single interferer X. Averaging
// over the link state v, the gain g and the fading gives
//
//   m(j) = sum_v p_v sum_g p_g (mu_v)_j / j! theta1_v^mu_v e^{-theta2_v} W_j(v, g),
//   W_j  = E_R[c^j (c + theta1_v)^{-(j+mu_v)} 1F1(j+mu_v; mu_v; theta1_v theta2_v / (c + theta1_v))],
//
// with c = A g l_v(R). The interference-distance functional Z_j used in the
// literature is W_j / (A g)^j.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mmwlab/channel/catalog.hpp"
#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/detail/summation.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/netgeom.hpp"
#include "mmwlab/numerics.hpp"
#include "mmwlab/specfun.hpp"

namespace mmwlab::analytic {

struct RadioConfig {
    double bandwidth_hz = 200e6;
    double tx_power_dbm = 23.0;
    double noise_figure_db = 7.0;
    double noise_density_dbm_hz = -174.0;

    void validate() const {
        if (!(bandwidth_hz > 0.0)) throw DomainError("analytic", "bandwidth must be > 0");
        if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_figure_db) || !std::isfinite(noise_density_dbm_hz))
            throw DomainError("analytic", "radio levels must be finite");
    }

    double noise_power_dbm() const { return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db; }

    /// Transmit power over receiver noise power (linear). Channel and antenna
    /// gains are applied on top of this ratio.
    double tau() const { return std::pow(10.0, (tx_power_dbm - noise_power_dbm()) / 10.0); }
};

struct SinrQuery {
    double zeta = 1.0;            // linear threshold
    double r0_m = 1.0;            // serving horizontal distance
    double g0 = 1.0;              // serving alignment gain
    channel::LinkState serving_state = channel::LinkState::LOS;
    double p_los = 0.5;           // LOS probability of each interfering link
    int n_tx = 12;
    channel::ScenarioPair scenario = channel::scenario(channel::Environment::Hallway, channel::UseCase::App);

    void validate() const {
        if (!(zeta >= 0.0) || std::isinf(zeta)) throw DomainError("analytic", "zeta must be finite and >= 0");
        if (!(r0_m >= 0.0)) throw DomainError("analytic", "serving distance must be >= 0");
        if (!(g0 > 0.0)) throw DomainError("analytic", "serving gain must be > 0");
        if (!(p_los >= 0.0 && p_los <= 1.0)) throw DomainError("analytic", "p_los must lie in [0, 1]");
        if (n_tx < 1) throw DomainError("analytic", "n_tx must be >= 1");
        scenario.los.path_loss.validate();
        scenario.nlos.path_loss.validate();
        scenario.los.fading.validate();
        scenario.nlos.fading.validate();
    }
};

/// Serving mean gain g0 l_t at the 3D serving distance.
inline double serving_mean_gain(const SinrQuery& q, const netgeom::Arena& arena) {
    return q.g0 * channel::path_gain(q.scenario[q.serving_state].path_loss, arena.distance_3d(q.r0_m));
}

/// P(v H > x) for a kappa-mu power H with integer mu and mean gain v.
inline double received_power_ccdf(const channel::KappaMuParams& fading, double vartheta, double x,
                                  const specfun::SeriesPolicy& policy = {}) {
    if (!(vartheta > 0.0)) throw DomainError("analytic", "mean gain must be > 0");
    if (std::isnan(x)) throw DomainError("analytic", "received_power_ccdf: x is NaN");
    return channel::kappa_mu_power_ccdf(fading, x / vartheta, policy);
}

// ---------------------------------------------------------------------------
// Interference-distance functional

/// Scaled functional s^k Z_k with
///   Z_k = E_R[l_v(R)^k (A g l_v(R) + theta1)^{-(k+mu)} 1F1(k+mu; mu; theta1 theta2 / (A g l_v(R) + theta1))],
/// R the 3D distance of a uniform interferer. `a_g` is A g, `scale` is s.
inline double z_term_numeric(int k, const channel::ScenarioParams& v, double a_g, const netgeom::Arena& arena,
                             const numerics::QuadPolicy& quad = {}, const specfun::SeriesPolicy& series = {},
                             double scale = 1.0) {
    if (k < 0) throw DomainError("analytic", "z_term: k must be >= 0");
    if (!(a_g >= 0.0)) throw DomainError("analytic", "z_term: A g must be >= 0");
    arena.validate();
    const int mu = v.fading.mu_int;
    const double t1 = v.fading.theta1_int(), t2 = v.fading.theta2_int();
    const auto& pl = v.path_loss;
    auto integrand = [&](double r) {
        const double pdf = netgeom::distance_pdf(arena, r);
        if (pdf == 0.0) return 0.0;
        const double l = channel::path_gain(pl, arena.distance_3d(r));
        const double c = a_g * l;
        const double d = c + t1;
        const double lead = (k == 0 ? 0.0 : k * std::log(scale * l)) - (k + mu) * std::log(d);
        const double f = t2 == 0.0 ? 1.0 : specfun::confluent_1f1(k + mu, mu, t1 * t2 / d, series);
        return pdf * std::exp(lead) * f;
    };
    numerics::QuadPolicy qp = quad;
    qp.abs_tol = std::min(qp.abs_tol, 1e-300);
    const double hi = arena.radius_m + arena.rx_offset_m;
    return numerics::integrate(integrand, 0.0, hi, qp, {netgeom::distance_pdf_kink(arena)}).value;
}

/// Disk-center closed form of s^k Z_k through the Humbert series.
/// Throws ValidityError when the receiver is off-center, when k <= 2/alpha,
/// or when the series argument at the nearest distance reaches -1.
inline double z_term_disk_closed_form(int k, const channel::ScenarioParams& v, double a_g,
                                      const netgeom::Arena& arena, const specfun::SeriesPolicy& series = {},
                                      double scale = 1.0) {
    arena.validate();
    if (arena.rx_offset_m != 0.0) throw ValidityError("analytic", "closed form requires a receiver at the center");
    const double alpha = v.path_loss.alpha;
    const double b = k - 2.0 / alpha;
    if (!(b > 0.0)) throw ValidityError("analytic", "closed form requires k > 2 / alpha");
    const int mu = v.fading.mu_int;
    const double t1 = v.fading.theta1_int(), t2 = v.fading.theta2_int();
    // l(y) = gamma_e y^-alpha with the reference distance folded into gamma_e.
    const double gamma_e = channel::linear_gain_gamma(v.path_loss) * std::pow(v.path_loss.d0_m, alpha);
    const double h = arena.height_gap_m();
    if (!(h > 0.0)) throw ValidityError("analytic", "closed form requires a positive height gap");
    const double y_lo = h, y_hi = std::sqrt(arena.radius_m * arena.radius_m + h * h);
    const double d_coef = a_g * gamma_e / t1;
    if (!(d_coef * std::pow(y_lo, -alpha) < 1.0))
        throw ValidityError("analytic", "closed form requires |series argument| < 1");

    // F(y) = (s gamma_e y^-alpha / theta1)^k y^2 Psi1(k+mu, b; mu, b+1; theta2, -D y^-alpha)
    auto antiderivative = [&](double y) {
        const double u = d_coef * std::pow(y, -alpha);
        const double lead = k * std::log(scale * gamma_e * std::pow(y, -alpha) / t1) + 2.0 * std::log(y);
        return std::exp(lead) * specfun::humbert_psi1(k + mu, b, mu, b + 1.0, t2, -u, series);
    };
    const double rho = arena.radius_m;
    const double pref = 2.0 / (rho * rho * std::pow(t1, mu) * (2.0 - k * alpha));
    return pref * (antiderivative(y_hi) - antiderivative(y_lo));
}

// ---------------------------------------------------------------------------
// Sums over compositions of k into n' non-negative parts

/// All compositions (k_1..k_n') of each k <= k_max, with their multinomial
/// coefficients. Size grows like C(k + n' - 1, n' - 1); guarded by `cap`.
class MultinomialTable {
public:
    MultinomialTable(int n_parts, int k_max, std::size_t cap = 2'000'000) : n_(n_parts), k_max_(k_max) {
        if (n_parts < 0 || k_max < 0) throw DomainError("analytic", "MultinomialTable: sizes must be >= 0");
        rows_.resize(static_cast<std::size_t>(k_max) + 1);
        coef_.resize(rows_.size());
        std::size_t total = 0;
        for (int k = 0; k <= k_max; ++k) {
            std::vector<int> cur(static_cast<std::size_t>(n_parts), 0);
            enumerate(k, 0, k, cur, cap, total);
        }
    }

    int parts() const { return n_; }
    int k_max() const { return k_max_; }
    const std::vector<std::vector<int>>& index_matrix(int k) const { return rows_.at(static_cast<std::size_t>(k)); }
    const std::vector<double>& coefficients(int k) const { return coef_.at(static_cast<std::size_t>(k)); }

    /// sum over compositions of prod_i m(k_i), with the cached per-part
    /// factors term[j] = j! m(j) recombined through the multinomial coefficient.
    double composition_sum(int k, const std::vector<double>& m) const {
        if (static_cast<int>(m.size()) <= k) throw DomainError("analytic", "composition_sum: m too short");
        std::vector<double> term(m.size());
        for (std::size_t j = 0; j < m.size(); ++j) term[j] = m[j] * std::tgamma(static_cast<double>(j) + 1.0);
        mmwlab::detail::CompensatedSum s;
        const auto& rows = index_matrix(k);
        const auto& co = coefficients(k);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double p = co[r];
            for (int kj : rows[r]) p *= term[static_cast<std::size_t>(kj)];
            s.add(p);
        }
        if (n_ == 0) return k == 0 ? 1.0 : 0.0;
        return s.value() / std::tgamma(k + 1.0);
    }

private:
    void enumerate(int k, int pos, int left, std::vector<int>& cur, std::size_t cap, std::size_t& total) {
        if (pos == n_) {
            if (left != 0) return;
            if (++total > cap)
                throw CapacityError("analytic", "composition count exceeds the cap of " + std::to_string(cap) +
                                                    "; use the partition route");
            rows_[static_cast<std::size_t>(k)].push_back(cur);
            double lc = std::lgamma(k + 1.0);
            for (int v : cur) lc -= std::lgamma(v + 1.0);
            coef_[static_cast<std::size_t>(k)].push_back(std::round(std::exp(lc)));
            return;
        }
        if (pos == n_ - 1) {
            cur[static_cast<std::size_t>(pos)] = left;
            enumerate(k, pos + 1, 0, cur, cap, total);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[static_cast<std::size_t>(pos)] = v;
            enumerate(k, pos + 1, left - v, cur, cap, total);
        }
        cur[static_cast<std::size_t>(pos)] = 0;
    }

    int n_;
    int k_max_;
    std::vector<std::vector<std::vector<int>>> rows_;
    std::vector<std::vector<double>> coef_;
};

/// J(k) for k = 0..k_max over n' exchangeable interferers: the composition
/// sum grouped by partitions of k into at most n' positive parts. A
/// partition with p distinct-position parts and value multiplicities c_v
/// occurs n'! / ((n' - p)! prod c_v!) times.
inline std::vector<double> partition_moments(int n_parts, const std::vector<double>& m, int k_max,
                                             std::size_t cap = 5'000'000) {
    if (n_parts < 0 || k_max < 0) throw DomainError("analytic", "partition_moments: sizes must be >= 0");
    if (static_cast<int>(m.size()) <= k_max) throw DomainError("analytic", "partition_moments: m too short");
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
    if (n_parts == 0) {
        out[0] = 1.0;
        return out;
    }
    const double m0 = m[0];
    const double lg_n = std::lgamma(n_parts + 1.0);
    std::size_t visited = 0;
    for (int k = 0; k <= k_max; ++k) {
        mmwlab::detail::CompensatedSum s;
        // Parts in non-increasing order; track multiplicities for the weight.
        std::vector<int> parts;
        std::function<void(int, int, double)> rec = [&](int left, int max_part, double prod) {
            if (left == 0) {
                if (++visited > cap)
                    throw CapacityError("analytic", "partition count exceeds the cap of " + std::to_string(cap));
                const int p = static_cast<int>(parts.size());
                double lw = lg_n - std::lgamma(n_parts - p + 1.0);
                for (std::size_t i = 0; i < parts.size();) {
                    std::size_t j = i;
                    while (j < parts.size() && parts[j] == parts[i]) ++j;
                    lw -= std::lgamma(static_cast<double>(j - i) + 1.0);
                    i = j;
                }
                const double zeros = n_parts - p == 0 ? 1.0 : std::pow(m0, n_parts - p);
                s.add(std::exp(lw) * prod * zeros);
                return;
            }
            if (static_cast<int>(parts.size()) == n_parts) return;
            for (int v = std::min(left, max_part); v >= 1; --v) {
                parts.push_back(v);
                rec(left - v, v, prod * m[static_cast<std::size_t>(v)]);
                parts.pop_back();
            }
        };
        rec(k, k, 1.0);
        out[static_cast<std::size_t>(k)] = s.value();
    }
    return out;
}

// ---------------------------------------------------------------------------
// SINR tail

struct AnalyticPolicy {
    specfun::SeriesPolicy series{};
    numerics::QuadPolicy quad{};
    double poisson_tail = 1e-10;       // truncation of the serving Poisson mixture
    bool prefer_closed_form = true;    // use the Humbert form where it is valid
    std::size_t partition_cap = 5'000'000;
};

namespace detail {

// P(L >= m) for L ~ Poisson(lambda).
inline double poisson_upper_tail(int m, double lambda) {
    if (m <= 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    const double ll = std::log(lambda);
    mmwlab::detail::CompensatedSum s;
    if (m > lambda) {
        for (int l = m;; ++l) {
            const double t = std::exp(-lambda + l * ll - std::lgamma(l + 1.0));
            s.add(t);
            if (t <= 1e-18 * s.value() || t == 0.0) break;
        }
        return std::min(1.0, s.value());
    }
    for (int l = 0; l < m; ++l) s.add(std::exp(-lambda + l * ll - std::lgamma(l + 1.0)));
    return std::max(0.0, 1.0 - s.value());
}

} // namespace detail

/// Single-interferer factors m(0..k_max) at threshold zeta.
inline std::vector<double> interferer_factors(const SinrQuery& q, const netgeom::Arena& arena,
                                              const netgeom::AlignmentGainDist& gains, int k_max,
                                              const AnalyticPolicy& policy = {}) {
    const double v0 = serving_mean_gain(q, arena);
    const double a = q.zeta * q.scenario[q.serving_state].fading.theta1_int() / v0;
    std::vector<double> m(static_cast<std::size_t>(k_max) + 1, 0.0);
    const std::pair<channel::LinkState, double> states[2] = {{channel::LinkState::LOS, q.p_los},
                                                              {channel::LinkState::NLOS, 1.0 - q.p_los}};
    for (const auto& [state, p_v] : states) {
        if (p_v == 0.0) continue;
        const auto& v = q.scenario[state];
        const int mu = v.fading.mu_int;
        const double t1 = v.fading.theta1_int(), t2 = v.fading.theta2_int();
        const double log_front = mu * std::log(t1) - t2;
        for (const auto& [g, p_g] : gains.compact()) {
            const double w = p_v * p_g;
            const double a_g = a * g;
            if (a_g == 0.0) {  // no interference from this branch
                m[0] += w;
                continue;
            }
            for (int j = 0; j <= k_max; ++j) {
                double wj = 0.0;
                bool done = false;
                if (policy.prefer_closed_form && arena.rx_offset_m == 0.0 && j - 2.0 / v.path_loss.alpha > 0.0 &&
                    a_g * channel::linear_gain_gamma(v.path_loss) *
                            std::pow(arena.height_gap_m() / v.path_loss.d0_m, -v.path_loss.alpha) / t1 <
                        1.0) {
                    try {
                        wj = z_term_disk_closed_form(j, v, a_g, arena, policy.series, a_g);
                        done = wj >= 0.0 && std::isfinite(wj);
                    } catch (const ValidityError&) {
                    } catch (const SeriesError&) {
                    }
                }
                if (!done) wj = z_term_numeric(j, v, a_g, arena, policy.quad, policy.series, a_g);
                const double coef = std::exp(specfun::log_pochhammer(mu, static_cast<unsigned>(j)) -
                                             std::lgamma(j + 1.0) + log_front);
                m[static_cast<std::size_t>(j)] += w * coef * wj;
            }
        }
    }
    return m;
}

/// Number of Poisson-mixture terms needed at this serving state.
inline int serving_terms(const SinrQuery& q, const AnalyticPolicy& policy) {
    const auto& f = q.scenario[q.serving_state].fading;
    const double t2 = f.theta2_int();
    int n = 0;
    while (detail::poisson_upper_tail(n + 1 - f.mu_int + 1, t2) >= policy.poisson_tail) {
        if (++n > policy.series.max_terms)
            throw SeriesError("analytic", "serving Poisson mixture did not truncate");
    }
    return n;
}

/// P(SINR > zeta) for the reference receiver.
inline double sinr_ccdf(const SinrQuery& q, const netgeom::Arena& arena, const RadioConfig& radio,
                        const netgeom::AlignmentGainDist& gains, const AnalyticPolicy& policy = {}) {
    q.validate();
    arena.validate();
    radio.validate();
    if (q.zeta == 0.0) return 1.0;
    const auto& serving = q.scenario[q.serving_state].fading;
    const int mu_t = serving.mu_int;
    const double t2t = serving.theta2_int();
    const double v0 = serving_mean_gain(q, arena);
    const double a = q.zeta * serving.theta1_int() / v0;
    const double b = a / radio.tau();

    const int n_max = serving_terms(q, policy);
    const int n_int = q.n_tx - 1;
    const auto levels = gains.compact();
    const bool silent = std::all_of(levels.begin(), levels.end(), [](const auto& gp) { return gp.first == 0.0; });
    std::vector<double> j_k;
    if (n_int == 0 || silent) {
        j_k.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
        j_k[0] = 1.0;
    } else {
        const auto m = interferer_factors(q, arena, gains, n_max, policy);
        j_k = partition_moments(n_int, m, n_max, policy.partition_cap);
    }

    mmwlab::detail::CompensatedSum total;
    const double log_b = std::log(b);
    for (int n = 0; n <= n_max; ++n) {
        mmwlab::detail::CompensatedSum pn;
        for (int k = 0; k <= n; ++k) {
            const int d = n - k;
            const double w = d == 0 ? 1.0 : std::exp(d * log_b - std::lgamma(d + 1.0));
            pn.add(w * j_k[static_cast<std::size_t>(k)]);
        }
        total.add(std::exp(-b) * pn.value() * detail::poisson_upper_tail(n - mu_t + 1, t2t));
    }
    return std::clamp(total.value(), 0.0, 1.0);
}

} // namespace mmwlab::analytic

#endif // MMWLAB_ANALYTIC_SINR_HPP
