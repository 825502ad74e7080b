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

#ifndef MMWLAB_CHANNEL_KAPPA_MU_HPP
#define MMWLAB_CHANNEL_KAPPA_MU_HPP

// Power-law path loss and kappa-mu small-scale fading.
//
// Fading is described in the power domain: H = R^2 with E[H] = omega. With
// theta1 = mu (1 + kappa) / omega and theta2 = mu kappa the power density is
//
//   f(h) = theta1^((mu+1)/2) (h/theta2)^((mu-1)/2) exp(-theta2 - theta1 h)
//          I_{mu-1}(2 sqrt(theta1 theta2 h)),
//
// and for integer mu the tail is a Poisson(theta2) mixture of Erlang tails:
//
//   P(H > x) = sum_l Pois(l; theta2) exp(-theta1 x) sum_{n < l+mu} (theta1 x)^n / n!.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mmwlab/detail/summation.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/specfun.hpp"

namespace mmwlab::channel {

enum class LinkState { LOS, NLOS };

inline const char* to_string(LinkState s) { return s == LinkState::LOS ? "LOS" : "NLOS"; }

struct PathLossModel {
    double p0_db = 0.0;   // path loss at the reference distance
    double alpha = 2.0;   // path loss exponent
    double d0_m = 1.0;    // reference distance

    void validate() const {
        if (!(d0_m > 0.0)) throw DomainError("channel", "path loss reference distance must be > 0");
        if (!(p0_db > 0.0)) throw DomainError("channel", "path loss P0 must be > 0 dB");
        if (!(alpha > 0.0)) throw DomainError("channel", "path loss exponent must be > 0");
    }
};

/// P0 + 10 alpha log10(d / d0), in dB.
inline double path_loss_db(const PathLossModel& m, double d) {
    if (!(d > 0.0)) throw DomainError("channel", "path_loss_db requires d > 0");
    return m.p0_db + 10.0 * m.alpha * std::log10(d / m.d0_m);
}

/// Linear gain at the reference distance, 10^(-P0/10).
inline double linear_gain_gamma(const PathLossModel& m) { return std::pow(10.0, -m.p0_db / 10.0); }

/// Linear channel gain gamma (d / d0)^(-alpha); decays with distance.
inline double path_gain(const PathLossModel& m, double d) {
    if (!(d > 0.0)) throw DomainError("channel", "path_gain requires d > 0");
    return linear_gain_gamma(m) * std::pow(d / m.d0_m, -m.alpha);
}

struct KappaMuParams {
    double kappa = 0.0;
    double mu = 1.0;
    double omega = 1.0;
    int mu_int = 1;   // round-half-up(mu), at least 1

    static int round_mu(double mu) { return std::max(1, static_cast<int>(std::floor(mu + 0.5))); }

    static KappaMuParams make(double kappa, double mu, double omega) {
        KappaMuParams p{kappa, mu, omega, round_mu(mu)};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("channel", "kappa must be >= 0");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("channel", "mu must be > 0");
        if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("channel", "omega must be > 0");
        if (mu_int != round_mu(mu))
            throw DomainError("channel", "mu_int must equal round-half-up(mu), at least 1");
    }

    /// Same law with mu replaced by its integer companion.
    KappaMuParams rounded() const { return make(kappa, static_cast<double>(mu_int), omega); }

    double theta1() const { return mu * (1.0 + kappa) / omega; }
    double theta2() const { return mu * kappa; }
    double theta1_int() const { return mu_int * (1.0 + kappa) / omega; }
    double theta2_int() const { return mu_int * kappa; }
};

/// Density of the fading power H at h >= 0 (uses the real-valued mu).
inline double kappa_mu_power_pdf(const KappaMuParams& p, double h, const specfun::SeriesPolicy& policy = {}) {
    if (!(h >= 0.0)) throw DomainError("channel", "kappa_mu_power_pdf requires h >= 0");
    const double t1 = p.theta1(), t2 = p.theta2(), mu = p.mu;
    if (h == 0.0) {
        if (mu > 1.0) return 0.0;
        if (mu < 1.0) return std::numeric_limits<double>::infinity();
        return t1 * std::exp(-t2);
    }
    if (t2 == 0.0)
        return std::exp(mu * std::log(t1) + (mu - 1.0) * std::log(h) - t1 * h - std::lgamma(mu));
    const double z = 2.0 * std::sqrt(t1 * t2 * h);
    const double log_pref = 0.5 * (mu + 1.0) * std::log(t1) + 0.5 * (mu - 1.0) * std::log(h / t2) - t2 - t1 * h;
    // log I_nu(z) < z + 1 for z > 1: skip the Bessel series deep in the tail.
    if (z > 1.0 && log_pref + z + 1.0 < -800.0) return 0.0;
    return std::exp(log_pref + specfun::log_bessel_i(mu - 1.0, z, policy));
}

/// Density of the envelope R = sqrt(H) at r >= 0.
inline double kappa_mu_envelope_pdf(const KappaMuParams& p, double r, const specfun::SeriesPolicy& policy = {}) {
    if (!(r >= 0.0)) throw DomainError("channel", "kappa_mu_envelope_pdf requires r >= 0");
    if (r == 0.0) {
        // 2 r f_H(r^2) behaves like r^(2 mu - 1) near the origin.
        if (p.mu > 0.5) return 0.0;
        if (p.mu < 0.5) return std::numeric_limits<double>::infinity();
        return 2.0 * std::sqrt(p.theta1() / M_PI) * std::exp(-p.theta2());
    }
    return 2.0 * r * kappa_mu_power_pdf(p, r * r, policy);
}

/// log of the envelope density; finite wherever the density is positive.
inline double kappa_mu_envelope_log_pdf(const KappaMuParams& p, double r, const specfun::SeriesPolicy& policy = {}) {
    if (!(r > 0.0)) throw DomainError("channel", "kappa_mu_envelope_log_pdf requires r > 0");
    const double h = r * r;
    const double t1 = p.theta1(), t2 = p.theta2(), mu = p.mu;
    double log_f;
    if (t2 == 0.0) {
        log_f = mu * std::log(t1) + (mu - 1.0) * std::log(h) - t1 * h - std::lgamma(mu);
    } else {
        const double z = 2.0 * std::sqrt(t1 * t2 * h);
        log_f = 0.5 * (mu + 1.0) * std::log(t1) + 0.5 * (mu - 1.0) * std::log(h / t2) - t2 - t1 * h +
                specfun::log_bessel_i(mu - 1.0, z, policy);
    }
    return std::log(2.0 * r) + log_f;
}

namespace detail {

// P(theta1 H / scale > ...) core: sum_l Pois(l; t2) e^{-y} sum_{n < l + m} y^n / n!.
inline double erlang_mixture_tail(int m, double t2, double y, const specfun::SeriesPolicy& policy) {
    if (y <= 0.0) return 1.0;
    if (std::isinf(y)) return 0.0;
    const double log_y = std::log(y);
    // Erlang tail e^{-y} sum_{n < l+m} y^n/n!, grown one term per l.
    mmwlab::detail::CompensatedSum erlang;
    for (int n = 0; n < m; ++n) erlang.add(std::exp(-y + n * log_y - std::lgamma(n + 1.0)));
    if (t2 == 0.0) return std::min(1.0, erlang.value());

    mmwlab::detail::CompensatedSum total;
    const double log_t2 = std::log(t2);
    for (int l = 0; l < policy.max_terms; ++l) {
        const double w = std::exp(-t2 + l * log_t2 - std::lgamma(l + 1.0));
        total.add(w * std::min(1.0, erlang.value()));
        const int n_next = l + m;
        erlang.add(std::exp(-y + n_next * log_y - std::lgamma(n_next + 1.0)));
        // Remaining Poisson mass is below w_{l+1} / (1 - t2/(l+2)) once l+2 > t2.
        if (l + 2.0 > 2.0 * t2) {
            const double w_next = w * t2 / (l + 1.0);
            const double bound = w_next / (1.0 - t2 / (l + 2.0));
            if (bound <= policy.rel_tol * total.value() || w_next == 0.0)
                return std::clamp(total.value(), 0.0, 1.0);
        }
    }
    throw SeriesError("channel", "kappa-mu tail: Poisson series did not converge within " +
                                     std::to_string(policy.max_terms) + " terms");
}

} // namespace detail

/// P(H > x) for the integer-mu law (uses mu_int).
inline double kappa_mu_power_ccdf(const KappaMuParams& p, double x, const specfun::SeriesPolicy& policy = {}) {
    policy.validate();
    if (p.mu_int < 1) throw DomainError("channel", "kappa_mu_power_ccdf requires mu_int >= 1");
    if (std::isnan(x)) throw DomainError("channel", "kappa_mu_power_ccdf: x is NaN");
    if (x <= 0.0) return 1.0;
    return detail::erlang_mixture_tail(p.mu_int, p.theta2_int(), p.theta1_int() * x, policy);
}

/// Draws H for the integer-mu law: (1 / (2 theta1)) times a sum of 2 mu_int
/// squared unit Gaussians, the first shifted by sqrt(2 theta2).
class KappaMuSampler {
public:
    explicit KappaMuSampler(const KappaMuParams& p)
        : two_mu_(2 * p.mu_int), shift_(std::sqrt(2.0 * p.theta2_int())), scale_(0.5 / p.theta1_int()) {
        if (p.mu_int < 1) throw DomainError("channel", "sampler requires mu_int >= 1");
    }

    template <class Engine>
    double operator()(Engine& eng) {
        double s = 0.0;
        for (int i = 0; i < two_mu_; ++i) {
            double z = normal_(eng);
            if (i == 0) z += shift_;
            s += z * z;
        }
        return scale_ * s;
    }

private:
    int two_mu_;
    double shift_;
    double scale_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

template <class Engine>
double sample_kappa_mu_power(const KappaMuParams& p, Engine& eng) {
    KappaMuSampler s(p);
    return s(eng);
}

} // namespace mmwlab::channel

#endif // MMWLAB_CHANNEL_KAPPA_MU_HPP
