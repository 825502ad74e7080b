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

#ifndef MMWLAB_SPECFUN_HPP
#define MMWLAB_SPECFUN_HPP

// Series-based special functions used by the fading and SINR engines.
//
// Every series runs through one driver: terms are accumulated with
// compensated summation and the series stops once three consecutive terms
// are below rel_tol relative to the running sum (for slowly decaying terms,
// the geometric tail estimate |t| / (1 - ratio) must be below it instead). Hitting max_terms, a
// non-finite term, or losing more digits to cancellation than rel_tol
// allows raises SeriesError; nothing is truncated silently.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmwlab/detail/summation.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::specfun {

struct SeriesPolicy {
    double rel_tol = 1e-10;
    int max_terms = 10000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw DomainError("specfun", "SeriesPolicy.rel_tol must lie in (0, 1)");
        if (max_terms < 1)
            throw DomainError("specfun", "SeriesPolicy.max_terms must be >= 1");
    }
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
// Allowed growth of rounding error relative to the largest term.
inline constexpr double kCancellationSlack = 16.0;

inline bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

inline void check_cancellation(const char* what, double max_abs, double value,
                               const SeriesPolicy& policy) {
    if (max_abs > 0.0 && max_abs * kCancellationSlack * kEps > policy.rel_tol * std::fabs(value))
        throw SeriesError("specfun", std::string(what) +
                                         ": cancellation exceeds the requested tolerance");
}

// Sums terms produced by `next()` (term 0 first) under the stopping rule
// described at the top of this header.
template <class Next>
double sum_series(const char* what, const SeriesPolicy& policy, Next&& next) {
    mmwlab::detail::CompensatedSum acc;
    double max_abs = 0.0;
    double prev_abs = 0.0;
    int small_run = 0;
    for (int k = 0; k < policy.max_terms; ++k) {
        const double t = next();
        if (!std::isfinite(t))
            throw SeriesError("specfun", std::string(what) + ": non-finite term");
        acc.add(t);
        max_abs = std::max(max_abs, std::fabs(t));
        const double s = acc.value();
        // Slowly decaying terms leave a tail of about |t| / (1 - ratio);
        // the bound below keeps the stopping rule honest for them.
        const double ratio = prev_abs > 0.0 ? std::fabs(t) / prev_abs : 0.0;
        const double tail = ratio < 1.0 ? std::fabs(t) / (1.0 - ratio) : HUGE_VAL;
        prev_abs = std::fabs(t);
        if (t == 0.0 || tail <= policy.rel_tol * std::fabs(s)) {
            if (++small_run >= 3) {
                check_cancellation(what, max_abs, s, policy);
                return s;
            }
        } else {
            small_run = 0;
        }
    }
    throw SeriesError("specfun", std::string(what) + ": no convergence within " +
                                     std::to_string(policy.max_terms) + " terms");
}

inline double hyp2f1_direct(double a, double b, double c, double z, const SeriesPolicy& policy) {
    double term = 1.0;
    int k = 0;
    return sum_series("gauss_2f1", policy, [&] {
        const double out = term;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        ++k;
        return out;
    });
}

} // namespace detail

/// Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1.
/// Uses log-gamma differences for n > 20 when a > 0.
inline double pochhammer(double a, unsigned n) {
    if (n == 0) return 1.0;
    if (n > 20 && a > 0.0) return std::exp(std::lgamma(a + n) - std::lgamma(a));
    double p = 1.0;
    for (unsigned i = 0; i < n; ++i) p *= a + i;
    return p;
}

/// log((a)_n) for a > 0.
inline double log_pochhammer(double a, unsigned n) {
    if (!(a > 0.0)) throw DomainError("specfun", "log_pochhammer requires a > 0");
    if (n == 0) return 0.0;
    if (n <= 20) {
        double p = 1.0;
        for (unsigned i = 0; i < n; ++i) p *= a + i;
        return std::log(p);
    }
    return std::lgamma(a + n) - std::lgamma(a);
}

/// Natural log of the modified Bessel function of the first kind I_order(x).
///
/// Accepts order > -1 (the fading density needs I_{mu-1} with mu < 1). The
/// power series is summed outward from its largest term so that neither
/// overflow nor underflow occurs for large x.
inline double log_bessel_i(double order, double x, const SeriesPolicy& policy = {}) {
    policy.validate();
    if (!std::isfinite(order) || !std::isfinite(x))
        throw DomainError("specfun", "bessel_i: arguments must be finite");
    if (!(order > -1.0)) throw DomainError("specfun", "bessel_i: order must exceed -1");
    if (x < 0.0) throw DomainError("specfun", "bessel_i: x must be non-negative");
    if (x == 0.0) {
        if (order == 0.0) return 0.0;
        return order > 0.0 ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    }
    if (x > 2000.0 && x > 50.0 * order * order) {
        // Hankel expansion e^x / sqrt(2 pi x) sum_k (-1)^k a_k(order) / x^k,
        // summed while its terms still decrease.
        const double m4 = 4.0 * order * order;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 30; ++k) {
            const double next = -term * (m4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
            if (std::fabs(next) >= std::fabs(term)) break;
            term = next;
            sum += term;
            if (std::fabs(term) < detail::kEps * std::fabs(sum)) break;
        }
        return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(sum);
    }
    const double q = 0.25 * x * x;
    const double root = 0.5 * (std::sqrt(order * order + x * x) - order);
    const double kmax = std::max(0.0, std::floor(root));
    const double log_peak = (2.0 * kmax + order) * std::log(0.5 * x) -
                            std::lgamma(kmax + 1.0) - std::lgamma(kmax + order + 1.0);

    // Forward from the peak (term ratio q / ((k+1)(k+1+order))).
    double k = kmax;
    double u = 1.0;
    const double forward = detail::sum_series("bessel_i", policy, [&] {
        const double out = u;
        u *= q / ((k + 1.0) * (k + 1.0 + order));
        k += 1.0;
        return out;
    });
    // Backward below the peak: finite, and every term is below the peak term.
    mmwlab::detail::CompensatedSum back;
    double v = 1.0;
    for (double j = kmax; j > 0.0; j -= 1.0) {
        v *= j * (j + order) / q;
        back.add(v);
        if (v <= 0.25 * policy.rel_tol * detail::kEps) break;
    }
    return log_peak + std::log(forward + back.value());
}

/// Modified Bessel function of the first kind I_order(x), order > -1, x >= 0.
inline double bessel_i(double order, double x, const SeriesPolicy& policy = {}) {
    return std::exp(log_bessel_i(order, x, policy));
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
///
/// Power series for x < a + 1, Lentz continued fraction otherwise.
inline double gamma_upper_reg(double a, double x) {
    if (!(a > 0.0)) throw DomainError("specfun", "gamma_upper_reg requires a > 0");
    if (!(x >= 0.0)) throw DomainError("specfun", "gamma_upper_reg requires x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    constexpr int kMaxIter = 100000;
    constexpr double kTol = 1e-16;
    const double log_pref = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < kMaxIter; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kTol) return 1.0 - sum * std::exp(log_pref);
        }
        throw SeriesError("specfun", "gamma_upper_reg: series did not converge");
    }
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kTol) return std::exp(log_pref) * h;
    }
    throw SeriesError("specfun", "gamma_upper_reg: continued fraction did not converge");
}

/// Kummer's confluent hypergeometric function 1F1(a; b; x), direct series.
inline double confluent_1f1(double a, double b, double x, const SeriesPolicy& policy = {}) {
    policy.validate();
    if (detail::is_nonpositive_integer(b))
        throw DomainError("specfun", "confluent_1f1: b must not be a non-positive integer");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x))
        throw DomainError("specfun", "confluent_1f1: arguments must be finite");
    if (x == 0.0) return 1.0;
    double term = 1.0;
    int k = 0;
    return detail::sum_series("confluent_1f1", policy, [&] {
        const double out = term;
        term *= (a + k) / ((b + k) * (k + 1.0)) * x;
        ++k;
        return out;
    });
}

/// Gauss hypergeometric function 2F1(a, b; c; x) for |x| < 1.
///
/// For x < 0 the series is evaluated after a Pfaff transformation to
/// w = x / (x - 1) in (0, 1/2) whenever one of the two transformed forms
/// has non-negative terms; otherwise the direct alternating series is used
/// and any loss of precision is reported.
inline double gauss_2f1(double a, double b, double c, double x, const SeriesPolicy& policy = {}) {
    policy.validate();
    if (!(std::fabs(x) < 1.0))
        throw DomainError("specfun", "gauss_2f1: |x| must be < 1 (no analytic continuation)");
    if (detail::is_nonpositive_integer(c))
        throw DomainError("specfun", "gauss_2f1: c must not be a non-positive integer");
    if (x == 0.0) return 1.0;
    if (x > 0.0) return detail::hyp2f1_direct(a, b, c, x, policy);

    const double w = x / (x - 1.0);
    const auto nonneg = [c](double p, double q) { return p >= 0.0 && q >= 0.0 && c > 0.0; };
    if (nonneg(a, c - b))
        return std::pow(1.0 - x, -a) * detail::hyp2f1_direct(a, c - b, c, w, policy);
    if (nonneg(c - a, b))
        return std::pow(1.0 - x, -b) * detail::hyp2f1_direct(c - a, b, c, w, policy);
    return detail::hyp2f1_direct(a, b, c, x, policy);
}

/// Humbert series Psi1(a, b; c, c'; x, y)
///   = sum_{j,l} (a)_{j+l} (b)_l x^j y^l / ((c)_j (c')_l j! l!),
/// evaluated as an outer sum over j of (a)_j x^j / ((c)_j j!) times the
/// inner 2F1(a + j, b; c'; y). Supported region: x >= 0, -1 < y <= 0.
inline double humbert_psi1(double a, double b, double c, double c_prime, double x, double y,
                           const SeriesPolicy& policy = {}) {
    policy.validate();
    if (detail::is_nonpositive_integer(c) || detail::is_nonpositive_integer(c_prime))
        throw DomainError("specfun", "humbert_psi1: c and c' must not be non-positive integers");
    if (!(x >= 0.0)) throw DomainError("specfun", "humbert_psi1: x must be >= 0");
    if (!(y <= 0.0 && y > -1.0)) throw DomainError("specfun", "humbert_psi1: y must lie in (-1, 0]");
    if (x == 0.0) return gauss_2f1(a, b, c_prime, y, policy);
    if (y == 0.0) return confluent_1f1(a, c, x, policy);
    double coef = 1.0;
    int j = 0;
    return detail::sum_series("humbert_psi1", policy, [&] {
        const double out = coef * gauss_2f1(a + j, b, c_prime, y, policy);
        coef *= (a + j) / ((c + j) * (j + 1.0)) * x;
        ++j;
        return out;
    });
}

/// Generalized Marcum Q function Q_m(alpha, beta), m > 0.
///
/// Poisson(alpha^2/2) mixture of regularized upper incomplete gamma tails
/// Q(m + l, beta^2/2), summed outward from the Poisson mode.
inline double marcum_q(double m, double alpha, double beta) {
    if (!(m > 0.0)) throw DomainError("specfun", "marcum_q requires m > 0");
    if (!(alpha >= 0.0) || !(beta >= 0.0))
        throw DomainError("specfun", "marcum_q requires alpha, beta >= 0");
    if (beta == 0.0) return 1.0;
    const double lambda = 0.5 * alpha * alpha;
    const double y = 0.5 * beta * beta;
    if (lambda == 0.0) return gamma_upper_reg(m, y);

    const double mode = std::floor(lambda);
    const double log_w_mode = -lambda + mode * std::log(lambda) - std::lgamma(mode + 1.0);
    const double w_mode = std::exp(log_w_mode);
    SeriesPolicy policy{1e-14, 100000};

    double l = mode;
    double w = w_mode;
    const double upper = detail::sum_series("marcum_q", policy, [&] {
        const double out = w * gamma_upper_reg(m + l, y);
        l += 1.0;
        w *= lambda / l;
        return out;
    });
    mmwlab::detail::CompensatedSum lower;
    w = w_mode;
    for (double j = mode; j > 0.0; j -= 1.0) {
        w *= j / lambda;
        const double t = w * gamma_upper_reg(m + j - 1.0, y);
        lower.add(t);
        if (t <= policy.rel_tol * detail::kEps * (upper + lower.value())) break;
    }
    return std::clamp(upper + lower.value(), 0.0, 1.0);
}

} // namespace mmwlab::specfun

#endif // MMWLAB_SPECFUN_HPP
