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

#ifndef MMWLAB_CHANNEL_FITTING_HPP
#define MMWLAB_CHANNEL_FITTING_HPP

// Estimation from measurement traces: path-loss regression, large-scale
// fading removal, kappa-mu least-squares fit, AICc model ranking and a
// reader for delimited trace files.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/numerics.hpp"

namespace mmwlab::channel {

struct TracePoint {
    double distance_m = 0.0;
    double power_db = 0.0;
};

/// Ordinary least squares of corrected path loss (eirp + rx_gain - P_rx)
/// against 10 log10(d / d0).
inline PathLossModel fit_path_loss(const std::vector<TracePoint>& trace, double eirp_db, double rx_gain_db,
                                   double d0_m = 1.0) {
    if (trace.size() < 2) throw DomainError("channel", "fit_path_loss needs at least two samples");
    if (!(d0_m > 0.0)) throw DomainError("channel", "fit_path_loss: d0 must be > 0");
    const double n = static_cast<double>(trace.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> xs, ys;
    xs.reserve(trace.size());
    ys.reserve(trace.size());
    for (const auto& p : trace) {
        if (!(p.distance_m > 0.0)) throw DomainError("channel", "fit_path_loss: distances must be > 0");
        xs.push_back(10.0 * std::log10(p.distance_m / d0_m));
        ys.push_back(eirp_db + rx_gain_db - p.power_db);
        mx += xs.back();
        my += ys.back();
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0))
        throw DomainError("channel", "fit_path_loss: degenerate regressor (all distances equal)");
    const double alpha = sxy / sxx;
    PathLossModel m{my - alpha * mx, alpha, d0_m};
    m.validate();
    return m;
}

/// Centered moving average (window samples, truncated at the edges).
inline std::vector<double> moving_average(const std::vector<double>& v, int window = 100) {
    if (window < 1) throw DomainError("channel", "moving_average window must be >= 1");
    const std::size_t n = v.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
    std::vector<double> out(n);
    const std::size_t left = static_cast<std::size_t>(window) / 2;
    const std::size_t right = static_cast<std::size_t>(window) - 1 - left;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

/// Small-scale envelope amplitudes: received power (dB) normalized by its
/// local mean over a moving window of linear power, then square-rooted.
inline std::vector<double> small_scale_envelope(const std::vector<double>& power_db, int window = 100) {
    std::vector<double> lin(power_db.size());
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = std::pow(10.0, power_db[i] / 10.0);
    const auto mean = moving_average(lin, window);
    std::vector<double> env(lin.size());
    for (std::size_t i = 0; i < lin.size(); ++i) env[i] = std::sqrt(lin[i] / mean[i]);
    return env;
}

struct Histogram {
    std::vector<double> centers;
    std::vector<double> density;  // normalized so that sum(density) * width = 1
    double width = 0.0;
};

/// Density histogram with Freedman-Diaconis bin width 2 IQR n^(-1/3).
inline Histogram freedman_diaconis_histogram(std::vector<double> x) {
    if (x.size() < 2) throw DomainError("channel", "histogram needs at least two samples");
    std::sort(x.begin(), x.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(x.size() - 1);
        const std::size_t i = static_cast<std::size_t>(std::floor(pos));
        const double f = pos - static_cast<double>(i);
        return i + 1 < x.size() ? x[i] + f * (x[i + 1] - x[i]) : x[i];
    };
    const double lo = x.front(), hi = x.back();
    double width = 2.0 * (quantile(0.75) - quantile(0.25)) * std::cbrt(1.0 / static_cast<double>(x.size()));
    if (!(width > 0.0)) width = (hi - lo) / std::max(1.0, std::sqrt(static_cast<double>(x.size())));
    if (!(width > 0.0)) throw DomainError("channel", "histogram of constant data");
    const std::size_t bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
    Histogram h;
    h.width = width;
    h.centers.resize(bins);
    h.density.assign(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) h.centers[b] = lo + (b + 0.5) * width;
    for (double v : x) {
        std::size_t b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1;
        h.density[b] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(x.size()) * width);
    for (double& d : h.density) d *= norm;
    return h;
}

struct KappaMuFit {
    KappaMuParams params;
    double objective = 0.0;  // residual sum of squares against the histogram
    int evaluations = 0;
};

namespace detail {

inline KappaMuParams from_log(const std::vector<double>& z) {
    auto clampexp = [](double v, double lo, double hi) { return std::exp(std::clamp(v, lo, hi)); };
    return KappaMuParams::make(clampexp(z[0], -30.0, 8.0), clampexp(z[1], -5.0, 4.0), clampexp(z[2], -20.0, 20.0));
}

} // namespace detail

/// Nonlinear least-squares fit of the kappa-mu envelope density to a
/// Freedman-Diaconis histogram of the samples. Optimizes (log kappa,
/// log mu, log omega) with Nelder-Mead from kappa in {0.5, 2, 5}, mu = 1,
/// omega = sample mean square, and keeps the best restart.
inline KappaMuFit fit_kappa_mu(const std::vector<double>& envelope) {
    if (envelope.size() < 100) throw DomainError("channel", "fit_kappa_mu needs at least 100 samples");
    double ms = 0.0;
    for (double r : envelope) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("channel", "fit_kappa_mu: samples must be finite and >= 0");
        ms += r * r;
    }
    ms /= static_cast<double>(envelope.size());
    if (!(ms > 0.0)) throw DomainError("channel", "fit_kappa_mu: all samples are zero");
    const Histogram hist = freedman_diaconis_histogram(envelope);
    const specfun::SeriesPolicy policy{1e-10, 10000};

    auto objective = [&](const std::vector<double>& z) {
        const KappaMuParams p = detail::from_log(z);
        double s = 0.0;
        for (std::size_t b = 0; b < hist.centers.size(); ++b) {
            const double d = hist.density[b] - kappa_mu_envelope_pdf(p, hist.centers[b], policy);
            s += d * d;
        }
        return s;
    };

    KappaMuFit best;
    bool have = false;
    bool any_converged = false;
    std::string diag;
    for (double k0 : {0.5, 2.0, 5.0}) {
        numerics::NelderMeadOptions opt;
        opt.initial_step = 0.5;
        opt.max_evaluations = 3000;
        opt.x_tol = 1e-7;
        auto res = numerics::nelder_mead(objective, {std::log(k0), 0.0, std::log(ms)}, opt);
        // One restart from the optimum shakes off premature simplex collapse.
        if (res.converged) {
            auto again = numerics::nelder_mead(objective, res.x, opt);
            again.evaluations += res.evaluations;
            if (again.value <= res.value) res = again;
        }
        diag += " [kappa0=" + std::to_string(k0) + ": rss=" + std::to_string(res.value) +
                (res.converged ? "" : " (no convergence)") + "]";
        any_converged = any_converged || res.converged;
        if (std::isfinite(res.value) && (!have || res.value < best.objective)) {
            best = {detail::from_log(res.x), res.value, res.evaluations};
            have = true;
        }
    }
    if (!have || !any_converged) throw ConvergenceError("channel", "fit_kappa_mu did not converge:" + diag);
    return best;
}

/// Small-sample corrected Akaike information criterion.
inline double aicc(double log_likelihood, int m_params, long n_samples) {
    if (m_params < 1) throw DomainError("channel", "aicc: parameter count must be >= 1");
    if (n_samples <= m_params + 1) throw DomainError("channel", "aicc requires n > M + 1");
    const double m = m_params;
    return -2.0 * log_likelihood + 2.0 * m + 2.0 * m * (m + 1.0) / (static_cast<double>(n_samples) - m - 1.0);
}

struct RankedModel {
    std::string name;       // "kappa-mu" or "rayleigh"
    KappaMuParams params;   // rayleigh is reported as kappa = 0, mu = 1
    int m_params = 0;
    double log_likelihood = 0.0;
    double aicc = 0.0;
};

inline double kappa_mu_log_likelihood(const KappaMuParams& p, const std::vector<double>& envelope) {
    double ll = 0.0;
    for (double r : envelope) ll += kappa_mu_envelope_log_pdf(p, r);
    return ll;
}

/// Maximum-likelihood refinement of a kappa-mu fit (Nelder-Mead on logs).
inline KappaMuParams refine_kappa_mu_ml(const KappaMuParams& start, const std::vector<double>& envelope) {
    auto nll = [&](const std::vector<double>& z) {
        const double v = -kappa_mu_log_likelihood(detail::from_log(z), envelope);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    numerics::NelderMeadOptions opt;
    opt.initial_step = 0.2;
    opt.max_evaluations = 1500;
    opt.x_tol = 1e-6;
    const std::vector<double> z0{std::log(std::max(start.kappa, 1e-6)), std::log(start.mu), std::log(start.omega)};
    const auto res = numerics::nelder_mead(nll, z0, opt);
    if (!std::isfinite(res.value)) throw ConvergenceError("channel", "kappa-mu likelihood is not finite");
    const KappaMuParams refined = detail::from_log(res.x);
    return nll(res.x) <= nll(z0) ? refined : start;
}

/// Ranks kappa-mu (M = 3) against Rayleigh (M = 1) by AICc, ascending.
/// Ties go to the model with fewer parameters.
inline std::vector<RankedModel> rank_fading_models(const std::vector<double>& envelope) {
    for (double r : envelope)
        if (!(r > 0.0)) throw DomainError("channel", "rank_fading_models requires positive amplitudes");
    const long n = static_cast<long>(envelope.size());
    double ms = 0.0;
    for (double r : envelope) ms += r * r;
    ms /= static_cast<double>(n);

    RankedModel ray;
    ray.name = "rayleigh";
    ray.params = KappaMuParams::make(0.0, 1.0, ms);
    ray.m_params = 1;
    ray.log_likelihood = 0.0;
    for (double r : envelope) ray.log_likelihood += std::log(2.0 * r / ms) - r * r / ms;
    ray.aicc = aicc(ray.log_likelihood, 1, n);

    RankedModel km;
    km.name = "kappa-mu";
    km.params = refine_kappa_mu_ml(fit_kappa_mu(envelope).params, envelope);
    km.m_params = 3;
    km.log_likelihood = kappa_mu_log_likelihood(km.params, envelope);
    km.aicc = aicc(km.log_likelihood, 3, n);

    std::vector<RankedModel> out{km, ray};
    std::stable_sort(out.begin(), out.end(), [](const RankedModel& a, const RankedModel& b) {
        if (a.aicc != b.aicc) return a.aicc < b.aicc;
        return a.m_params < b.m_params;
    });
    return out;
}

enum class TraceAxis { Distance, ElapsedTime };

/// Reads "axis, power_dB" rows (comma, tab or space separated). Lines that
/// are blank, start with '#', or do not parse as two numbers before any
/// data (a header) are skipped. With TraceAxis::ElapsedTime the first column
/// is converted to distance as start_distance + speed * t.
inline std::vector<TracePoint> read_trace(std::istream& in, TraceAxis axis = TraceAxis::Distance,
                                          double speed_mps = 1.0, double start_distance_m = 0.0) {
    std::vector<TracePoint> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), '\t', ' ');
        const auto first = line.find_first_not_of(' ');
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        double a = 0.0, p = 0.0;
        if (!(ss >> a >> p)) {
            if (out.empty()) continue;
            throw DomainError("channel", "read_trace: malformed line " + std::to_string(lineno));
        }
        const double d = axis == TraceAxis::Distance ? a : start_distance_m + speed_mps * a;
        out.push_back({d, p});
    }
    return out;
}

} // namespace mmwlab::channel

#endif // MMWLAB_CHANNEL_FITTING_HPP
