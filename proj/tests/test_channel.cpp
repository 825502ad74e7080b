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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mmwlab/channel/catalog.hpp"
#include "mmwlab/channel/fitting.hpp"
#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/rng.hpp"
#include "oracles.hpp"

using namespace mmwlab;
using namespace mmwlab::channel;
namespace oracle = mmwlab::test::oracle;

namespace {

double ks_distance(std::vector<double> xs, const KappaMuParams& p) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 1.0 - kappa_mu_power_ccdf(p, xs[i]);
        d = std::max({d, std::fabs(cdf - i / n), std::fabs((i + 1) / n - cdf)});
    }
    return d;
}

std::vector<double> draw_envelopes(const KappaMuParams& p, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    KappaMuSampler s(p);
    std::vector<double> out(n);
    for (auto& r : out) r = std::sqrt(s(rng));
    return out;
}

} // namespace

TEST(PathLoss, Examples) {
    const PathLossModel m{78.31, 1.92, 1.0};
    EXPECT_DOUBLE_EQ(path_loss_db(m, 1.0), 78.31);
    EXPECT_NEAR(path_loss_db(m, 10.0), 97.51, 1e-12);
    const PathLossModel m2{60.0, 3.0, 2.5};
    EXPECT_DOUBLE_EQ(path_loss_db(m2, 2.5), 60.0);
    EXPECT_THROW(path_loss_db(m, 0.0), DomainError);
    EXPECT_THROW(path_loss_db(m, -1.0), DomainError);
}

TEST(PathLoss, Monotone) {
    const PathLossModel a{80.0, 2.0, 1.0}, b{80.0, 2.5, 1.0};
    double prev = -1e9;
    for (double d = 0.5; d < 30.0; d += 0.25) {
        const double v = path_loss_db(a, d);
        EXPECT_GT(v, prev);
        prev = v;
        if (d > 1.0) EXPECT_GT(path_loss_db(b, d), v);
    }
}

TEST(PathLoss, LinearGain) {
    EXPECT_DOUBLE_EQ(linear_gain_gamma({1e-300, 2.0, 1.0}), 1.0);
    EXPECT_DOUBLE_EQ(linear_gain_gamma({78.31, 2.0, 1.0}), std::pow(10.0, -7.831));
    const PathLossModel m{78.31, 1.92, 1.0};
    EXPECT_DOUBLE_EQ(path_gain(m, 1.0), linear_gain_gamma(m));
    EXPECT_NEAR(10.0 * std::log10(path_gain(m, 7.0)), -path_loss_db(m, 7.0), 1e-10);
}

TEST(KappaMuParams, RoundingAndThetas) {
    const auto p = KappaMuParams::make(2.80, 0.77, 1.16);
    EXPECT_EQ(p.mu_int, 1);
    EXPECT_EQ(KappaMuParams::round_mu(1.5), 2);
    EXPECT_EQ(KappaMuParams::round_mu(2.49), 2);
    EXPECT_EQ(KappaMuParams::round_mu(0.2), 1);
    EXPECT_DOUBLE_EQ(p.theta1_int(), 3.8 / 1.16);
    EXPECT_DOUBLE_EQ(p.theta2_int(), 2.8);
    EXPECT_THROW(KappaMuParams::make(-1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(KappaMuParams::make(1.0, 0.0, 1.0), DomainError);
}

TEST(KappaMuPdf, RayleighLimit) {
    const auto p = KappaMuParams::make(1e-14, 1.0, 1.0);
    for (double h : {0.0, 0.1, 1.0, 3.0, 10.0}) EXPECT_NEAR(kappa_mu_power_pdf(p, h), std::exp(-h), 1e-12);
    const auto q = KappaMuParams::make(0.0, 1.0, 1.0);
    for (double h : {0.0, 0.5, 4.0}) EXPECT_NEAR(kappa_mu_power_pdf(q, h), std::exp(-h), 1e-15);
}

TEST(KappaMuPdf, NormalizedAndMeanIsOmega) {
    for (const auto& s : measured_catalog()) {
        const auto& p = s.fading;
        auto f = [&](double h) { return kappa_mu_power_pdf(p, h); };
        auto hf = [&](double h) { return h * kappa_mu_power_pdf(p, h); };
        boost::math::quadrature::tanh_sinh<double> ts;
        boost::math::quadrature::exp_sinh<double> es;
        const double mass = ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
        const double mean = ts.integrate(hf, 0.0, 1.0) + es.integrate(hf, 1.0, std::numeric_limits<double>::infinity());
        EXPECT_NEAR(mass, 1.0, 1e-8);
        EXPECT_NEAR(mean, p.omega, 1e-6);
    }
}

TEST(KappaMuCcdf, TrivialLimits) {
    const auto p = KappaMuParams::make(2.80, 0.77, 1.16);
    EXPECT_EQ(kappa_mu_power_ccdf(p, 0.0), 1.0);
    EXPECT_EQ(kappa_mu_power_ccdf(p, -1.0), 1.0);
    EXPECT_LT(kappa_mu_power_ccdf(p, 60.0), 1e-30);
    EXPECT_EQ(kappa_mu_power_ccdf(p, std::numeric_limits<double>::infinity()), 0.0);
}

TEST(KappaMuCcdf, MatchesMarcumIdentity) {
    // P(H > x) = Q_mu(sqrt(2 theta2), sqrt(2 theta1 x)) for integer mu.
    const auto p = KappaMuParams::make(2.80, 0.77, 1.16);
    const double x = 1.0;
    const double q = specfun::marcum_q(1.0, std::sqrt(2.0 * p.theta2_int()), std::sqrt(2.0 * p.theta1_int() * x));
    EXPECT_NEAR(kappa_mu_power_ccdf(p, x), q, 1e-10);
    EXPECT_NEAR(kappa_mu_power_ccdf(p, x, {1e-14, 10000}), q, 1e-13);
    for (int mu : {1, 2, 3}) {
        for (double kappa : {0.0, 0.5, 2.8, 9.0}) {
            const auto r = KappaMuParams::make(kappa, mu, 1.3);
            for (double xx : {0.01, 0.3, 1.0, 2.5, 6.0}) {
                const double want = oracle::marcum_q_noncentral_chi2(mu, std::sqrt(2.0 * r.theta2_int()),
                                                                     std::sqrt(2.0 * r.theta1_int() * xx));
                EXPECT_NEAR(kappa_mu_power_ccdf(r, xx, {1e-13, 10000}), want, 1e-11) << mu << " " << kappa << " " << xx;
            }
        }
    }
}

TEST(KappaMuCcdf, EqualsTailIntegralOfPdf) {
    for (const auto& s : measured_catalog()) {
        const auto p = s.fading.rounded();
        boost::math::quadrature::exp_sinh<double> es;
        for (double x : {0.05, 0.3, 1.0, 2.0, 4.0}) {
            const double tail = es.integrate([&](double h) { return kappa_mu_power_pdf(p, h); }, x,
                                             std::numeric_limits<double>::infinity());
            EXPECT_NEAR(kappa_mu_power_ccdf(p, x), tail, 1e-6);
        }
    }
}

TEST(KappaMuCcdf, NonIncreasing) {
    const auto p = KappaMuParams::make(1.89, 2.2, 1.18);
    double prev = 1.0;
    for (double x = 0.0; x < 20.0; x += 0.05) {
        const double v = kappa_mu_power_ccdf(p, x);
        EXPECT_LE(v, prev);
        EXPECT_GE(v, 0.0);
        prev = v;
    }
}

TEST(KappaMuSampler, ExponentialMean) {
    Rng rng(7);
    const auto p = KappaMuParams::make(0.0, 1.0, 1.0);
    KappaMuSampler s(p);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double h = s(rng);
        ASSERT_GE(h, 0.0);
        sum += h;
    }
    EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(KappaMuSampler, KolmogorovDistanceToCcdf) {
    const auto p = KappaMuParams::make(2.80, 0.77, 1.16);
    Rng rng(11);
    KappaMuSampler s(p);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = s(rng);
    EXPECT_LT(ks_distance(xs, p), 0.005);
}

TEST(FitPathLoss, NoiselessRoundTrip) {
    std::vector<TracePoint> trace;
    const double eirp = 30.0, gain = 5.0;
    for (double d = 1.0; d <= 20.0; d += 0.5) trace.push_back({d, eirp + gain - (80.0 + 20.0 * std::log10(d))});
    const auto m = fit_path_loss(trace, eirp, gain);
    EXPECT_NEAR(m.p0_db, 80.0, 1e-10);
    EXPECT_NEAR(m.alpha, 2.0, 1e-12);
}

TEST(FitPathLoss, NoisyRegression) {
    Rng rng(3);
    std::uniform_real_distribution<double> ud(1.0, 25.0);
    std::normal_distribution<double> shadow(0.0, 3.0);
    std::vector<TracePoint> trace;
    for (int i = 0; i < 10000; ++i) {
        const double d = ud(rng);
        trace.push_back({d, -(80.0 + 20.0 * std::log10(d)) + shadow(rng)});
    }
    const auto m = fit_path_loss(trace, 0.0, 0.0);
    EXPECT_NEAR(m.alpha, 2.0, 0.02);
}

TEST(FitPathLoss, Degenerate) {
    EXPECT_THROW(fit_path_loss({{3.0, -70.0}, {3.0, -71.0}, {3.0, -69.0}}, 0.0, 0.0), DomainError);
    EXPECT_THROW(fit_path_loss({{3.0, -70.0}}, 0.0, 0.0), DomainError);
}

TEST(FitKappaMu, RoundTrip) {
    const auto truth = KappaMuParams::make(2.8, 1.0, 1.16);
    const auto env = draw_envelopes(truth, 100000, 99);
    const auto fit = fit_kappa_mu(env);
    EXPECT_NEAR(fit.params.kappa, 2.8, 0.15 * 2.8);
    EXPECT_NEAR(fit.params.omega, 1.16, 0.05 * 1.16);
}

TEST(FitKappaMu, RayleighData) {
    const auto truth = KappaMuParams::make(0.0, 1.0, 1.0);
    const auto env = draw_envelopes(truth, 100000, 5);
    EXPECT_LT(fit_kappa_mu(env).params.kappa, 0.2);
}

TEST(FitKappaMu, Preconditions) {
    EXPECT_THROW(fit_kappa_mu({}), DomainError);
    EXPECT_THROW(fit_kappa_mu(std::vector<double>(50, 1.0)), DomainError);
}

TEST(Aicc, Arithmetic) {
    EXPECT_NEAR(aicc(0.0, 1, 100), 2.0 + 4.0 / 98.0, 1e-15);
    EXPECT_LT(aicc(-50.0, 1, 1000), aicc(-50.0, 3, 1000));
    EXPECT_THROW(aicc(0.0, 3, 4), DomainError);
}

TEST(Aicc, KappaMuRanksFirstOnKappaMuData) {
    const auto truth = KappaMuParams::make(2.8, 1.0, 1.16);
    const auto env = draw_envelopes(truth, 2000, 1234);
    const auto ranked = rank_fading_models(env);
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked.front().name, "kappa-mu");
    EXPECT_LT(ranked.front().aicc, ranked.back().aicc);
}

TEST(LargeScale, MovingWindowRemovesSlowTrend) {
    std::vector<double> pdb;
    Rng rng(17);
    const auto p = KappaMuParams::make(1.0, 1.0, 1.0);
    KappaMuSampler s(p);
    for (int i = 0; i < 20000; ++i) pdb.push_back(-60.0 - 0.001 * i + 10.0 * std::log10(s(rng)));
    const auto env = small_scale_envelope(pdb, 100);
    double ms = 0.0;
    for (double r : env) ms += r * r;
    EXPECT_NEAR(ms / env.size(), 1.0, 1e-9 + 0.02);
    const auto avg = moving_average({1, 2, 3, 4, 5}, 3);
    EXPECT_DOUBLE_EQ(avg[0], 1.5);
    EXPECT_DOUBLE_EQ(avg[2], 3.0);
    EXPECT_DOUBLE_EQ(avg[4], 4.5);
}

TEST(Trace, ReadsDistanceAndTime) {
    std::istringstream a("# header\ndistance,power\n1.0, -60\n2.0\t-66.5\n\n3 -70\n");
    const auto t = read_trace(a);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_DOUBLE_EQ(t[1].distance_m, 2.0);
    EXPECT_DOUBLE_EQ(t[1].power_db, -66.5);
    std::istringstream b("0 -60\n2 -61\n");
    const auto u = read_trace(b, TraceAxis::ElapsedTime, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(u[1].distance_m, 2.0);
    std::istringstream c("1 -60\nnot numbers\n");
    EXPECT_THROW(read_trace(c), DomainError);
}

TEST(Catalog, MeasuredRowsSelfConsistent) {
    const auto rows = measured_catalog();
    ASSERT_EQ(rows.size(), 12u);
    for (const auto& pair : all_scenarios()) {
        EXPECT_NEAR(pair.nlos.path_loss.p0_db - pair.los.path_loss.p0_db, pair.los.body_blockage_db, 0.01 + 1e-9)
            << pair.name;
        EXPECT_EQ(pair.los.fading.mu_int, 1);
        EXPECT_EQ(pair.nlos.fading.mu_int, 1);
    }
    const auto ha = scenario(Environment::Hallway, UseCase::App);
    EXPECT_DOUBLE_EQ(ha.los.path_loss.p0_db, 78.31);
    EXPECT_DOUBLE_EQ(ha.nlos.fading.kappa, 0.67);
    const auto dd = deployment_defaults();
    EXPECT_DOUBLE_EQ(dd.los.path_loss.alpha, 2.1);
    EXPECT_DOUBLE_EQ(dd.nlos.path_loss.alpha, 3.5);
    EXPECT_DOUBLE_EQ(dd.nlos.fading.kappa, 0.92);
    EXPECT_EQ(scenario_by_name("Office/Hand").los.path_loss.p0_db, 95.74);
    EXPECT_THROW(scenario_by_name("Attic/App"), DomainError);
}

TEST(Catalog, JsonRoundTrip) {
    const auto rows = measured_catalog();
    const auto text = export_catalog(rows);
    const auto back = import_catalog(text);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].environment, rows[i].environment);
        EXPECT_EQ(back[i].use_case, rows[i].use_case);
        EXPECT_EQ(back[i].link_state, rows[i].link_state);
        EXPECT_EQ(back[i].path_loss.p0_db, rows[i].path_loss.p0_db);
        EXPECT_EQ(back[i].fading.kappa, rows[i].fading.kappa);
        EXPECT_EQ(back[i].fading.mu_int, rows[i].fading.mu_int);
    }
    EXPECT_EQ(export_catalog(back), text);
    auto dup = rows;
    dup.push_back(rows.front());
    EXPECT_THROW(import_catalog(export_catalog(dup)), DomainError);
    EXPECT_THROW(import_catalog("{"), DomainError);
}
