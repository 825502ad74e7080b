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

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmwlab/analytic/kpi.hpp"
#include "mmwlab/analytic/sinr.hpp"
#include "oracles.hpp"

using namespace mmwlab;
using namespace mmwlab::analytic;
using channel::LinkState;

namespace {

struct Defaults {
    netgeom::Arena arena;
    RadioConfig radio;
    netgeom::ConeBulbAntenna ant = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(30.0));
    netgeom::AlignmentGainDist gains = netgeom::interferer_alignment_pmf(ant, ant);

    SinrQuery query(double zeta_db, LinkState t = LinkState::LOS) const {
        SinrQuery q;
        q.zeta = netgeom::db_to_linear(zeta_db);
        q.g0 = ant.mainlobe_gain * ant.mainlobe_gain;
        q.serving_state = t;
        return q;
    }
};

// s^k Z_k by Boost Gauss-Kronrod in the 3D distance y, with Boost's 1F1.
double z_oracle(int k, const channel::ScenarioParams& v, double a_g, const netgeom::Arena& arena, double scale) {
    const int mu = v.fading.mu_int;
    const double t1 = v.fading.theta1_int(), t2 = v.fading.theta2_int();
    const double gam = std::pow(10.0, -v.path_loss.p0_db / 10.0);
    const double alpha = v.path_loss.alpha;
    const double h = arena.tx_height_m - arena.rx_height_m;
    const double rho = arena.radius_m;
    auto f = [&](double y) {
        const double l = gam * std::pow(y, -alpha);
        const double d = a_g * l + t1;
        const double hyp = boost::math::hypergeometric_1F1(static_cast<double>(k + mu), static_cast<double>(mu),
                                                           t1 * t2 / d);
        return 2.0 * y / (rho * rho) * std::pow(scale * l, k) * std::pow(d, -(k + mu)) * hyp;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    return GK::integrate(f, h, std::sqrt(rho * rho + h * h), 15, 1e-13);
}

} // namespace

TEST(Radio, NoiseAndTau) {
    RadioConfig r;
    EXPECT_NEAR(r.noise_power_dbm(), -174.0 + 10.0 * std::log10(2e8) + 7.0, 1e-12);
    EXPECT_NEAR(10.0 * std::log10(r.tau()), 23.0 - r.noise_power_dbm(), 1e-10);
    r.bandwidth_hz = 0.0;
    EXPECT_THROW(r.validate(), DomainError);
}

TEST(ReceivedPower, ZeroAndRayleighLimit) {
    const auto f = channel::KappaMuParams::make(2.8, 0.77, 1.16);
    EXPECT_EQ(received_power_ccdf(f, 1.0, 0.0), 1.0);
    // kappa = 0: Erlang tail with rate theta1 / vartheta.
    const auto g = channel::KappaMuParams::make(0.0, 2.0, 1.5);
    for (double x : {0.1, 0.7, 2.0, 5.0}) {
        const double vt = 0.3;
        EXPECT_NEAR(received_power_ccdf(g, vt, x), test::oracle::gamma_q(2.0, g.theta1_int() * x / vt), 1e-12);
    }
    EXPECT_THROW(received_power_ccdf(f, 0.0, 1.0), DomainError);
}

TEST(ReceivedPower, MatchesSamples) {
    const auto f = channel::KappaMuParams::make(2.80, 0.77, 1.16);
    Rng eng(17);
    channel::KappaMuSampler s(f);
    const int n = 1'000'000;
    int above = 0;
    for (int i = 0; i < n; ++i) above += s(eng) > 0.5;
    EXPECT_NEAR(received_power_ccdf(f, 1.0, 0.5), static_cast<double>(above) / n, 0.003);
}

TEST(ZTerm, NumericMatchesQuadratureOracle) {
    Defaults s;
    const auto sc = channel::scenario(channel::Environment::Office, channel::UseCase::Hand);
    for (LinkState st : {LinkState::LOS, LinkState::NLOS})
        for (int k : {0, 1, 3, 7})
            for (double a_g : {0.0, 1e5, 1e8, 1e10}) {
                const double scale = a_g > 0.0 ? a_g : 1.0;
                const double got = z_term_numeric(k, sc[st], a_g, s.arena, {}, {}, scale);
                const double want = z_oracle(k, sc[st], a_g, s.arena, scale);
                EXPECT_NEAR(got, want, 1e-9 * std::fabs(want) + 1e-300) << k << " " << a_g;
            }
}

TEST(ZTerm, RayleighInterfererReducesToPowerRatio) {
    Defaults s;
    auto v = channel::scenario(channel::Environment::Hallway, channel::UseCase::App).nlos;
    v.fading = channel::KappaMuParams::make(0.0, 1.0, 1.0);
    const double a_g = 3e7;
    const double t1 = v.fading.theta1_int();
    // k = 0: E_R[(c l + theta1)^-mu]; compare against a Boost quadrature in r.
    auto f = [&](double r) {
        const double l = channel::path_gain(v.path_loss, s.arena.distance_3d(r));
        return netgeom::distance_pdf(s.arena, r) / (a_g * l + t1);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double want = GK::integrate(f, 0.0, s.arena.radius_m, 15, 1e-13);
    EXPECT_NEAR(z_term_numeric(0, v, a_g, s.arena), want, 1e-10 * want);
}

TEST(ZTerm, ClosedFormMatchesNumericOnGrid) {
    Defaults s;
    const auto sc = channel::scenario(channel::Environment::Hallway, channel::UseCase::App);
    const double v0 = s.ant.mainlobe_gain * s.ant.mainlobe_gain * channel::path_gain(sc.los.path_loss, s.arena.distance_3d(1.0));
    int checked = 0;
    for (int k : {2, 3, 5, 8, 12})
        for (double zeta_db : {-10.0, 0.0, 10.0, 20.0}) {
            for (LinkState st : {LinkState::LOS, LinkState::NLOS}) {
                const double a = netgeom::db_to_linear(zeta_db) * sc.los.fading.theta1_int() / v0;
                const double a_g = a * s.gains.gains[1];  // main-side
                const double num = z_term_numeric(k, sc[st], a_g, s.arena, {}, {}, a_g);
                try {
                    const double cf = z_term_disk_closed_form(k, sc[st], a_g, s.arena, {}, a_g);
                    EXPECT_NEAR(cf, num, 1e-6 * num) << k << " " << zeta_db;
                    ++checked;
                } catch (const ValidityError&) {
                }
            }
        }
    EXPECT_GE(checked, 20);
}

TEST(ZTerm, ClosedFormAtZeroThreshold) {
    Defaults s;
    const auto v = channel::scenario(channel::Environment::Office, channel::UseCase::App).los;
    for (int k : {2, 4, 6}) {
        const double cf = z_term_disk_closed_form(k, v, 0.0, s.arena);
        EXPECT_NEAR(cf, z_oracle(k, v, 0.0, s.arena, 1.0), 1e-9 * cf);
    }
}

TEST(ZTerm, ClosedFormValidityGuards) {
    Defaults s;
    const auto v = channel::scenario(channel::Environment::Hallway, channel::UseCase::App).los;
    EXPECT_THROW(z_term_disk_closed_form(1, v, 1.0, s.arena), ValidityError);  // k < 2/alpha
    EXPECT_THROW(z_term_disk_closed_form(3, v, 1e12, s.arena), ValidityError); // argument beyond -1
    netgeom::Arena off = s.arena;
    off.rx_offset_m = 2.0;
    EXPECT_THROW(z_term_disk_closed_form(3, v, 1.0, off), ValidityError);
}

TEST(ZTerm, DefaultConfigurationArgumentsBelowOne) {
    // At the default configuration and thresholds up to 30 dB, every gain
    // level except main-main keeps the series argument inside the unit disk.
    Defaults s;
    const auto sc = channel::scenario(channel::Environment::Hallway, channel::UseCase::App);
    const double v0 = s.ant.mainlobe_gain * s.ant.mainlobe_gain * channel::path_gain(sc.los.path_loss, s.arena.distance_3d(1.0));
    const double a = netgeom::db_to_linear(30.0) * sc.los.fading.theta1_int() / v0;
    for (int i = 1; i < 4; ++i)
        for (LinkState st : {LinkState::LOS, LinkState::NLOS}) {
            const auto& v = sc[st];
            const double u = a * s.gains.gains[i] * channel::linear_gain_gamma(v.path_loss) *
                             std::pow(s.arena.height_gap_m(), -v.path_loss.alpha) / v.fading.theta1_int();
            EXPECT_LT(u, 1.0);
        }
}

TEST(Multinomial, TableIdentities) {
    for (int n = 1; n <= 4; ++n) {
        MultinomialTable t(n, 8);
        for (int k = 0; k <= 8; ++k) {
            double sum = 0.0;
            for (std::size_t r = 0; r < t.index_matrix(k).size(); ++r) {
                int rs = 0;
                for (int v : t.index_matrix(k)[r]) rs += v;
                EXPECT_EQ(rs, k);
                sum += t.coefficients(k)[r];
            }
            EXPECT_EQ(sum, std::pow(static_cast<double>(n), k));
        }
    }
    EXPECT_THROW(MultinomialTable(11, 25, 1000), CapacityError);
}

TEST(Multinomial, ThreeRoutesAgree) {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 1; n <= 4; ++n) {
        std::vector<double> m(13);
        double tot = 0.0;
        for (auto& x : m) tot += (x = u(eng) * std::exp(-0.3 * (&x - m.data())));
        for (auto& x : m) x /= tot;
        MultinomialTable t(n, 12);
        const auto part = partition_moments(n, m, 12);
        // Polynomial power (sum_j m_j z^j)^n, truncated.
        std::vector<double> poly{1.0};
        for (int i = 0; i < n; ++i) {
            std::vector<double> next(13, 0.0);
            for (std::size_t a = 0; a < poly.size(); ++a)
                for (std::size_t b = 0; a + b < 13; ++b) next[a + b] += poly[a] * m[b];
            poly = next;
        }
        for (int k = 0; k <= 12; ++k) {
            const double naive = t.composition_sum(k, m);
            EXPECT_NEAR(part[static_cast<std::size_t>(k)], naive, 1e-13 + 1e-12 * naive);
            EXPECT_NEAR(part[static_cast<std::size_t>(k)], poly[static_cast<std::size_t>(k)], 1e-13 + 1e-12 * naive);
        }
    }
}

TEST(Multinomial, ElevenInterferersStayPolynomial) {
    std::vector<double> m(26, 0.0);
    m[0] = 0.9;
    m[1] = 0.07;
    m[2] = 0.03;
    const auto j = partition_moments(11, m, 25);
    double s = 0.0;
    for (double x : j) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);  // (sum m)^11 = 1 and all mass sits below degree 23
}

TEST(SinrCcdf, SingleTransmitterIsNoiseLimitedTail) {
    Defaults s;
    for (LinkState st : {LinkState::LOS, LinkState::NLOS})
        for (double db : {-5.0, 5.0, 15.0, 25.0}) {
            auto q = s.query(db, st);
            q.n_tx = 1;
            const double v0 = serving_mean_gain(q, s.arena);
            const double want = received_power_ccdf(q.scenario[st].fading, v0, q.zeta / s.radio.tau());
            // Both sides truncate their Poisson mixtures at 1e-10 tail mass.
            EXPECT_NEAR(sinr_ccdf(q, s.arena, s.radio, s.gains), want, 1e-10);
        }
}

TEST(SinrCcdf, ZeroGainInterferersEqualSingleTransmitterExactly) {
    Defaults s;
    netgeom::AlignmentGainDist zero = s.gains;
    zero.gains = {0.0, 0.0, 0.0, 0.0};
    for (double db : {0.0, 12.0, 24.0}) {
        auto q = s.query(db);
        const double with = sinr_ccdf(q, s.arena, s.radio, zero);
        q.n_tx = 1;
        EXPECT_EQ(with, sinr_ccdf(q, s.arena, s.radio, s.gains));
    }
}

TEST(SinrCcdf, ZeroThresholdLimit) {
    Defaults s;
    auto q = s.query(0.0);
    q.zeta = 0.0;
    EXPECT_EQ(sinr_ccdf(q, s.arena, s.radio, s.gains), 1.0);
    EXPECT_NEAR(sinr_ccdf(s.query(-400.0), s.arena, s.radio, s.gains), 1.0, 1e-10);
    EXPECT_NEAR(sinr_ccdf(s.query(-60.0), s.arena, s.radio, s.gains), 1.0, 1e-5);
}

TEST(SinrCcdf, Monotonicity) {
    Defaults s;
    double prev = 1.0;
    for (double db = -10.0; db <= 30.0; db += 2.5) {
        const double c = sinr_ccdf(s.query(db), s.arena, s.radio, s.gains);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, prev + 1e-10);
        prev = c;
    }
    // More interferers, less coverage; more serving gain, more coverage.
    auto q = s.query(15.0);
    double last = 2.0;
    for (int n : {1, 2, 4, 8, 12, 16}) {
        q.n_tx = n;
        const double c = sinr_ccdf(q, s.arena, s.radio, s.gains);
        EXPECT_LE(c, last + 1e-10);
        last = c;
    }
    q = s.query(15.0);
    last = -1.0;
    for (double g : {10.0, 100.0, 1000.0, 3000.0}) {
        q.g0 = g;
        const double c = sinr_ccdf(q, s.arena, s.radio, s.gains);
        EXPECT_GE(c, last - 1e-10);
        last = c;
    }
}

TEST(SinrCcdf, BlockageMixtureEndpointsAndContinuity) {
    Defaults s;
    auto q = s.query(10.0);
    q.p_los = 0.0;
    const double c0 = sinr_ccdf(q, s.arena, s.radio, s.gains);
    q.p_los = 1e-7;
    EXPECT_NEAR(sinr_ccdf(q, s.arena, s.radio, s.gains), c0, 1e-6);
    q.p_los = 1.0;
    const double c1 = sinr_ccdf(q, s.arena, s.radio, s.gains);
    q.p_los = 1.0 - 1e-7;
    EXPECT_NEAR(sinr_ccdf(q, s.arena, s.radio, s.gains), c1, 1e-6);
    EXPECT_LE(c1, c0);  // LOS interferers are stronger
}

TEST(SinrCcdf, ClosedFormAndNumericRoutesAgree) {
    Defaults s;
    AnalyticPolicy numeric_only;
    numeric_only.prefer_closed_form = false;
    for (double db : {-5.0, 5.0, 15.0, 25.0}) {
        const auto q = s.query(db);
        EXPECT_NEAR(sinr_ccdf(q, s.arena, s.radio, s.gains), sinr_ccdf(q, s.arena, s.radio, s.gains, numeric_only),
                    1e-8);
    }
}

TEST(SinrCcdf, OffCenterReceiver) {
    Defaults s;
    netgeom::Arena off = s.arena;
    off.rx_offset_m = 6.0;
    const auto q = s.query(10.0);
    const double c = sinr_ccdf(q, off, s.radio, s.gains);
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 1.0);
    // Fewer nearby interferers at the edge.
    EXPECT_GE(c, sinr_ccdf(q, s.arena, s.radio, s.gains) - 1e-9);
}

TEST(Kpi, SpectralEfficiencyBasics) {
    EXPECT_NEAR(spectral_efficiency(SinrDistribution::empirical({7.0, 7.0})), 3.0, 1e-14);
    EXPECT_EQ(spectral_efficiency(SinrDistribution::function([](double) { return 0.0; })), 0.0);
    const auto step = SinrDistribution::function([](double s) { return s < 15.0 ? 1.0 : 0.0; });
    EXPECT_NEAR(spectral_efficiency(step), 4.0, 1e-8);
    // Exponential SINR with mean 1: E[log2(1+S)] = e Ei(1)... compare with quadrature.
    const auto expo = SinrDistribution::function([](double s) { return std::exp(-s); });
    auto f = [](double x) { return std::log2(1.0 + x) * std::exp(-x); };
    const double want = boost::math::quadrature::exp_sinh<double>().integrate(f);
    EXPECT_NEAR(spectral_efficiency(expo), want, 1e-5);
}

TEST(Kpi, AreaTrafficCapacity) {
    netgeom::Arena a;
    EXPECT_EQ(area_traffic_capacity(0.0, 12, a, 2e8), 0.0);
    EXPECT_NEAR(area_traffic_capacity(5.0, 12, a, 2e8), 12.0 / (144.0 * netgeom::kPi) * 2e8 * 5.0, 1e-3);
    EXPECT_NEAR(area_traffic_capacity(5.0, 12, a, 2e8), 2.653e7, 1e4);
    EXPECT_DOUBLE_EQ(area_traffic_capacity(3.0, 24, a, 2e8), 2.0 * area_traffic_capacity(3.0, 12, a, 2e8));
}

TEST(Kpi, ExperiencedDataRate) {
    const double bw = 2e8;
    // Deterministic rate.
    EXPECT_NEAR(experienced_data_rate(SinrDistribution::empirical({15.0}), bw), 4.0 * bw, 1e-3);
    const auto step = SinrDistribution::function([](double s) { return s < 15.0 ? 1.0 : 0.0; });
    EXPECT_NEAR(experienced_data_rate(step, bw), 4.0 * bw, 1e-2 * bw);
    // Two atoms with equal mass, beta = 0.5: the lower atom.
    EXPECT_NEAR(experienced_data_rate(SinrDistribution::empirical({3.0, 15.0}), bw, 0.5), 2.0 * bw, 1e-3);
    // Sample quantile.
    std::mt19937_64 eng(3);
    std::exponential_distribution<double> e(0.1);
    std::vector<double> v(200000);
    for (auto& x : v) x = e(eng);
    std::vector<double> rates(v.size());
    std::transform(v.begin(), v.end(), rates.begin(), [&](double s) { return bw * std::log2(1.0 + s); });
    std::sort(rates.begin(), rates.end());
    const double q = rates[static_cast<std::size_t>(0.05 * rates.size())];
    EXPECT_NEAR(experienced_data_rate(SinrDistribution::empirical(v), bw), q, 0.02 * q);
    // Analytic tail of the same law.
    const double exact = bw * std::log2(1.0 - 10.0 * std::log(0.95));
    const auto expo = SinrDistribution::function([](double s) { return std::exp(-0.1 * s); });
    EXPECT_NEAR(experienced_data_rate(expo, bw), exact, 1e-6 * exact);
    EXPECT_THROW(experienced_data_rate(expo, bw, 1.0), DomainError);
}

TEST(Kpi, TabulatedTailInterpolates) {
    const auto d = SinrDistribution::tabulated({0.0, 10.0, 20.0}, {1.0, 0.5, 0.0});
    EXPECT_EQ(d.ccdf(0.5), 1.0);
    EXPECT_NEAR(d.ccdf(netgeom::db_to_linear(5.0)), 0.75, 1e-12);
    EXPECT_EQ(d.ccdf(1000.0), 0.0);
    EXPECT_THROW(SinrDistribution::tabulated({0.0, 1.0}, {0.5, 0.8}), DomainError);
    EXPECT_GT(spectral_efficiency(d), 0.0);
}
