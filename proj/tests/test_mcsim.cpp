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
#include <sstream>

#include "mmwlab/analytic/kpi.hpp"
#include "mmwlab/mcsim.hpp"

using namespace mmwlab;
using namespace mmwlab::mcsim;
using channel::LinkState;

namespace {

double sup_gap_to_analytic(const NetworkConfig& c, const std::vector<double>& samples) {
    const auto gains = c.interferer_gains();
    double gap = 0.0;
    for (double db = -10.0; db <= 30.0; db += 1.0) {
        const double z = netgeom::db_to_linear(db);
        const double a = analytic::sinr_ccdf(c.query(z), c.arena, c.radio, gains);
        gap = std::max(gap, std::fabs(a - estimate_coverage(samples, z)));
    }
    return gap;
}

} // namespace

TEST(Snapshots, DeterministicLinkBudget) {
    NetworkConfig c;
    c.n_tx = 1;
    c.deterministic_fading = true;
    c.n_snapshots = 10;
    const auto s = run_snapshots(c);
    const double g0 = c.tx.mainlobe_gain * c.rx.mainlobe_gain;
    const double l = std::pow(10.0, -78.31 / 10.0) * std::pow(std::sqrt(1.0 + 2.25), -1.92);
    const double want = g0 * l * 1.16 * c.radio.tau();
    for (double x : s.samples) EXPECT_NEAR(x, want, 1e-12 * want);
}

TEST(Snapshots, ReproducibleAndWorkerIndependent) {
    NetworkConfig c;
    c.n_snapshots = 30000;
    c.master_seed = 77;
    const auto a = run_snapshots(c);
    const auto b = run_snapshots(c);
    EXPECT_EQ(a.samples, b.samples);
    c.workers = 3;
    const auto w = run_snapshots(c);
    EXPECT_EQ(a.samples, w.samples);
    EXPECT_EQ(a.fingerprint, w.fingerprint);
    c.master_seed = 78;
    EXPECT_NE(run_snapshots(c).samples, a.samples);
}

TEST(Snapshots, SplitStreamsUncorrelated) {
    const int n = 10000;
    for (std::uint64_t s = 0; s < 4; ++s) {
        Rng a = make_stream(11, s), b = make_stream(11, s + 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
        for (int i = 0; i < n; ++i) {
            const double x = u(a), y = u(b);
            sa += x, sb += y, sab += x * y, saa += x * x, sbb += y * y;
        }
        const double cov = sab / n - sa / n * sb / n;
        const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
        EXPECT_LT(std::fabs(corr), 0.03);  // 3 sigma at n = 1e4
    }
}

TEST(Estimators, ConstantSamples) {
    const std::vector<double> v(50, 15.0);
    EXPECT_EQ(estimate_coverage(v, 14.0), 1.0);
    EXPECT_EQ(estimate_coverage(v, 15.0), 0.0);
    EXPECT_NEAR(estimate_se(v), 4.0, 1e-14);
    EXPECT_NEAR(estimate_edr(v, 2e8), 8e8, 1e-6);
    EXPECT_THROW(estimate_se({}), DomainError);
    EXPECT_THROW(estimate_edr(v, 2e8, 0.0), DomainError);
}

TEST(Estimators, QuantileInterpolation) {
    const std::vector<double> v{0.0, 1.0, 3.0, 7.0, 15.0};
    // h = 4 * 0.3 = 1.2: 1 + 0.2 * (3 - 1) = 1.4
    EXPECT_NEAR(estimate_edr(v, 1.0, 0.3), std::log2(2.4), 1e-14);
}

TEST(Estimators, CoverageMonotoneAndZeroThreshold) {
    NetworkConfig c;
    c.n_snapshots = 20000;
    const auto s = run_snapshots(c);
    EXPECT_EQ(estimate_coverage(s.samples, 0.0), 1.0);
    double prev = 1.0;
    for (double db = -20.0; db <= 40.0; db += 1.0) {
        const double cov = estimate_coverage(s.samples, netgeom::db_to_linear(db));
        EXPECT_LE(cov, prev);
        prev = cov;
    }
}

TEST(CrossCheck, EmpiricalTailMatchesAnalytic) {
    for (const char* name : {"Hallway/App", "Office/Hand"})
        for (LinkState st : {LinkState::LOS, LinkState::NLOS}) {
            NetworkConfig c;
            c.scenario = channel::scenario_by_name(name);
            c.serving_state = st;
            c.n_snapshots = 200000;
            c.master_seed = 5;
            const auto s = run_snapshots(c);
            EXPECT_LT(sup_gap_to_analytic(c, s.samples), 0.01) << name << " " << channel::to_string(st);
        }
}

TEST(CrossCheck, OffCenterReceiverWideBeams) {
    NetworkConfig c;
    c.arena.rx_offset_m = 7.0;
    c.tx = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(90.0));
    c.n_snapshots = 100000;
    c.master_seed = 9;
    const auto s = run_snapshots(c);
    EXPECT_LT(sup_gap_to_analytic(c, s.samples), 0.01);
}

TEST(CrossCheck, KpisMatchAnalytic) {
    NetworkConfig c;
    c.scenario = channel::scenario_by_name("Office/Hand");
    c.tx = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(60.0));
    c.n_snapshots = 300000;
    c.master_seed = 21;
    const auto s = run_snapshots(c);
    std::vector<double> grid;
    for (double db = -20.0; db <= 50.0; db += 0.25) grid.push_back(db);
    const auto d = analytic::tabulate_sinr_ccdf(c.query(1.0), c.arena, c.radio, c.interferer_gains(), grid);
    const double se_a = analytic::spectral_efficiency(d);
    EXPECT_NEAR(estimate_se(s.samples), se_a, 0.02 * se_a);
    const double edr_a = analytic::experienced_data_rate(d, c.radio.bandwidth_hz);
    EXPECT_NEAR(estimate_edr(s.samples, c.radio.bandwidth_hz), edr_a, 0.02 * edr_a);
}

TEST(Sweep, TrendsAndTable) {
    NetworkConfig c;
    c.n_snapshots = 20000;
    const auto nt = sweep(c, SweepAxis::NTx, {1, 4, 8, 12});
    for (std::size_t i = 1; i < nt.rows.size(); ++i) EXPECT_GT(nt.rows[i].atc, nt.rows[i - 1].atc);

    const auto st = sweep(c, SweepAxis::ServingState, {0, 1});
    EXPECT_LT(st.rows[1].atc, st.rows[0].atc);

    const auto bw = sweep(c, SweepAxis::Beamwidth, {50, 70, 90, 120});
    for (std::size_t i = 1; i < bw.rows.size(); ++i) EXPECT_LT(bw.rows[i].edr, bw.rows[i - 1].edr);

    std::ostringstream os;
    write_kpi_table(os, nt);
    const std::string text = os.str();
    EXPECT_NE(text.find("n_tx,coverage,atc_bit_s_m2,edr_bit_s,samples,seed\n"), std::string::npos);
    EXPECT_NE(text.find("# workers 1"), std::string::npos);
    EXPECT_THROW(sweep(c, SweepAxis::ServingState, {2}), DomainError);
    EXPECT_THROW(sweep(c, SweepAxis::NTx, {}), DomainError);
}
