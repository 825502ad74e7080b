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

#include "mmwlab/netgeom.hpp"
#include "oracles.hpp"

using namespace mmwlab;
using namespace mmwlab::netgeom;

namespace {

double cdf_by_quadrature(const Arena& a, double r) {
    if (r <= 0.0) return 0.0;
    auto f = [&](double x) { return distance_pdf(a, x); };
    const double kink = distance_pdf_kink(a);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (r <= kink) return GK::integrate(f, 0.0, r, 10, 1e-12);
    return GK::integrate(f, 0.0, kink, 10, 1e-12) + GK::integrate(f, kink, r, 10, 1e-12);
}

} // namespace

TEST(Antenna, MainlobeGainExamples) {
    EXPECT_NEAR(mainlobe_gain(kPi, 1e-12), 2.0, 1e-9);
    EXPECT_NEAR(mainlobe_gain(2.0 * kPi, 1e-3), 1.0, 1e-12);
    const double gm = std::pow(10.0, -2.5);
    const double c = std::cos(deg_to_rad(15.0));
    EXPECT_NEAR(mainlobe_gain(deg_to_rad(30.0), gm), (1.0 - gm * (1.0 + c) / 2.0) / ((1.0 - c) / 2.0), 1e-10);
    EXPECT_THROW(mainlobe_gain(0.0, 0.01), DomainError);
    EXPECT_THROW(mainlobe_gain(1.0, 1.5), DomainError);
}

TEST(Antenna, NormalizationIdentityAndMonotone) {
    const double gm = db_to_linear(-25.0);
    double prev = 1e300;
    for (double w = 0.05; w <= 2.0 * kPi; w += 0.05) {
        const double G = mainlobe_gain(w, gm);
        const double q = (1.0 - std::cos(w / 2.0)) / 2.0;
        EXPECT_NEAR(G * q + gm * (1.0 - q), 1.0, 1e-12);
        EXPECT_GT(G, gm);
        EXPECT_LT(G, prev);
        prev = G;
    }
}

TEST(Alignment, PmfExamples) {
    const auto iso = ConeBulbAntenna::make(2.0 * kPi, 0.01);
    const auto d = interferer_alignment_pmf(iso, iso);
    const auto c = d.compact();
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(c[0].first, 1.0, 1e-12);
    EXPECT_NEAR(c[0].second, 1.0, 1e-15);

    const auto a = ConeBulbAntenna::make(deg_to_rad(30.0));
    const auto p = interferer_alignment_pmf(a, a);
    const double q = (1.0 - std::cos(deg_to_rad(15.0))) / 2.0;
    EXPECT_NEAR(p.probs[0], q * q, 1e-15);
    EXPECT_NEAR(p.probs[0] + p.probs[1] + p.probs[2] + p.probs[3], 1.0, 1e-12);
    // Mean gain of a randomly pointed cone-bulb pair is 1 by power conservation.
    EXPECT_NEAR(p.mean(), 1.0, 1e-12);
    const auto planar = interferer_alignment_pmf(a, a, DirectionModel::Planar);
    EXPECT_NEAR(planar.probs[0], (30.0 / 360.0) * (30.0 / 360.0), 1e-15);
}

TEST(Alignment, ServingGainLevels) {
    const auto a = ConeBulbAntenna::make(deg_to_rad(30.0));
    EXPECT_DOUBLE_EQ(alignment_gain(a, a, Alignment::MainMain), a.mainlobe_gain * a.mainlobe_gain);
    EXPECT_DOUBLE_EQ(alignment_gain(a, a, Alignment::SideSide), a.sidelobe_gain * a.sidelobe_gain);
    EXPECT_EQ(parse_alignment(to_string(Alignment::SideMain)), Alignment::SideMain);
    EXPECT_THROW(parse_alignment("sideways"), DomainError);
}

TEST(Layout, BasicProperties) {
    Arena arena;
    const auto L = sample_layout(arena, 1, 1.0, std::uint64_t{42});
    EXPECT_TRUE(L.interferer_xy.empty());
    EXPECT_NEAR(L.serving_distance(), 1.0, 1e-12);
    EXPECT_NEAR(arena.distance_3d(L.serving_distance()), std::sqrt(1.0 + 1.5 * 1.5), 1e-12);
    const auto M = sample_layout(arena, 12, 3.0, std::uint64_t{42});
    EXPECT_EQ(M.interferer_xy.size(), 11u);
    for (const auto& p : M.interferer_xy) EXPECT_LE(std::hypot(p[0], p[1]), arena.radius_m);
    EXPECT_THROW(sample_layout(arena, 0, 1.0, std::uint64_t{1}), DomainError);
    EXPECT_THROW(sample_layout(arena, 3, 13.0, std::uint64_t{1}), DomainError);
}

TEST(Layout, DeterministicUnderSeed) {
    Arena arena;
    std::ostringstream a, b, c;
    write_layout(a, sample_layout(arena, 8, 2.0, std::uint64_t{7}));
    write_layout(b, sample_layout(arena, 8, 2.0, std::uint64_t{7}));
    write_layout(c, sample_layout(arena, 8, 2.0, std::uint64_t{8}));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str(), c.str());
    EXPECT_NE(a.str().find("interferer"), std::string::npos);
}

TEST(Layout, OffsetReceiverKeepsServerInsideDisk) {
    Arena arena;
    arena.rx_offset_m = 6.0;
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto L = sample_layout(arena, 2, 10.0, rng);
        EXPECT_LE(std::hypot(L.serving_xy[0], L.serving_xy[1]), arena.radius_m + 1e-9);
        EXPECT_NEAR(L.serving_distance(), 10.0, 1e-9);
    }
}

TEST(Layout, RadialCoordinateIsUniformOnDisk) {
    Arena arena;
    Rng rng(2024);
    std::vector<double> rs;
    for (int i = 0; i < 100000; ++i) {
        const auto L = sample_layout(arena, 2, 1.0, rng);
        rs.push_back(std::hypot(L.interferer_xy[0][0], L.interferer_xy[0][1]));
    }
    std::sort(rs.begin(), rs.end());
    double ks = 0.0;
    const double n = static_cast<double>(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double F = (rs[i] / arena.radius_m) * (rs[i] / arena.radius_m);
        ks = std::max({ks, std::fabs(F - i / n), std::fabs((i + 1) / n - F)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(DistancePdf, CenteredAndOffset) {
    Arena arena;
    for (double r : {0.0, 1.0, 6.0, 12.0}) EXPECT_DOUBLE_EQ(distance_pdf(arena, r), 2.0 * r / 144.0);
    arena.rx_offset_m = 6.0;
    EXPECT_NEAR(cdf_by_quadrature(arena, 18.0), 1.0, 1e-8);
    EXPECT_NEAR(distance_pdf(arena, 18.0), 0.0, 1e-15);
    // Continuous at the branch point.
    EXPECT_NEAR(distance_pdf(arena, 6.0 - 1e-9), distance_pdf(arena, 6.0 + 1e-9), 1e-5);
    EXPECT_THROW(distance_pdf(arena, 18.5), DomainError);
    EXPECT_THROW(distance_pdf(arena, -0.1), DomainError);
}

TEST(DistancePdf, MatchesSampledDistances) {
    for (double off : {0.0, 6.0}) {
        Arena arena;
        arena.rx_offset_m = off;
        Rng rng(77);
        std::vector<double> ds;
        for (int i = 0; i < 100000; ++i) {
            const auto L = sample_layout(arena, 2, 1.0, rng);
            ds.push_back(L.interferer_distance(0));
        }
        std::sort(ds.begin(), ds.end());
        double ks = 0.0;
        const double n = static_cast<double>(ds.size());
        for (int g = 1; g < 400; ++g) {
            const double r = (arena.radius_m + off) * g / 400.0;
            const double emp = static_cast<double>(std::upper_bound(ds.begin(), ds.end(), r) - ds.begin()) / n;
            ks = std::max(ks, std::fabs(emp - cdf_by_quadrature(arena, r)));
        }
        EXPECT_LT(ks, 0.01) << "offset " << off;
    }
}
