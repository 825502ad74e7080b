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

#ifndef MMWLAB_DEPLOY_TESSELLATION_HPP
#define MMWLAB_DEPLOY_TESSELLATION_HPP

// Circular floor of radius r_d covered by rings of equal circles of radius
// r_b: one circle at the center and, in ring i >= 2, M_i circles whose
// centers sit at distance 2 r_b (i - 1) from the floor center, with
// M_i = floor(pi / asin(1 / (2 (i - 1)))).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mmwlab/error.hpp"
#include "mmwlab/netgeom.hpp"

namespace mmwlab::deploy {

using netgeom::kPi;

struct CircleArea {
    int ring = 1;    // 1-based ring index
    int slot = 0;    // 0-based position within the ring
    double x = 0.0;
    double y = 0.0;
};

struct FloorTessellation {
    double floor_radius_m = 5.5;
    double circle_radius_m = 0.5;
    std::vector<int> ring_sizes;     // M_1 = 1, M_2, ...
    std::vector<CircleArea> areas;   // flattened, ring by ring

    int rings() const { return static_cast<int>(ring_sizes.size()); }
};

inline int ring_size(int i) {
    if (i < 1) throw DomainError("deploy", "ring index must be >= 1");
    if (i == 1) return 1;
    // pi / asin(1/2) evaluates to 5.999...; absorb the rounding before flooring.
    return static_cast<int>(std::floor(kPi / std::asin(1.0 / (2.0 * (i - 1))) + 1e-9));
}

inline FloorTessellation tessellate(double floor_radius_m = 5.5, double circle_radius_m = 0.5) {
    if (!(floor_radius_m > 0.0 && circle_radius_m > 0.0 && circle_radius_m <= floor_radius_m))
        throw DomainError("deploy", "radii must satisfy 0 < r_b <= r_d");
    const double k_real = floor_radius_m / (2.0 * circle_radius_m) + 0.5;
    const double k_round = std::round(k_real);
    if (std::fabs(k_real - k_round) > 1e-9)
        throw DomainError("deploy", "r_d / (2 r_b) + 1/2 must be an integer (got " + std::to_string(k_real) + ")");
    const int k = static_cast<int>(k_round);
    FloorTessellation t;
    t.floor_radius_m = floor_radius_m;
    t.circle_radius_m = circle_radius_m;
    for (int i = 1; i <= k; ++i) {
        const int m = ring_size(i);
        t.ring_sizes.push_back(m);
        const double rad = 2.0 * circle_radius_m * (i - 1);
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * kPi * j / m;
            t.areas.push_back({i, j, rad * std::cos(phi), rad * std::sin(phi)});
        }
    }
    return t;
}

enum class UserDistributionKind { TruncatedGaussian, Uniform };

inline const char* to_string(UserDistributionKind k) {
    return k == UserDistributionKind::Uniform ? "uniform" : "gaussian";
}

inline UserDistributionKind parse_user_distribution(const std::string& s) {
    if (s == "uniform") return UserDistributionKind::Uniform;
    if (s == "gaussian") return UserDistributionKind::TruncatedGaussian;
    throw DomainError("deploy", "unknown user distribution '" + s + "'");
}

/// Radial law of the user position on the floor disk.
struct UserDistribution {
    UserDistributionKind kind = UserDistributionKind::TruncatedGaussian;
    double sigma_m = 10.0;  // scale of the Gaussian kind

    /// P(R <= r) for a floor of radius r_d.
    double radial_cdf(double r, double r_d) const {
        r = std::clamp(r, 0.0, r_d);
        if (kind == UserDistributionKind::Uniform) return r * r / (r_d * r_d);
        if (!(sigma_m > 0.0)) throw DomainError("deploy", "sigma must be > 0");
        const double s2 = 2.0 * sigma_m * sigma_m;
        return std::expm1(-r * r / s2) / std::expm1(-r_d * r_d / s2);
    }
};

/// Probability mass of each circle: the tangent-sector bound of its ring
/// band, scaled by one global constant so that the masses sum to one. The
/// central circle takes the disk of radius r_b.
inline std::vector<double> area_weights(const FloorTessellation& t, const UserDistribution& d) {
    const double rb = t.circle_radius_m, rd = t.floor_radius_m;
    std::vector<double> w;
    w.reserve(t.areas.size());
    double total = 0.0;
    for (const auto& a : t.areas) {
        double m;
        if (a.ring == 1) {
            m = d.radial_cdf(rb, rd);
        } else {
            const double angle = 2.0 * std::asin(1.0 / (2.0 * (a.ring - 1)));
            const double band = d.radial_cdf(2.0 * rb * (a.ring - 0.5), rd) - d.radial_cdf(2.0 * rb * (a.ring - 1.5), rd);
            m = angle / (2.0 * kPi) * band;
        }
        w.push_back(m);
        total += m;
    }
    for (auto& x : w) x /= total;
    return w;
}

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_TESSELLATION_HPP
