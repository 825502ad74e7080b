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

#ifndef MMWLAB_DEPLOY_AVAILABILITY_HPP
#define MMWLAB_DEPLOY_AVAILABILITY_HPP

// Ceiling candidate grid and the probability that a beam from a candidate
// reaches a floor circle with enough SNR, averaged over LOS/NLOS.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mmwlab/analytic/sinr.hpp"
#include "mmwlab/channel/catalog.hpp"
#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/deploy/tessellation.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::deploy {

struct AvailabilityConfig {
    channel::ScenarioPair scenario = channel::deployment_defaults();
    double p_los = 0.5;
    double snr_threshold_db = 10.0;
    analytic::RadioConfig radio;
    double ceiling_side_m = 10.0;
    double ceiling_height_m = 3.0;
    double user_height_m = 1.5;

    void validate() const {
        radio.validate();
        if (!(p_los >= 0.0 && p_los <= 1.0)) throw DomainError("deploy", "p_los must lie in [0, 1]");
        if (!(ceiling_side_m > 0.0)) throw DomainError("deploy", "ceiling side must be > 0");
        if (!(ceiling_height_m > user_height_m && user_height_m >= 0.0))
            throw DomainError("deploy", "ceiling must be above the user height");
        if (std::isnan(snr_threshold_db)) throw DomainError("deploy", "SNR threshold is NaN");
    }
};

using Point3 = std::array<double, 3>;

/// n = s^2 points on an s x s lattice spanning the square ceiling edge to
/// edge (a single point sits at its center). The ceiling is centered over
/// the floor. Lattices with (s' - 1) a multiple of (s - 1) contain each
/// other, e.g. n = 16, 100, 361.
inline std::vector<Point3> candidate_grid(int n, const AvailabilityConfig& cfg = {}) {
    const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (n < 1 || s * s != n) throw DomainError("deploy", "candidate count must be a positive perfect square");
    const double half = 0.5 * cfg.ceiling_side_m;
    auto coord = [&](int i) { return s == 1 ? 0.0 : -half + cfg.ceiling_side_m * i / (s - 1); };
    std::vector<Point3> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) out.push_back({coord(c), coord(r), cfg.ceiling_height_m});
    return out;
}

/// P(SNR > threshold) over a link of 3D length d, mixing LOS and NLOS.
inline double link_availability(double distance_3d_m, const AvailabilityConfig& cfg) {
    if (!(distance_3d_m > 0.0)) throw DomainError("deploy", "link length must be > 0");
    const double tau = cfg.radio.tau();
    const double theta = std::pow(10.0, cfg.snr_threshold_db / 10.0);
    auto tail = [&](const channel::ScenarioParams& s) {
        const double mean_snr = tau * channel::path_gain(s.path_loss, distance_3d_m);
        return channel::kappa_mu_power_ccdf(s.fading, theta / mean_snr);
    };
    double p = 0.0;
    if (cfg.p_los > 0.0) p += cfg.p_los * tail(cfg.scenario.los);
    if (cfg.p_los < 1.0) p += (1.0 - cfg.p_los) * tail(cfg.scenario.nlos);
    return std::clamp(p, 0.0, 1.0);
}

struct AvailabilityMatrix {
    std::vector<Point3> candidates;
    int n_areas = 0;
    std::vector<double> p;  // row-major, candidates x areas

    int n_candidates() const { return static_cast<int>(candidates.size()); }
    double operator()(int n, int k) const { return p.at(static_cast<std::size_t>(n) * n_areas + k); }
    double& at(int n, int k) { return p.at(static_cast<std::size_t>(n) * n_areas + k); }
};

inline AvailabilityMatrix availability_matrix(const FloorTessellation& t, int n_candidates,
                                              const AvailabilityConfig& cfg = {}) {
    cfg.validate();
    AvailabilityMatrix m;
    m.candidates = candidate_grid(n_candidates, cfg);
    m.n_areas = static_cast<int>(t.areas.size());
    m.p.resize(m.candidates.size() * t.areas.size());
    for (int n = 0; n < m.n_candidates(); ++n)
        for (int k = 0; k < m.n_areas; ++k) {
            const auto& c = m.candidates[static_cast<std::size_t>(n)];
            const auto& a = t.areas[static_cast<std::size_t>(k)];
            const double dz = c[2] - cfg.user_height_m;
            const double d = std::sqrt((c[0] - a.x) * (c[0] - a.x) + (c[1] - a.y) * (c[1] - a.y) + dz * dz);
            m.at(n, k) = link_availability(d, cfg);
        }
    return m;
}

/// One candidate link of an area.
struct CandidateLink {
    int ap = 0;
    double p = 0.0;
};

/// For every area, its `limit` most available candidates (ties by index),
/// dropping links with zero availability.
inline std::vector<std::vector<CandidateLink>> best_candidates(const AvailabilityMatrix& m, int limit = 3) {
    if (limit < 1) throw DomainError("deploy", "candidate limit must be >= 1");
    std::vector<std::vector<CandidateLink>> out(static_cast<std::size_t>(m.n_areas));
    for (int k = 0; k < m.n_areas; ++k) {
        std::vector<CandidateLink> all;
        for (int n = 0; n < m.n_candidates(); ++n)
            if (m(n, k) > 0.0) all.push_back({n, m(n, k)});
        std::stable_sort(all.begin(), all.end(), [](const CandidateLink& a, const CandidateLink& b) { return a.p > b.p; });
        if (static_cast<int>(all.size()) > limit) all.resize(static_cast<std::size_t>(limit));
        std::sort(all.begin(), all.end(), [](const CandidateLink& a, const CandidateLink& b) { return a.ap < b.ap; });
        out[static_cast<std::size_t>(k)] = std::move(all);
    }
    return out;
}

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_AVAILABILITY_HPP
