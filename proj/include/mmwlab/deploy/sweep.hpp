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

#ifndef MMWLAB_DEPLOY_SWEEP_HPP
#define MMWLAB_DEPLOY_SWEEP_HPP

// Required number of APs over coverage targets, beam budgets, user
// distributions and candidate grids, plus text I/O for instances and plans.
//
// Every plan found during a sweep is kept and offered as a starting
// incumbent to later solves on the same grid (and, moved to the nearest
// candidates, on finer grids). Targets are visited in decreasing order and
// budgets in increasing order, so a plan for (B, beta) is always feasible
// for (B, beta' < beta) and for (B' > B, beta): the reported counts cannot
// rise with B or fall with beta even when a solve stops at its node limit.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwlab/deploy/availability.hpp"
#include "mmwlab/deploy/model.hpp"
#include "mmwlab/deploy/solver.hpp"
#include "mmwlab/deploy/tessellation.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::deploy {

struct DeploySweepConfig {
    double floor_radius_m = 5.5;
    double circle_radius_m = 0.5;
    double sigma_m = 10.0;
    AvailabilityConfig availability;
    int candidate_limit = 3;
    std::vector<double> betas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<int> beams{1, 2, 3, 4};
    std::vector<UserDistributionKind> distributions{UserDistributionKind::Uniform,
                                                    UserDistributionKind::TruncatedGaussian};
    std::vector<int> candidate_counts{100};
    SolveOptions solve;

    void validate() const {
        availability.validate();
        if (betas.empty() || beams.empty() || distributions.empty() || candidate_counts.empty())
            throw DomainError("deploy", "sweep axes must not be empty");
        for (double b : betas)
            if (!(b >= 0.0 && b <= 1.0)) throw DomainError("deploy", "coverage targets must lie in [0, 1]");
        for (int b : beams)
            if (b < 1) throw DomainError("deploy", "beam budgets must be >= 1");
        for (int n : candidate_counts) candidate_grid(n, availability);
        if (!(sigma_m > 0.0)) throw DomainError("deploy", "sigma must be > 0");
        tessellate(floor_radius_m, circle_radius_m);
    }
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Unknown };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unknown: return "unknown";
    }
    return "unknown";
}

struct DeploySweepRow {
    UserDistributionKind distribution = UserDistributionKind::TruncatedGaussian;
    int n_candidates = 0;
    int beams = 1;
    double beta = 0.0;
    SolveStatus status = SolveStatus::Unknown;
    int required_aps = -1;  // -1 unless a plan was found
    double coverage = 0.0;
    int lower_bound = 0;
    long nodes = 0;
};

struct DeploySweepTable {
    std::vector<DeploySweepRow> rows;

    const DeploySweepRow* find(UserDistributionKind d, int n, int b, double beta) const {
        for (const auto& r : rows)
            if (r.distribution == d && r.n_candidates == n && r.beams == b && std::fabs(r.beta - beta) < 1e-12)
                return &r;
        return nullptr;
    }
};

/// Moves a plan onto another candidate grid: every active candidate is
/// replaced by the nearest candidate of the target instance and links that
/// are not among the target's candidate sets are dropped.
inline LinkSelection project_plan(const DeploymentInstance& from, const DeploymentPlan& plan,
                                  const DeploymentInstance& to) {
    if (from.locations.empty() || to.locations.empty())
        throw DomainError("deploy", "projection needs candidate locations");
    auto sel = empty_selection(to);
    for (const auto& [ap, area] : plan.assignments) {
        const auto& p = from.locations.at(static_cast<std::size_t>(ap));
        int best = -1;
        double bd = 0.0;
        for (int n = 0; n < to.n_candidates; ++n) {
            const auto& q = to.locations[static_cast<std::size_t>(n)];
            const double d = std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
            if (best < 0 || d < bd - 1e-12) best = n, bd = d;
        }
        const auto& l = to.links.at(static_cast<std::size_t>(area));
        for (std::size_t s = 0; s < l.size(); ++s)
            if (l[s].ap == best) sel[static_cast<std::size_t>(area)][s] = 1;
    }
    // Two source candidates may land on the same target: respect the budget.
    auto counts = beam_counts(to, sel);
    for (std::size_t k = sel.size(); k-- > 0;)
        for (std::size_t s = 0; s < sel[k].size(); ++s) {
            auto& c = counts[static_cast<std::size_t>(to.links[k][s].ap)];
            if (sel[k][s] && c > to.beams) {
                sel[k][s] = 0;
                --c;
            }
        }
    return sel;
}

inline DeploySweepTable sweep_required_aps(const DeploySweepConfig& cfg) {
    cfg.validate();
    const auto tess = tessellate(cfg.floor_radius_m, cfg.circle_radius_m);
    std::map<UserDistributionKind, std::vector<double>> weights;
    for (auto kind : cfg.distributions) weights[kind] = area_weights(tess, UserDistribution{kind, cfg.sigma_m});

    auto counts = cfg.candidate_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    auto beams = cfg.beams;
    std::sort(beams.begin(), beams.end());
    beams.erase(std::unique(beams.begin(), beams.end()), beams.end());
    auto betas = cfg.betas;
    std::sort(betas.begin(), betas.end(), std::greater<>());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

    DeploySweepTable table;
    DeploymentInstance coarse;
    std::vector<DeploymentPlan> coarse_plans;
    for (int n : counts) {
        const auto avail = availability_matrix(tess, n, cfg.availability);
        std::vector<DeploymentPlan> pool;
        std::vector<DeploySweepRow> pool_rows;
        std::vector<LinkSelection> projected;
        DeploymentInstance shape;
        for (auto kind : cfg.distributions)
            for (int b : beams)
                for (double beta : betas) {
                    const auto inst = make_instance(avail, weights[kind], b, beta, cfg.candidate_limit);
                    if (shape.links.empty()) {
                        shape = inst;
                        for (const auto& p : coarse_plans) projected.push_back(project_plan(coarse, p, inst));
                    }
                    // Plans feasible as they are, plus repair seeds: the same
                    // point under other distributions and the coarser grids.
                    std::vector<LinkSelection> warm;
                    for (std::size_t i = 0; i < pool.size(); ++i) {
                        auto sel = selection_from_plan(inst, pool[i]);
                        const auto& at = pool_rows[i];
                        const bool seed = at.beams == b && std::fabs(at.beta - beta) < 1e-12;
                        if (seed || selection_feasible(inst, sel, kCoverageTol)) warm.push_back(std::move(sel));
                    }
                    for (const auto& s : projected) warm.push_back(s);

                    DeploySweepRow row;
                    row.distribution = kind;
                    row.n_candidates = n;
                    row.beams = b;
                    row.beta = beta;
                    try {
                        const auto plan = solve_blp(build_blp(inst), cfg.solve, warm);
                        row.nodes = plan.nodes;
                        row.lower_bound = plan.lower_bound;
                        if (plan.feasible) {
                            row.status = plan.proven_optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
                            row.required_aps = plan.objective;
                            row.coverage = plan.coverage;
                            pool.push_back(plan);
                            pool_rows.push_back(row);
                        }
                    } catch (const InfeasibleError&) {
                        row.status = SolveStatus::Infeasible;
                    }
                    table.rows.push_back(row);
                }
        coarse = shape;
        coarse_plans = pool;
    }
    return table;
}

inline void write_deploy_table(std::ostream& os, const DeploySweepTable& t, const DeploySweepConfig& cfg) {
    std::ostringstream s;
    s << std::setprecision(10);
    s << "# floor_radius_m " << cfg.floor_radius_m << "\n# circle_radius_m " << cfg.circle_radius_m
      << "\n# snr_threshold_db " << cfg.availability.snr_threshold_db << "\n# node_limit " << cfg.solve.node_limit
      << "\n";
    s << "distribution,n_candidates,beams,beta,status,required_aps,coverage,lower_bound,nodes\n";
    for (const auto& r : t.rows)
        s << to_string(r.distribution) << "," << r.n_candidates << "," << r.beams << "," << r.beta << ","
          << to_string(r.status) << "," << r.required_aps << "," << r.coverage << "," << r.lower_bound << ","
          << r.nodes << "\n";
    os << s.str();
}

// --- JSON ----------------------------------------------------------------------

inline nlohmann::json to_json(const DeploymentInstance& inst) {
    nlohmann::json j;
    j["n_candidates"] = inst.n_candidates;
    j["beams"] = inst.beams;
    j["beta"] = inst.beta;
    j["weights"] = inst.weights;
    nlohmann::json links = nlohmann::json::array();
    for (const auto& area : inst.links) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& l : area) a.push_back({{"ap", l.ap}, {"p", l.p}});
        links.push_back(a);
    }
    j["links"] = links;
    nlohmann::json loc = nlohmann::json::array();
    for (const auto& p : inst.locations) loc.push_back({p[0], p[1], p[2]});
    j["locations"] = loc;
    return j;
}

inline DeploymentInstance instance_from_json(const nlohmann::json& j) {
    try {
        DeploymentInstance inst;
        inst.n_candidates = j.at("n_candidates").get<int>();
        inst.beams = j.at("beams").get<int>();
        inst.beta = j.at("beta").get<double>();
        inst.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& area : j.at("links")) {
            std::vector<CandidateLink> l;
            for (const auto& e : area) l.push_back({e.at("ap").get<int>(), e.at("p").get<double>()});
            inst.links.push_back(std::move(l));
        }
        if (j.contains("locations"))
            for (const auto& p : j.at("locations")) inst.locations.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
        inst.validate();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("deploy", std::string("malformed instance: ") + e.what());
    }
}

inline nlohmann::json to_json(const DeploymentPlan& p) {
    nlohmann::json j;
    j["feasible"] = p.feasible;
    j["objective"] = p.objective;
    j["coverage"] = p.coverage;
    j["active_aps"] = p.active_aps;
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [ap, area] : p.assignments) a.push_back({ap, area});
    j["assignments"] = a;
    j["proven_optimal"] = p.proven_optimal;
    j["lower_bound"] = p.lower_bound;
    j["gap"] = p.gap;
    j["nodes"] = p.nodes;
    return j;
}

inline DeploymentPlan plan_from_json(const nlohmann::json& j) {
    try {
        DeploymentPlan p;
        p.feasible = j.at("feasible").get<bool>();
        p.objective = j.at("objective").get<int>();
        p.coverage = j.at("coverage").get<double>();
        p.active_aps = j.at("active_aps").get<std::vector<int>>();
        for (const auto& e : j.at("assignments")) p.assignments.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        p.proven_optimal = j.value("proven_optimal", false);
        p.lower_bound = j.value("lower_bound", 0);
        p.gap = j.value("gap", 0.0);
        p.nodes = j.value("nodes", 0L);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("deploy", std::string("malformed plan: ") + e.what());
    }
}

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_SWEEP_HPP
