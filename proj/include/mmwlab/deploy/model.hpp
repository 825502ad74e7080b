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

#ifndef MMWLAB_DEPLOY_MODEL_HPP
#define MMWLAB_DEPLOY_MODEL_HPP

// Placement instance, coverage evaluation and the 0-1 linear model.
//
// Coverage of a beam selection y is 1 - sum_k w_k prod_n (1 - p_nk y_nk).
// Expanding each product over the subsets S of an area's links gives
//   1 - sum_k w_k - sum_k w_k sum_{S != {}} (-1)^|S| prod_{n in S} p_nk y_nk,
// and every product of two or more binaries becomes an auxiliary variable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmwlab/deploy/availability.hpp"
#include "mmwlab/deploy/tessellation.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::deploy {

struct DeploymentInstance {
    int n_candidates = 0;
    std::vector<double> weights;                    // per area
    std::vector<std::vector<CandidateLink>> links;  // per area, ascending ap
    int beams = 1;                                  // per-AP beam budget
    double beta = 0.5;                              // coverage target
    std::vector<Point3> locations;                  // optional, per candidate

    int n_areas() const { return static_cast<int>(weights.size()); }

    int n_links() const {
        int n = 0;
        for (const auto& l : links) n += static_cast<int>(l.size());
        return n;
    }

    void validate() const {
        if (n_candidates < 0) throw DomainError("deploy", "negative candidate count");
        if (links.size() != weights.size()) throw DomainError("deploy", "links and weights differ in length");
        if (beams < 1) throw DomainError("deploy", "beam budget must be >= 1");
        if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("deploy", "coverage target must lie in [0, 1]");
        if (!locations.empty() && static_cast<int>(locations.size()) != n_candidates)
            throw DomainError("deploy", "location count differs from candidate count");
        for (std::size_t k = 0; k < links.size(); ++k) {
            if (!(weights[k] >= 0.0)) throw DomainError("deploy", "area weights must be >= 0");
            for (std::size_t i = 0; i < links[k].size(); ++i) {
                const auto& l = links[k][i];
                if (l.ap < 0 || l.ap >= n_candidates) throw DomainError("deploy", "link refers to an unknown candidate");
                if (!(l.p >= 0.0 && l.p <= 1.0)) throw DomainError("deploy", "link availability outside [0, 1]");
                if (i > 0 && links[k][i - 1].ap >= l.ap)
                    throw DomainError("deploy", "links of an area must be sorted by candidate without repeats");
            }
        }
    }
};

inline DeploymentInstance make_instance(const AvailabilityMatrix& m, std::vector<double> weights, int beams,
                                        double beta, int candidate_limit = 3) {
    if (static_cast<int>(weights.size()) != m.n_areas) throw DomainError("deploy", "one weight per area expected");
    DeploymentInstance inst;
    inst.n_candidates = m.n_candidates();
    inst.weights = std::move(weights);
    inst.links = best_candidates(m, candidate_limit);
    inst.beams = beams;
    inst.beta = beta;
    inst.locations = m.candidates;
    inst.validate();
    return inst;
}

/// Beam selection aligned with instance.links: sel[k][i] != 0 means the
/// i-th candidate link of area k is served.
using LinkSelection = std::vector<std::vector<char>>;

inline LinkSelection empty_selection(const DeploymentInstance& inst) {
    LinkSelection s(inst.links.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k].assign(inst.links[k].size(), 0);
    return s;
}

inline double coverage_probability(const DeploymentInstance& inst, const LinkSelection& sel) {
    if (sel.size() != inst.links.size()) throw DomainError("deploy", "selection does not match the instance");
    double miss = 0.0;
    for (std::size_t k = 0; k < sel.size(); ++k) {
        if (sel[k].size() != inst.links[k].size()) throw DomainError("deploy", "selection does not match the instance");
        double q = 1.0;
        for (std::size_t i = 0; i < sel[k].size(); ++i)
            if (sel[k][i]) q *= 1.0 - inst.links[k][i].p;
        miss += inst.weights[k] * q;
    }
    return 1.0 - miss;
}

/// Beams used by each candidate.
inline std::vector<int> beam_counts(const DeploymentInstance& inst, const LinkSelection& sel) {
    std::vector<int> c(static_cast<std::size_t>(inst.n_candidates), 0);
    for (std::size_t k = 0; k < sel.size(); ++k)
        for (std::size_t i = 0; i < sel[k].size(); ++i)
            if (sel[k][i]) ++c[static_cast<std::size_t>(inst.links[k][i].ap)];
    return c;
}

struct DeploymentPlan {
    bool feasible = false;
    std::vector<int> active_aps;                   // ascending
    std::vector<std::pair<int, int>> assignments;  // (candidate, area)
    double coverage = 0.0;
    int objective = 0;
    bool proven_optimal = false;
    int lower_bound = 0;
    double gap = 0.0;
    long nodes = 0;
};

inline DeploymentPlan plan_from_selection(const DeploymentInstance& inst, const LinkSelection& sel) {
    DeploymentPlan p;
    const auto counts = beam_counts(inst, sel);
    for (int n = 0; n < inst.n_candidates; ++n)
        if (counts[static_cast<std::size_t>(n)] > 0) p.active_aps.push_back(n);
    for (std::size_t k = 0; k < sel.size(); ++k)
        for (std::size_t i = 0; i < sel[k].size(); ++i)
            if (sel[k][i]) p.assignments.emplace_back(inst.links[k][i].ap, static_cast<int>(k));
    std::sort(p.assignments.begin(), p.assignments.end());
    p.coverage = coverage_probability(inst, sel);
    p.objective = static_cast<int>(p.active_aps.size());
    return p;
}

inline LinkSelection selection_from_plan(const DeploymentInstance& inst, const DeploymentPlan& plan) {
    auto sel = empty_selection(inst);
    for (const auto& [ap, area] : plan.assignments) {
        if (area < 0 || area >= inst.n_areas()) throw DomainError("deploy", "plan refers to an unknown area");
        const auto& l = inst.links[static_cast<std::size_t>(area)];
        auto it = std::find_if(l.begin(), l.end(), [ap = ap](const CandidateLink& c) { return c.ap == ap; });
        if (it == l.end()) throw DomainError("deploy", "plan uses a link outside the candidate sets");
        sel[static_cast<std::size_t>(area)][static_cast<std::size_t>(it - l.begin())] = 1;
    }
    return sel;
}

/// Beam budget respected and coverage target met (up to `tol`).
inline bool selection_feasible(const DeploymentInstance& inst, const LinkSelection& sel, double tol = 1e-12) {
    for (int c : beam_counts(inst, sel))
        if (c > inst.beams) return false;
    return coverage_probability(inst, sel) >= inst.beta - tol;
}

// --- 0-1 linear model -----------------------------------------------------

enum class VarKind { Open, Beam, Product };
enum class RowSense { LessEqual, GreaterEqual };
enum class RowRole { BeamBudget, OpenNeedsBeam, ProductUpper, ProductLower, Coverage };

struct BlpVariable {
    VarKind kind = VarKind::Open;
    int ap = -1;               // Open, Beam
    int area = -1;             // Beam, Product
    int slot = -1;             // Beam: index into links[area]
    std::vector<int> factors;  // Product: indices of the Beam variables
};

struct BlpRow {
    std::vector<std::pair<int, double>> terms;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
    RowRole role = RowRole::BeamBudget;
};

struct BlpModel {
    DeploymentInstance instance;
    int n_candidates = 0;
    int beams = 1;
    double beta = 0.0;
    std::vector<BlpVariable> vars;
    std::vector<double> cost;
    std::vector<BlpRow> rows;
    int coverage_row = -1;
    double coverage_constant = 0.0;          // 1 - sum_k w_k
    std::vector<int> open_var;               // per candidate, -1 without links
    std::vector<std::vector<int>> beam_var;  // per area, aligned with links

    int n_vars() const { return static_cast<int>(vars.size()); }
};

struct BlpOptions {
    // Areas may list at most this many links. Three keeps the auxiliary
    // count at four per area; five is meant for small validation runs only.
    int max_links_per_area = 3;
};

inline BlpModel build_blp(const DeploymentInstance& inst, const BlpOptions& opt = {}) {
    inst.validate();
    if (opt.max_links_per_area < 1 || opt.max_links_per_area > 5)
        throw CapacityError("deploy", "links per area must be configured between 1 and 5");
    BlpModel m;
    m.instance = inst;
    m.n_candidates = inst.n_candidates;
    m.beams = inst.beams;
    m.beta = inst.beta;
    m.open_var.assign(static_cast<std::size_t>(inst.n_candidates), -1);
    m.beam_var.resize(inst.links.size());

    std::vector<char> used(static_cast<std::size_t>(inst.n_candidates), 0);
    for (std::size_t k = 0; k < inst.links.size(); ++k) {
        if (static_cast<int>(inst.links[k].size()) > opt.max_links_per_area)
            throw CapacityError("deploy", "area " + std::to_string(k) + " has " + std::to_string(inst.links[k].size()) +
                                              " candidate links; the model admits at most " +
                                              std::to_string(opt.max_links_per_area));
        for (const auto& l : inst.links[k]) used[static_cast<std::size_t>(l.ap)] = 1;
    }
    for (int n = 0; n < inst.n_candidates; ++n) {
        if (!used[static_cast<std::size_t>(n)]) continue;
        m.open_var[static_cast<std::size_t>(n)] = m.n_vars();
        m.vars.push_back({VarKind::Open, n, -1, -1, {}});
        m.cost.push_back(1.0);
    }
    std::vector<std::vector<int>> beams_of_ap(static_cast<std::size_t>(inst.n_candidates));
    for (std::size_t k = 0; k < inst.links.size(); ++k)
        for (std::size_t i = 0; i < inst.links[k].size(); ++i) {
            const int ap = inst.links[k][i].ap;
            m.beam_var[k].push_back(m.n_vars());
            beams_of_ap[static_cast<std::size_t>(ap)].push_back(m.n_vars());
            m.vars.push_back({VarKind::Beam, ap, static_cast<int>(k), static_cast<int>(i), {}});
            m.cost.push_back(0.0);
        }

    // sum_k y_nk <= B x_n and x_n <= sum_k y_nk
    for (int n = 0; n < inst.n_candidates; ++n) {
        const int x = m.open_var[static_cast<std::size_t>(n)];
        if (x < 0) continue;
        BlpRow budget{{}, RowSense::LessEqual, 0.0, RowRole::BeamBudget};
        BlpRow needs{{{x, 1.0}}, RowSense::LessEqual, 0.0, RowRole::OpenNeedsBeam};
        for (int y : beams_of_ap[static_cast<std::size_t>(n)]) {
            budget.terms.emplace_back(y, 1.0);
            needs.terms.emplace_back(y, -1.0);
        }
        budget.terms.emplace_back(x, -static_cast<double>(inst.beams));
        m.rows.push_back(std::move(budget));
        m.rows.push_back(std::move(needs));
    }

    BlpRow cov{{}, RowSense::GreaterEqual, 0.0, RowRole::Coverage};
    double wsum = 0.0;
    for (std::size_t k = 0; k < inst.links.size(); ++k) {
        const double w = inst.weights[k];
        wsum += w;
        const auto& l = inst.links[k];
        const std::uint32_t c = static_cast<std::uint32_t>(l.size());
        for (std::uint32_t mask = 1; mask < (1u << c); ++mask) {
            double prod = 1.0;
            std::vector<int> f;
            for (std::uint32_t i = 0; i < c; ++i)
                if (mask & (1u << i)) {
                    prod *= l[i].p;
                    f.push_back(m.beam_var[k][i]);
                }
            const double sign = (f.size() % 2 == 1) ? 1.0 : -1.0;
            if (f.size() == 1) {
                cov.terms.emplace_back(f[0], sign * w * prod);
                continue;
            }
            const int z = m.n_vars();
            m.vars.push_back({VarKind::Product, -1, static_cast<int>(k), -1, f});
            m.cost.push_back(0.0);
            cov.terms.emplace_back(z, sign * w * prod);
            // z <= y_i for each factor; z >= sum y_i - (|S| - 1)
            for (int y : f) m.rows.push_back({{{z, 1.0}, {y, -1.0}}, RowSense::LessEqual, 0.0, RowRole::ProductUpper});
            BlpRow lower{{{z, 1.0}}, RowSense::GreaterEqual, 1.0 - static_cast<double>(f.size()), RowRole::ProductLower};
            for (int y : f) lower.terms.emplace_back(y, -1.0);
            m.rows.push_back(std::move(lower));
        }
    }
    m.coverage_constant = 1.0 - wsum;
    cov.rhs = inst.beta - m.coverage_constant;
    m.coverage_row = static_cast<int>(m.rows.size());
    m.rows.push_back(std::move(cov));
    return m;
}

/// Variable vector of a selection: y from the selection, x_n = [n serves a
/// beam], auxiliaries equal to the products they stand for.
inline std::vector<double> model_point(const BlpModel& m, const LinkSelection& sel) {
    std::vector<double> v(static_cast<std::size_t>(m.n_vars()), 0.0);
    for (std::size_t k = 0; k < m.beam_var.size(); ++k)
        for (std::size_t i = 0; i < m.beam_var[k].size(); ++i)
            v[static_cast<std::size_t>(m.beam_var[k][i])] = sel.at(k).at(i) ? 1.0 : 0.0;
    for (int j = 0; j < m.n_vars(); ++j) {
        const auto& var = m.vars[static_cast<std::size_t>(j)];
        if (var.kind == VarKind::Product) {
            double p = 1.0;
            for (int f : var.factors) p *= v[static_cast<std::size_t>(f)];
            v[static_cast<std::size_t>(j)] = p;
        } else if (var.kind == VarKind::Beam && v[static_cast<std::size_t>(j)] > 0.5) {
            v[static_cast<std::size_t>(m.open_var[static_cast<std::size_t>(var.ap)])] = 1.0;
        }
    }
    return v;
}

/// Left side of the coverage row plus its constant: the linear coverage.
inline double linear_coverage(const BlpModel& m, const std::vector<double>& v) {
    double s = m.coverage_constant;
    for (const auto& [j, a] : m.rows[static_cast<std::size_t>(m.coverage_row)].terms) s += a * v.at(static_cast<std::size_t>(j));
    return s;
}

inline double row_activity(const BlpRow& r, const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& [j, a] : r.terms) s += a * v.at(static_cast<std::size_t>(j));
    return s;
}

/// Every row satisfied within `tol` and all variables binary.
inline bool model_feasible(const BlpModel& m, const std::vector<double>& v, double tol = 1e-12) {
    for (double x : v)
        if (x != 0.0 && x != 1.0) return false;
    for (const auto& r : m.rows) {
        const double a = row_activity(r, v);
        if (r.sense == RowSense::LessEqual ? a > r.rhs + tol : a < r.rhs - tol) return false;
    }
    return true;
}

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_MODEL_HPP
