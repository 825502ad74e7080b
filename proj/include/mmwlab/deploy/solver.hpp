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

#ifndef MMWLAB_DEPLOY_SOLVER_HPP
#define MMWLAB_DEPLOY_SOLVER_HPP

// Exact solvers for the placement model: depth-first branch-and-bound over
// the LP relaxation, a greedy incumbent, and exhaustive enumeration for
// small instances.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmwlab/deploy/model.hpp"
#include "mmwlab/deploy/simplex.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::deploy {

/// Slack allowed on the coverage target when a plan is accepted. Both the
/// search and the enumeration use it so that their optima are comparable.
inline constexpr double kCoverageTol = 1e-9;

/// Coverage with every candidate link switched on, ignoring beam budgets.
inline double coverage_upper_bound(const DeploymentInstance& inst) {
    auto sel = empty_selection(inst);
    for (auto& s : sel) std::fill(s.begin(), s.end(), 1);
    return coverage_probability(inst, sel);
}

// --- greedy ---------------------------------------------------------------

namespace detail {

struct GreedyState {
    const DeploymentInstance& inst;
    LinkSelection sel;
    std::vector<double> miss;  // prod (1 - p) over the served links of each area
    std::vector<int> count;
    double coverage;

    explicit GreedyState(const DeploymentInstance& i)
        : inst(i), sel(empty_selection(i)), miss(i.links.size(), 1.0),
          count(static_cast<std::size_t>(i.n_candidates), 0), coverage(coverage_probability(i, sel)) {}

    double gain(std::size_t k, std::size_t s) const {
        return sel[k][s] ? 0.0 : inst.weights[k] * miss[k] * inst.links[k][s].p;
    }

    void set(std::size_t k, std::size_t s, bool on) {
        if (static_cast<bool>(sel[k][s]) == on) return;
        sel[k][s] = on ? 1 : 0;
        count[static_cast<std::size_t>(inst.links[k][s].ap)] += on ? 1 : -1;
        double q = 1.0;
        for (std::size_t i = 0; i < sel[k].size(); ++i)
            if (sel[k][i]) q *= 1.0 - inst.links[k][i].p;
        coverage += inst.weights[k] * (miss[k] - q);
        miss[k] = q;
    }

    bool met() const { return coverage >= inst.beta - kCoverageTol; }

    double loss(std::size_t k, std::size_t s) const {
        if (!sel[k][s]) return 0.0;
        const double p = inst.links[k][s].p;
        if (p >= 1.0) {
            double q = 1.0;
            for (std::size_t i = 0; i < sel[k].size(); ++i)
                if (sel[k][i] && i != s) q *= 1.0 - inst.links[k][i].p;
            return inst.weights[k] * q;
        }
        return inst.weights[k] * miss[k] * p / (1.0 - p);
    }

    /// Spend free beams of open candidates and move beams of open candidates
    /// between areas, best coverage change first, until the target is met
    /// or no move helps.
    void improve() {
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_ap(count.size());
        for (std::size_t k = 0; k < sel.size(); ++k)
            for (std::size_t s = 0; s < sel[k].size(); ++s)
                by_ap[static_cast<std::size_t>(inst.links[k][s].ap)].push_back({k, s});
        for (long guard = 0; !met() && guard < 100000; ++guard) {
            double best = 1e-15;
            std::pair<std::size_t, std::size_t> add{}, drop{};
            bool found = false, with_drop = false;
            for (std::size_t n = 0; n < by_ap.size(); ++n) {
                if (count[n] == 0) continue;
                for (const auto& [k2, s2] : by_ap[n]) {
                    if (sel[k2][s2]) continue;
                    const double g = gain(k2, s2);
                    if (count[n] < inst.beams) {
                        if (g > best) best = g, add = {k2, s2}, found = true, with_drop = false;
                        continue;
                    }
                    for (const auto& [k1, s1] : by_ap[n]) {
                        if (!sel[k1][s1] || k1 == k2) continue;
                        const double delta = g - loss(k1, s1);
                        if (delta > best) best = delta, add = {k2, s2}, drop = {k1, s1}, found = true, with_drop = true;
                    }
                }
            }
            // Hand the only beam of an open candidate to a closed one.
            for (std::size_t n = 0; n < by_ap.size(); ++n) {
                if (count[n] != 1) continue;
                for (const auto& [k1, s1] : by_ap[n]) {
                    if (!sel[k1][s1]) continue;
                    const double l1 = loss(k1, s1);
                    for (std::size_t k2 = 0; k2 < sel.size(); ++k2)
                        for (std::size_t s2 = 0; s2 < sel[k2].size(); ++s2) {
                            if (k2 == k1 || count[static_cast<std::size_t>(inst.links[k2][s2].ap)] != 0) continue;
                            const double delta = gain(k2, s2) - l1;
                            if (delta > best) best = delta, add = {k2, s2}, drop = {k1, s1}, found = true, with_drop = true;
                        }
                }
            }
            if (!found) return;
            if (with_drop) set(drop.first, drop.second, false);
            set(add.first, add.second, true);
        }
    }

    /// Links of one closed candidate in descending gain, at most B of them.
    std::vector<std::pair<std::size_t, std::size_t>> best_links(int ap, double* total) const {
        std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> g;
        for (std::size_t k = 0; k < sel.size(); ++k)
            for (std::size_t s = 0; s < sel[k].size(); ++s)
                if (inst.links[k][s].ap == ap && gain(k, s) > 0.0) g.push_back({gain(k, s), {k, s}});
        std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        if (static_cast<int>(g.size()) > inst.beams) g.resize(static_cast<std::size_t>(inst.beams));
        *total = 0.0;
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& e : g) {
            *total += e.first;
            out.push_back(e.second);
        }
        return out;
    }
};

} // namespace detail

namespace detail {

// Close candidates, least useful first, repairing coverage with the
// remaining ones; repeat while some closure succeeds.
inline void close_redundant(GreedyState& st) {
    const auto& inst = st.inst;
    for (bool closed = true; closed;) {
        closed = false;
        std::vector<std::pair<double, int>> order;
        for (int n = 0; n < inst.n_candidates; ++n) {
            if (st.count[static_cast<std::size_t>(n)] == 0) continue;
            double loss = 0.0;
            for (std::size_t k = 0; k < st.sel.size(); ++k)
                for (std::size_t s = 0; s < st.sel[k].size(); ++s)
                    if (st.sel[k][s] && inst.links[k][s].ap == n) loss += st.loss(k, s);
            order.push_back({loss, n});
        }
        std::stable_sort(order.begin(), order.end());
        for (const auto& entry : order) {
            const int n = entry.second;
            const LinkSelection saved = st.sel;
            for (std::size_t k = 0; k < st.sel.size(); ++k)
                for (std::size_t s = 0; s < st.sel[k].size(); ++s)
                    if (inst.links[k][s].ap == n) st.set(k, s, false);
            st.improve();
            if (st.met()) {
                closed = true;
                continue;
            }
            for (std::size_t k = 0; k < saved.size(); ++k)
                for (std::size_t s = 0; s < saved[k].size(); ++s) st.set(k, s, saved[k][s] != 0);
        }
    }
}

} // namespace detail

/// Greedy plan: improve with open candidates, else open the candidate whose
/// best B links gain most; afterwards try to close candidates one by one.
/// Starting from `start` turns it into a repair of a given selection.
/// Returns no value when the greedy cannot reach the target.
inline std::optional<LinkSelection> greedy_selection(const DeploymentInstance& inst,
                                                     const LinkSelection* start = nullptr) {
    detail::GreedyState st(inst);
    if (start) {
        auto counts = std::vector<int>(static_cast<std::size_t>(inst.n_candidates), 0);
        for (std::size_t k = 0; k < start->size(); ++k)
            for (std::size_t s = 0; s < (*start)[k].size(); ++s) {
                auto& c = counts[static_cast<std::size_t>(inst.links[k][s].ap)];
                if ((*start)[k][s] && c < inst.beams) {
                    ++c;
                    st.set(k, s, true);
                }
            }
    }
    while (!st.met()) {
        st.improve();
        if (st.met()) break;
        int best_ap = -1;
        double best = 0.0;
        for (int n = 0; n < inst.n_candidates; ++n) {
            if (st.count[static_cast<std::size_t>(n)] > 0) continue;
            double g;
            st.best_links(n, &g);
            if (g > best) best = g, best_ap = n;
        }
        if (best_ap < 0) return std::nullopt;
        double g;
        for (const auto& [k, s] : st.best_links(best_ap, &g)) st.set(k, s, true);
    }
    detail::close_redundant(st);
    return st.sel;
}

/// Rounds fractional link values: links are taken in decreasing order of
/// `score` (aligned with the selection) while budgets allow and until the
/// target is met, then redundant candidates are closed.
inline std::optional<LinkSelection> rounded_selection(const DeploymentInstance& inst,
                                                      const std::vector<std::vector<double>>& score) {
    detail::GreedyState st(inst);
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> order;
    for (std::size_t k = 0; k < inst.links.size(); ++k)
        for (std::size_t s = 0; s < inst.links[k].size(); ++s)
            if (score[k][s] > 1e-9) order.push_back({score[k][s], {k, s}});
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& e : order) {
        if (st.met()) break;
        const auto [k, s] = e.second;
        if (st.count[static_cast<std::size_t>(inst.links[k][s].ap)] < inst.beams) st.set(k, s, true);
    }
    if (!st.met()) st.improve();
    if (!st.met()) return std::nullopt;
    detail::close_redundant(st);
    return st.sel;
}

// --- branch and bound -------------------------------------------------------

struct SolveOptions {
    long node_limit = 20000;    // LP solves; keeps results machine independent
    double time_limit_s = 0.0;  // wall clock, 0 = none
    bool link_rows = true;      // add y_nk <= x_n to the relaxation
    int rounding_interval = 25; // LP rounding heuristic every this many nodes
    bool up_first = true;       // explore the x = 1 / y = 1 child first
    SimplexOptions simplex;
};

namespace detail {

/// Relaxation handed to the simplex: drops linking rows that can never bind
/// at an optimum, replaces B by min(B, links of the candidate), optionally
/// adds y_nk <= x_n, and scales the coverage row.
struct Relaxation {
    std::vector<SparseRow> rows;
    std::vector<int> branch_order;  // Open variables, then Beam variables
};

inline Relaxation relax(const BlpModel& m, bool link_rows) {
    Relaxation r;
    const auto& cov = m.rows[static_cast<std::size_t>(m.coverage_row)];
    std::vector<double> cov_coef(static_cast<std::size_t>(m.n_vars()), 0.0);
    double scale = 0.0;
    for (const auto& [j, a] : cov.terms) {
        cov_coef[static_cast<std::size_t>(j)] += a;
        scale = std::max(scale, std::fabs(a));
    }
    if (scale == 0.0) scale = 1.0;
    std::vector<int> degree(static_cast<std::size_t>(m.n_candidates), 0);
    for (const auto& v : m.vars)
        if (v.kind == VarKind::Beam) ++degree[static_cast<std::size_t>(v.ap)];
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& row : m.rows) {
        SparseRow s;
        s.terms = row.terms;
        if (row.sense == RowSense::LessEqual)
            s.hi = row.rhs;
        else
            s.lo = row.rhs;
        switch (row.role) {
        case RowRole::BeamBudget: {
            const int x = row.terms.back().first;
            const int deg = degree[static_cast<std::size_t>(m.vars[static_cast<std::size_t>(x)].ap)];
            if (link_rows && m.beams >= deg) continue;
            s.terms.back().second = -static_cast<double>(std::min(m.beams, deg));
            break;
        }
        case RowRole::ProductUpper:
            if (cov_coef[static_cast<std::size_t>(row.terms.front().first)] < 0.0) continue;
            break;
        case RowRole::ProductLower:
            if (cov_coef[static_cast<std::size_t>(row.terms.front().first)] > 0.0) continue;
            break;
        case RowRole::Coverage:
            for (auto& t : s.terms) t.second /= scale;
            s.lo = row.rhs / scale;
            s.hi = inf;
            break;
        case RowRole::OpenNeedsBeam:
            break;
        }
        r.rows.push_back(std::move(s));
    }
    if (link_rows)
        for (int j = 0; j < m.n_vars(); ++j) {
            const auto& v = m.vars[static_cast<std::size_t>(j)];
            if (v.kind != VarKind::Beam) continue;
            SparseRow s;
            s.terms = {{j, 1.0}, {m.open_var[static_cast<std::size_t>(v.ap)], -1.0}};
            s.hi = 0.0;
            r.rows.push_back(std::move(s));
        }
    for (int j = 0; j < m.n_vars(); ++j)
        if (m.vars[static_cast<std::size_t>(j)].kind == VarKind::Open) r.branch_order.push_back(j);
    for (int j = 0; j < m.n_vars(); ++j)
        if (m.vars[static_cast<std::size_t>(j)].kind == VarKind::Beam) r.branch_order.push_back(j);
    return r;
}

class BranchAndBound {
public:
    BranchAndBound(const BlpModel& m, const SolveOptions& opt)
        : m_(m), opt_(opt), relax_(relax(m, opt.link_rows)),
          lp_(m.n_vars(), relax_.rows, std::vector<double>(static_cast<std::size_t>(m.n_vars()), 0.0),
              std::vector<double>(static_cast<std::size_t>(m.n_vars()), 1.0), m.cost, opt.simplex),
          start_(std::chrono::steady_clock::now()) {}

    void offer(const LinkSelection& sel) {
        if (!selection_feasible(m_.instance, sel, kCoverageTol)) return;
        const auto counts = beam_counts(m_.instance, sel);
        const int obj = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
        if (!best_ || obj < best_obj_) {
            best_ = sel;
            best_obj_ = obj;
        }
    }

    void run() {
        root_bound_ = -1.0;
        dive(-std::numeric_limits<double>::infinity());
    }

    const std::optional<LinkSelection>& incumbent() const { return best_; }
    int incumbent_objective() const { return best_obj_; }
    bool aborted() const { return aborted_; }
    bool root_infeasible() const { return root_infeasible_; }
    double open_bound() const { return open_bound_; }
    double root_bound() const { return root_bound_; }
    long nodes() const { return nodes_; }
    long pivots() const { return lp_.pivots(); }

private:
    bool out_of_budget() const {
        if (opt_.node_limit > 0 && nodes_ >= opt_.node_limit) return true;
        if (opt_.time_limit_s > 0.0) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
            if (el.count() >= opt_.time_limit_s) return true;
        }
        return false;
    }

    bool prunable(double bound) const { return best_ && std::ceil(bound - 1e-6) >= best_obj_; }

    void dive(double inherited) {
        if (prunable(inherited)) return;
        if (out_of_budget()) {
            aborted_ = true;
            open_bound_ = std::min(open_bound_, inherited);
            return;
        }
        const bool root = nodes_ == 0;
        ++nodes_;
        if (lp_.solve() == LpStatus::Infeasible) {
            if (root) root_infeasible_ = true;
            return;
        }
        const double bound = lp_.bound();
        if (root) root_bound_ = bound;
        if (prunable(bound)) return;
        if (opt_.rounding_interval > 0 && (nodes_ - 1) % opt_.rounding_interval == 0) {
            std::vector<std::vector<double>> score(m_.beam_var.size());
            for (std::size_t k = 0; k < score.size(); ++k)
                for (int j : m_.beam_var[k]) score[k].push_back(lp_.value(j));
            if (auto r = rounded_selection(m_.instance, score)) offer(*r);
            if (prunable(bound)) return;
        }

        int branch = -1;
        double frac_best = 1e-6;
        bool in_open = true;
        for (int j : relax_.branch_order) {
            const bool open = m_.vars[static_cast<std::size_t>(j)].kind == VarKind::Open;
            if (!open && in_open) {
                if (branch >= 0) break;
                in_open = false;
            }
            const double v = lp_.value(j);
            const double f = std::min(v, 1.0 - v);
            if (f > frac_best) frac_best = f, branch = j;
        }
        if (branch < 0) {
            auto sel = empty_selection(m_.instance);
            for (std::size_t k = 0; k < sel.size(); ++k)
                for (std::size_t s = 0; s < sel[k].size(); ++s)
                    sel[k][s] = lp_.value(m_.beam_var[k][s]) > 0.5 ? 1 : 0;
            offer(sel);
            return;
        }
        const double v = lp_.value(branch);
        const double first = opt_.up_first || v >= 0.5 ? 1.0 : 0.0;
        for (double side : {first, 1.0 - first}) {
            lp_.set_bounds(branch, side, side);
            dive(bound);
            lp_.set_bounds(branch, 0.0, 1.0);
        }
    }

    const BlpModel& m_;
    SolveOptions opt_;
    Relaxation relax_;
    DualSimplex lp_;
    std::chrono::steady_clock::time_point start_;
    std::optional<LinkSelection> best_;
    int best_obj_ = INT_MAX;
    long nodes_ = 0;
    bool aborted_ = false;
    bool root_infeasible_ = false;
    double open_bound_ = std::numeric_limits<double>::infinity();
    double root_bound_ = 0.0;
};

} // namespace detail

/// Minimum number of open candidates meeting the coverage target. Known
/// selections (e.g. from neighbouring sweep points) seed the incumbent;
/// infeasible ones are repaired greedily first. Throws InfeasibleError when no plan exists; when the node or
/// time budget runs out the best plan found is returned with its gap.
inline DeploymentPlan solve_blp(const BlpModel& m, const SolveOptions& opt = {},
                                const std::vector<LinkSelection>& warm_starts = {}) {
    const auto& inst = m.instance;
    if (coverage_upper_bound(inst) < inst.beta - kCoverageTol)
        throw InfeasibleError("deploy", "coverage target exceeds what all candidate links together provide");
    detail::BranchAndBound bb(m, opt);
    if (auto g = greedy_selection(inst)) bb.offer(*g);
    for (const auto& w : warm_starts) {
        if (selection_feasible(inst, w, kCoverageTol))
            bb.offer(w);
        else if (auto r = greedy_selection(inst, &w))
            bb.offer(*r);
    }
    bb.run();
    if (!bb.incumbent()) {
        if (bb.aborted()) {
            DeploymentPlan p;
            p.nodes = bb.nodes();
            p.lower_bound = static_cast<int>(std::ceil(std::max(bb.open_bound(), bb.root_bound()) - 1e-6));
            return p;
        }
        throw InfeasibleError("deploy", "no placement meets the coverage target within the beam budget");
    }
    DeploymentPlan p = plan_from_selection(inst, *bb.incumbent());
    p.feasible = true;
    p.nodes = bb.nodes();
    if (bb.aborted()) {
        p.lower_bound = std::min(p.objective, static_cast<int>(std::ceil(bb.open_bound() - 1e-6)));
        p.lower_bound = std::max(p.lower_bound, 0);
    } else {
        p.lower_bound = p.objective;
    }
    p.proven_optimal = p.lower_bound == p.objective;
    p.gap = p.objective > 0 ? static_cast<double>(p.objective - p.lower_bound) / p.objective : 0.0;
    return p;
}

// --- exhaustive ---------------------------------------------------------------

inline constexpr int kBruteForceMaxLinks = 24;

/// Enumerates every beam selection; among optimal plans the one whose
/// active candidate list is lexicographically smallest is returned.
inline DeploymentPlan brute_force_solve(const BlpModel& m) {
    const auto& inst = m.instance;
    if (inst.n_links() > kBruteForceMaxLinks)
        throw CapacityError("deploy", "exhaustive search is limited to " + std::to_string(kBruteForceMaxLinks) +
                                          " candidate links (instance has " + std::to_string(inst.n_links()) + ")");
    auto sel = empty_selection(inst);
    std::vector<int> count(static_cast<std::size_t>(inst.n_candidates), 0);
    std::optional<LinkSelection> best;
    std::vector<int> best_active;
    int best_obj = INT_MAX;
    int active = 0;

    auto visit = [&](auto&& self, std::size_t k, double miss) -> void {
        if (active > best_obj) return;
        if (k == sel.size()) {
            if (1.0 - miss < inst.beta - kCoverageTol) return;
            std::vector<int> act;
            for (int n = 0; n < inst.n_candidates; ++n)
                if (count[static_cast<std::size_t>(n)] > 0) act.push_back(n);
            if (active < best_obj || act < best_active) {
                best = sel;
                best_active = std::move(act);
                best_obj = active;
            }
            return;
        }
        const auto& l = inst.links[k];
        const std::uint32_t c = static_cast<std::uint32_t>(l.size());
        for (std::uint32_t mask = 0; mask < (1u << c); ++mask) {
            bool ok = true;
            for (std::uint32_t i = 0; i < c && ok; ++i)
                if (mask & (1u << i)) ok = count[static_cast<std::size_t>(l[i].ap)] < inst.beams;
            if (!ok) continue;
            double q = 1.0;
            for (std::uint32_t i = 0; i < c; ++i) {
                sel[k][i] = (mask >> i) & 1u;
                if (sel[k][i]) {
                    q *= 1.0 - l[i].p;
                    if (count[static_cast<std::size_t>(l[i].ap)]++ == 0) ++active;
                }
            }
            self(self, k + 1, miss + inst.weights[k] * q);
            for (std::uint32_t i = 0; i < c; ++i)
                if (sel[k][i] && --count[static_cast<std::size_t>(l[i].ap)] == 0) --active;
            std::fill(sel[k].begin(), sel[k].end(), 0);
        }
    };
    visit(visit, 0, 0.0);
    if (!best) throw InfeasibleError("deploy", "no placement meets the coverage target within the beam budget");
    DeploymentPlan p = plan_from_selection(inst, *best);
    p.feasible = true;
    p.proven_optimal = true;
    p.lower_bound = p.objective;
    return p;
}

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_SOLVER_HPP
