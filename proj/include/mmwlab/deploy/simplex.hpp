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

#ifndef MMWLAB_DEPLOY_SIMPLEX_HPP
#define MMWLAB_DEPLOY_SIMPLEX_HPP

// Bounded dual simplex, revised form.
//
//   minimize c'x  subject to  row_lo <= A x <= row_hi,  col_lo <= x <= col_hi
//
// Each row gets a logical s_i with A x - s = 0 and the row bounds. The slack
// basis is dual feasible as soon as every structural sits at the bound its
// cost sign prefers, so no phase one is needed. Bound changes keep the basis
// dual feasible, which is what branch-and-bound relies on for warm starts.
//
// The basis inverse is kept in product form: a sparse LU factorization of
// the basis at the last refactorization (initially the slack basis -I)
// followed by one elementary column transformation per pivot.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <utility>
#include <vector>

#include "mmwlab/error.hpp"

namespace mmwlab::deploy {

struct SparseRow {
    std::vector<std::pair<int, double>> terms;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct SimplexOptions {
    double primal_tol = 1e-9;
    double pivot_tol = 1e-9;
    int refactor_interval = 100;
    // Zero costs invite ties in the dual ratio test and, with them, stalling.
    // Each column cost is raised by a distinct amount of this order.
    double cost_perturbation = 1e-10;
    long max_iterations = 0;  // per solve; 0 = 50 (rows + columns) + 1000
};

enum class LpStatus { Optimal, Infeasible };

class DualSimplex {
public:
    DualSimplex(int n_cols, const std::vector<SparseRow>& rows, std::vector<double> col_lo, std::vector<double> col_hi,
                std::vector<double> cost, SimplexOptions opt = {})
        : n_(n_cols), m_(static_cast<int>(rows.size())), opt_(opt), cost_(cost) {
        if (n_ < 0 || static_cast<int>(col_lo.size()) != n_ || static_cast<int>(col_hi.size()) != n_ ||
            static_cast<int>(cost.size()) != n_)
            throw DomainError("deploy", "simplex: column data has inconsistent length");
        const int total = n_ + m_;
        lo_.resize(static_cast<std::size_t>(total));
        hi_.resize(static_cast<std::size_t>(total));
        c_.assign(static_cast<std::size_t>(total), 0.0);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = col_lo[j];
            hi_[j] = col_hi[j];
            c_[j] = cost[j] + opt_.cost_perturbation * (1.0 + static_cast<double>((j * 7919) % 1009) / 1009.0);
            if (!(lo_[j] <= hi_[j])) throw DomainError("deploy", "simplex: column bounds cross");
            if (!std::isfinite(lo_[j]) && !std::isfinite(hi_[j]))
                throw DomainError("deploy", "simplex: free structural columns are not supported");
        }
        cols_.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < m_; ++i) {
            for (const auto& [j, v] : rows[i].terms) {
                if (j < 0 || j >= n_) throw DomainError("deploy", "simplex: row refers to an unknown column");
                if (v != 0.0) cols_[j].push_back({i, v});
            }
            lo_[n_ + i] = rows[i].lo;
            hi_[n_ + i] = rows[i].hi;
            if (!(rows[i].lo <= rows[i].hi)) throw DomainError("deploy", "simplex: row bounds cross");
        }
        for (auto& col : cols_) merge_duplicates(col);
        basis_.resize(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
        state_.assign(static_cast<std::size_t>(total), State::Lower);
        for (int i = 0; i < m_; ++i) state_[n_ + i] = State::Basic;
        x_.assign(static_cast<std::size_t>(total), 0.0);
        d_ = c_;
        for (int j = 0; j < n_; ++j) place_nonbasic(j);
        work_.assign(static_cast<std::size_t>(m_), 0.0);
        row_.assign(static_cast<std::size_t>(total), 0.0);
        recompute_primal();
    }

    int rows() const { return m_; }
    int cols() const { return n_; }
    long pivots() const { return pivots_; }
    double lower(int j) const { return lo_.at(j); }
    double upper(int j) const { return hi_.at(j); }
    double value(int j) const { return x_.at(j); }

    /// Unperturbed cost of the current point.
    double objective() const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
        return s;
    }

    /// Valid lower bound on the unperturbed optimum once solve() reports
    /// optimality (finite upper column bounds assumed).
    double bound() const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += c_[j] * x_[j] - (c_[j] - cost_[j]) * std::max(std::fabs(lo_[j]), std::fabs(hi_[j]));
        return s;
    }

    /// Tighten or relax the bounds of a structural column.
    void set_bounds(int j, double lo, double hi) {
        if (j < 0 || j >= n_ || !(lo <= hi)) throw DomainError("deploy", "simplex: bad bound change");
        lo_[j] = lo;
        hi_[j] = hi;
        if (state_[j] != State::Basic) {
            const double old = x_[j];
            place_nonbasic(j);
            const double delta = x_[j] - old;
            if (delta != 0.0) {
                column(j, work_);
                for (int i = 0; i < m_; ++i) x_[basis_[i]] -= work_[i] * delta;
            }
        }
    }

    LpStatus solve() {
        const long cap = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (m_ + n_) + 1000;
        for (long it = 0; it < cap; ++it) {
            if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
            const int r = leaving_row();
            if (r < 0) return LpStatus::Optimal;
            const int b = basis_[r];
            const bool below = x_[b] < lo_[b];
            const double target = below ? lo_[b] : hi_[b];
            tableau_row(r);
            const int q = entering_column(below);
            if (q < 0) {
                // A fresh factorization rules out drift before declaring infeasibility.
                if (!etas_.empty()) {
                    refactor();
                    continue;
                }
                return LpStatus::Infeasible;
            }
            pivot(r, q, target, below ? State::Lower : State::Upper);
        }
        throw ConvergenceError("deploy", "simplex iteration limit reached");
    }

private:
    enum class State { Basic, Lower, Upper };
    using Factor = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
    using SparseVec = std::vector<std::pair<int, double>>;

    struct Eta {
        int pos;
        double pivot_inv;
        SparseVec others;  // -alpha_i / alpha_r for i != pos
    };

    static void merge_duplicates(SparseVec& v) {
        std::sort(v.begin(), v.end());
        SparseVec out;
        for (const auto& e : v) {
            if (!out.empty() && out.back().first == e.first)
                out.back().second += e.second;
            else
                out.push_back(e);
        }
        v.swap(out);
    }

    void place_nonbasic(int j) {
        const bool use_lower = std::isfinite(lo_[j]) && (d_[j] >= 0.0 || !std::isfinite(hi_[j]));
        state_[j] = use_lower ? State::Lower : State::Upper;
        x_[j] = use_lower ? lo_[j] : hi_[j];
    }

    // v <- B^{-1} v
    void ftran(std::vector<double>& v) const {
        if (lu_) {
            Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
            mv = lu_->solve(Eigen::VectorXd(mv));
        } else {
            for (double& e : v) e = -e;
        }
        for (const auto& eta : etas_) {
            const double vr = v[eta.pos];
            if (vr == 0.0) continue;
            v[eta.pos] = eta.pivot_inv * vr;
            for (const auto& [i, a] : eta.others) v[i] += a * vr;
        }
    }

    // u' <- u' B^{-1}
    void btran(std::vector<double>& u) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = it->pivot_inv * u[it->pos];
            for (const auto& [i, a] : it->others) s += a * u[i];
            u[it->pos] = s;
        }
        if (lu_) {
            Eigen::Map<Eigen::VectorXd> mu(u.data(), m_);
            mu = lu_->transpose().solve(Eigen::VectorXd(mu));
        } else {
            for (double& e : u) e = -e;
        }
    }

    // out <- B^{-1} a_j, with a_j = -e_i for the logical of row i
    void column(int j, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (j < n_)
            for (const auto& [i, a] : cols_[j]) out[i] = a;
        else
            out[j - n_] = -1.0;
        ftran(out);
    }

    double dot_column(const std::vector<double>& u, int j) const {
        if (j >= n_) return -u[j - n_];
        double s = 0.0;
        for (const auto& [i, a] : cols_[j]) s += u[i] * a;
        return s;
    }

    // row_ <- e_r' B^{-1} [A | -I] over nonbasic columns
    void tableau_row(int r) {
        std::vector<double>& rho = rho_;
        rho.assign(static_cast<std::size_t>(m_), 0.0);
        rho[r] = 1.0;
        btran(rho);
        const int total = n_ + m_;
        for (int j = 0; j < total; ++j) row_[j] = state_[j] == State::Basic ? 0.0 : dot_column(rho, j);
    }

    void recompute_primal() {
        std::vector<double>& rhs = work_;
        std::fill(rhs.begin(), rhs.end(), 0.0);
        const int total = n_ + m_;
        for (int j = 0; j < total; ++j) {
            if (state_[j] == State::Basic || x_[j] == 0.0) continue;
            if (j < n_)
                for (const auto& [i, a] : cols_[j]) rhs[i] -= a * x_[j];
            else
                rhs[j - n_] += x_[j];
        }
        ftran(rhs);
        for (int i = 0; i < m_; ++i) x_[basis_[i]] = rhs[i];
    }

    void recompute_duals() {
        std::vector<double> y(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) y[i] = c_[basis_[i]];
        btran(y);
        const int total = n_ + m_;
        for (int j = 0; j < total; ++j) d_[j] = state_[j] == State::Basic ? 0.0 : c_[j] - dot_column(y, j);
    }

    void refactor() {
        std::vector<Eigen::Triplet<double>> trip;
        for (int p = 0; p < m_; ++p) {
            const int b = basis_[p];
            if (b < n_)
                for (const auto& [i, a] : cols_[b]) trip.emplace_back(i, p, a);
            else
                trip.emplace_back(b - n_, p, -1.0);
        }
        Eigen::SparseMatrix<double> bmat(m_, m_);
        bmat.setFromTriplets(trip.begin(), trip.end());
        auto lu = std::make_unique<Factor>();
        lu->analyzePattern(bmat);
        lu->factorize(bmat);
        if (lu->info() != Eigen::Success) throw ConvergenceError("deploy", "simplex: singular basis on refactor");
        lu_ = std::move(lu);
        etas_.clear();
        recompute_primal();
        recompute_duals();
    }

    void push_eta(int r, const std::vector<double>& alpha) {
        Eta e;
        e.pos = r;
        e.pivot_inv = 1.0 / alpha[r];
        for (int i = 0; i < m_; ++i)
            if (i != r && std::fabs(alpha[i]) > 1e-14) e.others.push_back({i, -alpha[i] * e.pivot_inv});
        etas_.push_back(std::move(e));
    }

    int leaving_row() const {
        int best = -1;
        double worst = opt_.primal_tol;
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[i];
            const double v = std::max(lo_[b] - x_[b], x_[b] - hi_[b]);
            if (v > worst) {
                worst = v;
                best = i;
            }
        }
        return best;
    }

    int entering_column(bool increase) const {
        const int total = n_ + m_;
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity(), best_mag = 0.0;
        for (int j = 0; j < total; ++j) {
            if (state_[j] == State::Basic || lo_[j] == hi_[j]) continue;
            const double a = row_[j];
            if (std::fabs(a) <= opt_.pivot_tol) continue;
            // x_B(r) moves by -a per unit increase of x_j.
            const bool up = state_[j] == State::Lower;
            const bool helps = increase ? (up ? a < 0.0 : a > 0.0) : (up ? a > 0.0 : a < 0.0);
            if (!helps) continue;
            const double dj = up ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
            const double mag = std::fabs(a);
            const double ratio = dj / mag;
            if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && mag > best_mag)) {
                best = j;
                best_ratio = ratio;
                best_mag = mag;
            }
        }
        return best;
    }

    void pivot(int r, int q, double target, State leave_state) {
        const int total = n_ + m_;
        const int leave = basis_[r];
        std::vector<double>& alpha = work_;
        column(q, alpha);
        const double arq = alpha[r];
        const double theta = (x_[leave] - target) / arq;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] -= alpha[i] * theta;
        x_[q] += theta;
        x_[leave] = target;

        const double ratio = d_[q] / row_[q];
        if (ratio != 0.0)
            for (int j = 0; j < total; ++j)
                if (state_[j] != State::Basic) d_[j] -= ratio * row_[j];
        d_[q] = 0.0;
        d_[leave] = -ratio;

        push_eta(r, alpha);
        basis_[r] = q;
        state_[q] = State::Basic;
        state_[leave] = leave_state;
        ++pivots_;
    }

    int n_, m_;
    SimplexOptions opt_;
    std::vector<double> cost_;
    std::vector<SparseVec> cols_;
    std::vector<double> lo_, hi_, c_, d_, x_;
    std::vector<int> basis_;
    std::vector<State> state_;
    std::vector<Eta> etas_;
    std::unique_ptr<Factor> lu_;
    std::vector<double> work_, row_, rho_;
    long pivots_ = 0;
};

} // namespace mmwlab::deploy

#endif // MMWLAB_DEPLOY_SIMPLEX_HPP
