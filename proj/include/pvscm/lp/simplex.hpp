#pragma once

/**
 * @file simplex.hpp
 * @brief Sparse revised primal simplex for  min c'x  s.t.  rows,  x >= 0.
 *
 * Rows are scaled to unit max coefficient and flipped to non-negative rhs.
 * Inequalities get slack/surplus columns; rows without a feasible crash
 * column get an artificial. Artificials still basic after phase 1 stay pinned
 * at zero: any pivot that would move them blocks with a zero step.
 *
 * The basis is factorized with Eigen's SparseLU and updated in product form
 * between refactorizations. Pricing is Dantzig on column-norm scaled reduced
 * costs with a Harris two-pass ratio test; after a run of non-improving
 * iterations the solver switches to Bland's rule until the objective moves.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace pvscm::lp {

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct Row {
    std::string name;
    std::vector<Term> terms;
    RowSense sense = RowSense::Equal;
    double rhs = 0.0;
};

/// min cost'x + objective_offset  s.t. rows, x >= 0.
struct LinearProgram {
    std::vector<std::string> var_names;
    std::vector<double> cost;
    std::vector<Row> rows;
    double objective_offset = 0.0;

    std::size_t num_vars() const noexcept { return cost.size(); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit, NumericalFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration-limit";
        case SolveStatus::TimeLimit: return "time-limit";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;  ///< relative to max |cost|
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 0;  ///< 0: automatic
    double time_limit_s = std::numeric_limits<double>::infinity();
    std::size_t refactor_interval = 100;
    std::size_t stall_limit = 300;  ///< non-improving iterations before Bland's rule
};

struct SimplexResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::size_t phase1_iterations = 0;
    double seconds = 0.0;
    std::string message;
};

namespace detail {

class RevisedSimplex {
public:
    RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt)
        : lp_(lp), opt_(opt), start_(std::chrono::steady_clock::now()) {}

    SimplexResult run() {
        SimplexResult res;
        if (!build()) {
            res.status = SolveStatus::NumericalFailure;
            res.message = "malformed model";
            return finish(res);
        }
        if (!refactor()) return fail(res, "singular initial basis");

        bool need_phase1 = false;
        for (std::size_t c = n_art_begin_; c < ncols_; ++c) {
            if (is_basic(c) && x_basic_[pos_[c]] > opt_.feasibility_tol) need_phase1 = true;
        }
        if (need_phase1) {
            phase_cost_.assign(ncols_, 0.0);
            for (std::size_t c = n_art_begin_; c < ncols_; ++c) phase_cost_[c] = 1.0;
            allow_artificial_entry_ = false;
            const SolveStatus st = iterate(res);
            res.phase1_iterations = res.iterations;
            if (st != SolveStatus::Optimal) {
                res.status = st == SolveStatus::Unbounded ? SolveStatus::NumericalFailure : st;
                return finish(res);
            }
            if (!refactor()) return fail(res, "singular basis after phase 1");
            double infeas = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                if (head_[r] >= n_art_begin_) infeas += std::max(0.0, x_basic_[r]);
            }
            if (infeas > 1e3 * opt_.feasibility_tol * std::max<std::size_t>(1, m_)) {
                res.status = SolveStatus::Infeasible;
                res.message = "phase 1 optimum has positive artificial sum";
                return finish(res);
            }
        }
        pin_artificials_ = true;
        phase_cost_.assign(ncols_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) phase_cost_[j] = lp_.cost[j];
        const SolveStatus st = iterate(res);
        res.status = st;
        if (st == SolveStatus::Optimal) {
            if (!refactor()) return fail(res, "singular final basis");
            extract(res);
        }
        return finish(res);
    }

private:
    // ---- model -----------------------------------------------------------
    bool build() {
        n_ = lp_.num_vars();
        m_ = lp_.rows.size();
        if (lp_.var_names.size() != n_ && !lp_.var_names.empty()) return false;

        // Merge duplicate terms, scale rows to unit max coefficient, flip to rhs >= 0.
        std::vector<std::vector<Term>> rows(m_);
        rhs_.assign(m_, 0.0);
        std::vector<RowSense> sense(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            const auto& row = lp_.rows[r];
            std::vector<Term> terms = row.terms;
            for (const auto& t : terms) {
                if (t.var >= n_ || !std::isfinite(t.coef)) return false;
            }
            std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
            std::vector<Term> merged;
            for (const auto& t : terms) {
                if (!merged.empty() && merged.back().var == t.var) {
                    merged.back().coef += t.coef;
                } else {
                    merged.push_back(t);
                }
            }
            std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
            double scale = 0.0;
            for (const auto& t : merged) scale = std::max(scale, std::abs(t.coef));
            if (scale == 0.0) scale = 1.0;
            double rhs = row.rhs / scale;
            double sign = 1.0;
            RowSense s = row.sense;
            if (rhs < 0.0) {
                sign = -1.0;
                rhs = -rhs;
                if (s == RowSense::LessEqual) {
                    s = RowSense::GreaterEqual;
                } else if (s == RowSense::GreaterEqual) {
                    s = RowSense::LessEqual;
                }
            }
            for (auto& t : merged) t.coef *= sign / scale;
            rows[r] = std::move(merged);
            rhs_[r] = rhs;
            sense[r] = s;
        }

        // Column-wise storage of structurals.
        std::vector<std::vector<std::pair<std::size_t, double>>> cols(n_);
        for (std::size_t r = 0; r < m_; ++r) {
            for (const auto& t : rows[r]) cols[t.var].push_back({r, t.coef});
        }

        // Crash basis: slacks of <= rows, then feasible column singletons.
        std::vector<std::ptrdiff_t> basic_of_row(m_, -1);
        std::vector<std::size_t> slack_rows;
        std::vector<double> slack_sign;
        for (std::size_t r = 0; r < m_; ++r) {
            if (sense[r] == RowSense::LessEqual) {
                slack_rows.push_back(r);
                slack_sign.push_back(1.0);
            } else if (sense[r] == RowSense::GreaterEqual) {
                slack_rows.push_back(r);
                slack_sign.push_back(-1.0);
            }
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (cols[j].size() != 1) continue;
            const auto [r, a] = cols[j].front();
            if (basic_of_row[r] >= 0 || sense[r] == RowSense::LessEqual) continue;
            const bool feasible = rhs_[r] == 0.0 ? true : a > 0.0;
            if (!feasible) continue;
            basic_of_row[r] = static_cast<std::ptrdiff_t>(j);
        }

        col_start_.assign(1, 0);
        auto push_col = [&](const std::vector<std::pair<std::size_t, double>>& c) {
            for (const auto& [r, a] : c) {
                row_idx_.push_back(r);
                val_.push_back(a);
            }
            col_start_.push_back(row_idx_.size());
        };
        for (std::size_t j = 0; j < n_; ++j) push_col(cols[j]);
        for (std::size_t s = 0; s < slack_rows.size(); ++s) {
            const std::size_t r = slack_rows[s];
            push_col({{r, slack_sign[s]}});
            if (slack_sign[s] > 0.0) basic_of_row[r] = static_cast<std::ptrdiff_t>(n_ + s);
        }
        n_art_begin_ = n_ + slack_rows.size();
        std::size_t next = n_art_begin_;
        for (std::size_t r = 0; r < m_; ++r) {
            if (basic_of_row[r] >= 0) continue;
            push_col({{r, 1.0}});
            basic_of_row[r] = static_cast<std::ptrdiff_t>(next++);
        }
        ncols_ = next;

        col_norm_.resize(ncols_);
        for (std::size_t c = 0; c < ncols_; ++c) {
            double s = 0.0;
            for (std::size_t p = col_start_[c]; p < col_start_[c + 1]; ++p) s += val_[p] * val_[p];
            col_norm_[c] = std::sqrt(std::max(s, 1e-300));
        }
        head_.resize(m_);
        pos_.assign(ncols_, kNonBasic);
        for (std::size_t r = 0; r < m_; ++r) {
            head_[r] = static_cast<std::size_t>(basic_of_row[r]);
            pos_[head_[r]] = r;
        }
        double cmax = 0.0;
        for (double c : lp_.cost) cmax = std::max(cmax, std::abs(c));
        cost_scale_ = std::max(1.0, cmax);
        return true;
    }

    // ---- basis factorization ----------------------------------------------
    bool refactor() {
        etas_.clear();
        if (m_ == 0) {
            x_basic_.resize(0);
            return true;
        }
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t c = head_[r];
            for (std::size_t p = col_start_[c]; p < col_start_[c + 1]; ++p) {
                trip.emplace_back(static_cast<int>(row_idx_[p]), static_cast<int>(r), val_[p]);
            }
        }
        Eigen::SparseMatrix<double> basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        basis.setFromTriplets(trip.begin(), trip.end());
        basis.makeCompressed();
        lu_.analyzePattern(basis);
        lu_.factorize(basis);
        if (lu_.info() != Eigen::Success) return false;
        Eigen::VectorXd b(static_cast<Eigen::Index>(m_));
        for (std::size_t r = 0; r < m_; ++r) b[static_cast<Eigen::Index>(r)] = rhs_[r];
        Eigen::VectorXd xb = lu_.solve(b);
        x_basic_.assign(xb.data(), xb.data() + m_);
        for (double v : x_basic_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    struct Eta {
        std::size_t row = 0;
        double pivot = 1.0;
        std::vector<std::pair<std::size_t, double>> entries;  ///< off-pivot alpha entries
    };

    Eigen::VectorXd ftran(std::size_t col) const {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        for (std::size_t p = col_start_[col]; p < col_start_[col + 1]; ++p) {
            a[static_cast<Eigen::Index>(row_idx_[p])] = val_[p];
        }
        Eigen::VectorXd w = lu_.solve(a);
        for (const auto& e : etas_) {
            const double wr = w[static_cast<Eigen::Index>(e.row)] / e.pivot;
            w[static_cast<Eigen::Index>(e.row)] = wr;
            if (wr != 0.0) {
                for (const auto& [i, ai] : e.entries) w[static_cast<Eigen::Index>(i)] -= ai * wr;
            }
        }
        return w;
    }

    Eigen::VectorXd btran(Eigen::VectorXd y) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = y[static_cast<Eigen::Index>(it->row)];
            for (const auto& [i, ai] : it->entries) acc -= ai * y[static_cast<Eigen::Index>(i)];
            y[static_cast<Eigen::Index>(it->row)] = acc / it->pivot;
        }
        return lu_.transpose().solve(y);
    }

    // ---- iterations -------------------------------------------------------
    SolveStatus iterate(SimplexResult& res) {
        const std::size_t max_iter = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + ncols_) + 10000;
        const double dual_tol = opt_.optimality_tol * cost_scale_;
        bool bland = false;
        std::size_t stall = 0;
        double last_obj = current_objective();
        bool verified = false;

        while (true) {
            if (res.iterations >= max_iter) return SolveStatus::IterationLimit;
            if ((res.iterations & 15U) == 0 && elapsed() > opt_.time_limit_s) return SolveStatus::TimeLimit;

            // Duals.
            Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
            for (std::size_t r = 0; r < m_; ++r) cb[static_cast<Eigen::Index>(r)] = phase_cost_[head_[r]];
            const Eigen::VectorXd y = m_ ? btran(cb) : Eigen::VectorXd();

            // Pricing.
            std::size_t entering = kNonBasic;
            double best = 0.0;
            const std::size_t price_end = allow_artificial_entry_ ? ncols_ : n_art_begin_;
            for (std::size_t c = 0; c < price_end; ++c) {
                if (pos_[c] != kNonBasic) continue;
                double d = phase_cost_[c];
                for (std::size_t p = col_start_[c]; p < col_start_[c + 1]; ++p) {
                    d -= y[static_cast<Eigen::Index>(row_idx_[p])] * val_[p];
                }
                if (d >= -dual_tol) continue;
                if (bland) {
                    entering = c;
                    break;
                }
                const double score = d / col_norm_[c];
                if (score < best) {
                    best = score;
                    entering = c;
                }
            }
            if (entering == kNonBasic) {
                if (!etas_.empty() && !verified) {
                    if (!refactor()) return SolveStatus::NumericalFailure;
                    verified = true;
                    continue;
                }
                return SolveStatus::Optimal;
            }
            verified = false;

            const Eigen::VectorXd alpha = ftran(entering);

            const std::size_t leave = bland ? ratio_test_bland(alpha) : ratio_test_harris(alpha);
            if (leave == kNonBasic) return SolveStatus::Unbounded;
            const double leave_alpha = alpha[static_cast<Eigen::Index>(leave)];
            const double theta = pinned(leave) ? 0.0 : std::max(0.0, x_basic_[leave]) / leave_alpha;

            for (std::size_t r = 0; r < m_; ++r) x_basic_[r] -= theta * alpha[static_cast<Eigen::Index>(r)];
            x_basic_[leave] = theta;
            for (std::size_t r = 0; r < m_; ++r) {
                if (x_basic_[r] < 0.0 || pinned(r)) x_basic_[r] = std::max(0.0, pinned(r) ? 0.0 : x_basic_[r]);
            }

            Eta eta;
            eta.row = leave;
            eta.pivot = leave_alpha;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = alpha[static_cast<Eigen::Index>(r)];
                if (r != leave && a != 0.0) eta.entries.push_back({r, a});
            }
            etas_.push_back(std::move(eta));

            pos_[head_[leave]] = kNonBasic;
            head_[leave] = entering;
            pos_[entering] = leave;
            ++res.iterations;

            if (etas_.size() >= opt_.refactor_interval) {
                if (!refactor()) return SolveStatus::NumericalFailure;
            }

            const double obj = current_objective();
            if (obj < last_obj - 1e-12 * std::max(1.0, std::abs(last_obj))) {
                last_obj = obj;
                stall = 0;
                bland = false;
            } else if (++stall >= opt_.stall_limit) {
                bland = true;
            }
        }
    }

    bool pinned(std::size_t r) const { return pin_artificials_ && head_[r] >= n_art_begin_; }

    /// Harris two-pass: bound the step with relaxed feasibility, then take the
    /// largest pivot among rows whose exact ratio fits under that bound.
    std::size_t ratio_test_harris(const Eigen::VectorXd& alpha) const {
        const double ptol = opt_.pivot_tol;
        const double ftol = opt_.feasibility_tol;
        double theta_max = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m_; ++r) {
            const double a = alpha[static_cast<Eigen::Index>(r)];
            if (pinned(r)) {
                if (std::abs(a) > ptol) theta_max = std::min(theta_max, ftol / std::abs(a));
            } else if (a > ptol) {
                theta_max = std::min(theta_max, (std::max(0.0, x_basic_[r]) + ftol) / a);
            }
        }
        if (!std::isfinite(theta_max)) return kNonBasic;
        std::size_t leave = kNonBasic;
        double best = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double a = alpha[static_cast<Eigen::Index>(r)];
            const bool pin = pinned(r);
            if (pin ? std::abs(a) <= ptol : a <= ptol) continue;
            const double ratio = pin ? 0.0 : std::max(0.0, x_basic_[r]) / a;
            if (ratio <= theta_max && std::abs(a) > best) {
                best = std::abs(a);
                leave = r;
            }
        }
        return leave;
    }

    /// Textbook minimum ratio; ties go to the smallest basic column index.
    std::size_t ratio_test_bland(const Eigen::VectorXd& alpha) const {
        const double ptol = opt_.pivot_tol;
        std::size_t leave = kNonBasic;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m_; ++r) {
            const double a = alpha[static_cast<Eigen::Index>(r)];
            const bool pin = pinned(r);
            if (pin ? std::abs(a) <= ptol : a <= ptol) continue;
            const double ratio = pin ? 0.0 : std::max(0.0, x_basic_[r]) / a;
            if (ratio < best || (ratio == best && head_[r] < head_[leave])) {
                best = ratio;
                leave = r;
            }
        }
        return leave;
    }

    double current_objective() const {
        double s = 0.0;
        for (std::size_t r = 0; r < m_; ++r) s += phase_cost_[head_[r]] * x_basic_[r];
        return s;
    }

    void extract(SimplexResult& res) const {
        res.x.assign(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (head_[r] < n_) res.x[head_[r]] = std::max(0.0, x_basic_[r]);
        }
        double obj = lp_.objective_offset;
        for (std::size_t j = 0; j < n_; ++j) obj += lp_.cost[j] * res.x[j];
        res.objective = obj;
    }

    SimplexResult& fail(SimplexResult& res, const char* why) {
        res.status = SolveStatus::NumericalFailure;
        res.message = why;
        return finish(res);
    }

    SimplexResult& finish(SimplexResult& res) {
        res.seconds = elapsed();
        return res;
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool is_basic(std::size_t c) const { return pos_[c] != kNonBasic; }

    static constexpr std::size_t kNonBasic = std::numeric_limits<std::size_t>::max();

    const LinearProgram& lp_;
    SimplexOptions opt_;
    std::chrono::steady_clock::time_point start_;

    std::size_t n_ = 0, m_ = 0, ncols_ = 0, n_art_begin_ = 0;
    std::vector<std::size_t> col_start_, row_idx_;
    std::vector<double> val_, rhs_, col_norm_, phase_cost_, x_basic_;
    std::vector<std::size_t> head_, pos_;
    std::vector<Eta> etas_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    double cost_scale_ = 1.0;
    bool pin_artificials_ = false;
    bool allow_artificial_entry_ = false;
};

}  // namespace detail

inline SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {}) {
    detail::RevisedSimplex solver(lp, options);
    return solver.run();
}

}  // namespace pvscm::lp
