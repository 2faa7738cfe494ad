#pragma once

// Small dense exact-rational simplex. Sized for the linear-fractional
// certificates in this project: a handful of variables, a few dozen
// constraints. Two phases, Bland's rule for termination.
//
//   maximize c.x   subject to  A x <= b,  x >= 0

#include <optional>
#include <stdexcept>
#include <vector>

#include "dbl/rational.hpp"

namespace dbl {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rat value;
    std::vector<Rat> solution;
};

class SimplexSolver {
public:
    LpResult maximize(const std::vector<Rat>& objective, const std::vector<std::vector<Rat>>& a,
                      const std::vector<Rat>& b) {
        n_ = objective.size();
        m_ = a.size();
        if (b.size() != m_) throw std::invalid_argument("row count mismatch");
        for (const auto& row : a)
            if (row.size() != n_) throw std::invalid_argument("column count mismatch");

        // tableau columns: n decision vars, m slacks, 1 artificial, rhs
        cols_ = n_ + m_ + 2;
        t_.assign(m_ + 2, std::vector<Rat>(cols_, Rat(0)));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) t_[i][j] = a[i][j];
            t_[i][n_ + i] = 1;
            t_[i][n_ + m_] = -1;  // artificial column
            t_[i][cols_ - 1] = b[i];
            basis_[i] = n_ + i;
        }
        // row m: real objective (maximize), row m+1: phase-1 objective -x0
        for (std::size_t j = 0; j < n_; ++j) t_[m_][j] = -objective[j];
        t_[m_ + 1][n_ + m_] = 1;

        if (needs_phase1()) {
            if (!phase1()) return {LpStatus::infeasible, Rat(0), {}};
        }
        return phase2();
    }

private:
    bool needs_phase1() const {
        for (std::size_t i = 0; i < m_; ++i)
            if (t_[i][cols_ - 1] < 0) return true;
        return false;
    }

    void pivot(std::size_t row, std::size_t col) {
        Rat p = t_[row][col];
        for (std::size_t j = 0; j < cols_; ++j) t_[row][j] /= p;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i == row) continue;
            Rat f = t_[i][col];
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols_; ++j) t_[i][j] -= f * t_[row][j];
        }
        basis_[row] = col;
    }

    // Bland: smallest eligible column, then smallest basis index on ties.
    std::optional<std::size_t> entering(std::size_t obj_row, std::size_t limit) const {
        for (std::size_t j = 0; j < limit; ++j)
            if (t_[obj_row][j] < 0) return j;
        return std::nullopt;
    }

    std::optional<std::size_t> leaving(std::size_t col) const {
        std::optional<std::size_t> row;
        Rat best;
        for (std::size_t i = 0; i < m_; ++i) {
            if (t_[i][col] <= 0) continue;
            Rat ratio = t_[i][cols_ - 1] / t_[i][col];
            if (!row || ratio < best || (ratio == best && basis_[i] < basis_[*row])) {
                row = i;
                best = ratio;
            }
        }
        return row;
    }

    bool phase1() {
        // enter the artificial variable on the most negative rhs row
        std::size_t worst = 0;
        for (std::size_t i = 1; i < m_; ++i)
            if (t_[i][cols_ - 1] < t_[worst][cols_ - 1]) worst = i;
        pivot(worst, n_ + m_);
        while (auto col = entering(m_ + 1, n_ + m_ + 1)) {
            auto row = leaving(*col);
            if (!row) throw std::logic_error("phase-1 objective cannot be unbounded");
            pivot(*row, *col);
        }
        // optimum of max(-x0) must be zero for feasibility
        if (t_[m_ + 1][cols_ - 1] != 0) return false;
        // drive the artificial out of the basis if it lingers at level zero
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] != n_ + m_) continue;
            for (std::size_t j = 0; j < n_ + m_; ++j)
                if (t_[i][j] != 0) {
                    pivot(i, j);
                    break;
                }
        }
        return true;
    }

    LpResult phase2() {
        while (auto col = entering(m_, n_ + m_)) {
            auto row = leaving(*col);
            if (!row) return {LpStatus::unbounded, Rat(0), {}};
            pivot(*row, *col);
        }
        LpResult res;
        res.status = LpStatus::optimal;
        res.value = t_[m_][cols_ - 1];
        res.solution.assign(n_, Rat(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) res.solution[basis_[i]] = t_[i][cols_ - 1];
        return res;
    }

    std::size_t n_ = 0, m_ = 0, cols_ = 0;
    std::vector<std::vector<Rat>> t_;
    std::vector<std::size_t> basis_;
};

inline LpResult lp_maximize(const std::vector<Rat>& objective,
                            const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b) {
    SimplexSolver solver;
    return solver.maximize(objective, a, b);
}

}  // namespace dbl
