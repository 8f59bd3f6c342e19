// Copyright 2026 The coopsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopsolve/lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace coopsolve {

namespace {

// Dense tableau for the two-phase simplex. Row m holds the reduced-cost row;
// column `cols` holds the rhs.
class Tableau {
 public:
  Tableau(int m, int cols) : m_(m), cols_(cols), t_((m + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const {
    return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c];
  }

  int rows() const { return m_; }
  int cols() const { return cols_; }
  int rhs_col() const { return cols_; }
  int obj_row() const { return m_; }

  void pivot(int prow, int pcol) {
    const double inv = 1.0 / at(prow, pcol);
    for (int c = 0; c <= cols_; ++c) at(prow, c) *= inv;
    at(prow, pcol) = 1.0;
    for (int r = 0; r <= m_; ++r) {
      if (r == prow) continue;
      const double factor = at(r, pcol);
      if (factor == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= factor * at(prow, c);
      at(r, pcol) = 0.0;
    }
  }

 private:
  int m_;
  int cols_;
  std::vector<double> t_;
};

enum class PhaseOutcome { Optimal, Unbounded, IterationLimit };

// Bland's rule: entering column = lowest eligible index, leaving row = lowest
// basic variable index among ratio-test ties. Guarantees termination.
PhaseOutcome run_simplex(Tableau& t, std::vector<int>& basis, int max_enter_col,
                         int* budget) {
  const int m = t.rows();
  for (;;) {
    if (*budget <= 0) return PhaseOutcome::IterationLimit;
    int enter = -1;
    for (int c = 0; c < max_enter_col; ++c) {
      if (t.at(t.obj_row(), c) < -kLpTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return PhaseOutcome::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = t.at(r, enter);
      if (a <= kLpTol) continue;
      const double ratio = t.at(r, t.rhs_col()) / a;
      if (leave < 0 || ratio < best_ratio - kLpTol ||
          (ratio < best_ratio + kLpTol && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return PhaseOutcome::Unbounded;

    t.pivot(leave, enter);
    basis[static_cast<std::size_t>(leave)] = enter;
    --*budget;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n_orig = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Standard-form columns: shifted variables first, split negatives for free
  // variables, then slacks, then artificials.
  std::vector<int> plus_col(static_cast<std::size_t>(n_orig), -1);
  std::vector<int> minus_col(static_cast<std::size_t>(n_orig), -1);
  std::vector<double> shift(static_cast<std::size_t>(n_orig), 0.0);
  int n_std = 0;
  for (int j = 0; j < n_orig; ++j) {
    const double lb = lp.lower_bounds[static_cast<std::size_t>(j)];
    plus_col[static_cast<std::size_t>(j)] = n_std++;
    if (lb == -kInf) {
      minus_col[static_cast<std::size_t>(j)] = n_std++;
    } else {
      shift[static_cast<std::size_t>(j)] = lb;
    }
  }

  int n_slack = 0;
  for (RowSense s : lp.senses) {
    if (s != RowSense::Equal) ++n_slack;
  }

  // Build rows over std columns with shifted rhs; slack sign depends on sense.
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(m),
      std::vector<double>(static_cast<std::size_t>(n_std + n_slack), 0.0));
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  int slack_index = 0;
  for (int i = 0; i < m; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    double bi = lp.rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_orig; ++j) {
      const double a = lp.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a == 0.0) continue;
      row[static_cast<std::size_t>(plus_col[static_cast<std::size_t>(j)])] += a;
      if (minus_col[static_cast<std::size_t>(j)] >= 0) {
        row[static_cast<std::size_t>(minus_col[static_cast<std::size_t>(j)])] -= a;
      }
      bi -= a * shift[static_cast<std::size_t>(j)];
    }
    const RowSense s = lp.senses[static_cast<std::size_t>(i)];
    if (s != RowSense::Equal) {
      row[static_cast<std::size_t>(n_std + slack_index)] =
          (s == RowSense::LessEqual) ? 1.0 : -1.0;
      ++slack_index;
    }
    if (bi < 0.0) {
      for (double& a : row) a = -a;
      bi = -bi;
    }
    b[static_cast<std::size_t>(i)] = bi;
  }

  // Initial basis: a slack with +1 coefficient when available, otherwise an
  // artificial variable.
  std::vector<int> basis(static_cast<std::size_t>(m), -1);
  std::vector<int> artificial_of_row(static_cast<std::size_t>(m), -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    int unit = -1;
    for (int c = n_std; c < n_std + n_slack; ++c) {
      if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] == 1.0) {
        unit = c;
        break;
      }
    }
    if (unit >= 0) {
      basis[static_cast<std::size_t>(i)] = unit;
    } else {
      artificial_of_row[static_cast<std::size_t>(i)] = n_art++;
    }
  }

  const int art_start = n_std + n_slack;
  const int total_cols = art_start + n_art;
  Tableau t(m, total_cols);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < n_std + n_slack; ++c) {
      t.at(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    if (artificial_of_row[static_cast<std::size_t>(i)] >= 0) {
      const int col = art_start + artificial_of_row[static_cast<std::size_t>(i)];
      t.at(i, col) = 1.0;
      basis[static_cast<std::size_t>(i)] = col;
    }
    t.at(i, t.rhs_col()) = b[static_cast<std::size_t>(i)];
  }

  int budget = 50 * (m + total_cols) + 100;
  LpSolution solution;

  // Phase 1: minimize the artificial sum.
  if (n_art > 0) {
    for (int c = art_start; c < total_cols; ++c) t.at(t.obj_row(), c) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] >= art_start) {
        for (int c = 0; c <= t.rhs_col(); ++c) t.at(t.obj_row(), c) -= t.at(i, c);
      }
    }
    const PhaseOutcome outcome = run_simplex(t, basis, total_cols, &budget);
    solution.iterations = 50 * (m + total_cols) + 100 - budget;
    if (outcome == PhaseOutcome::IterationLimit) {
      solution.status = LpStatus::IterationLimit;
      return solution;
    }
    const double art_sum = -t.at(t.obj_row(), t.rhs_col());
    const double scale = std::max(1.0, *std::max_element(b.begin(), b.end()));
    if (art_sum > kLpTol * scale) {
      solution.status = LpStatus::Infeasible;
      return solution;
    }
    // Drive zero-level artificials out of the basis where possible; rows with
    // no real coefficient left are redundant and stay inert.
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < art_start) continue;
      int pcol = -1;
      for (int c = 0; c < art_start; ++c) {
        if (std::abs(t.at(i, c)) > kLpTol) {
          pcol = c;
          break;
        }
      }
      if (pcol >= 0) {
        t.pivot(i, pcol);
        basis[static_cast<std::size_t>(i)] = pcol;
      }
    }
  }

  // Phase 2: minimize the real objective from the feasible basis.
  for (int c = 0; c <= t.rhs_col(); ++c) t.at(t.obj_row(), c) = 0.0;
  for (int j = 0; j < n_orig; ++j) {
    const double cj = lp.objective[static_cast<std::size_t>(j)];
    if (cj == 0.0) continue;
    t.at(t.obj_row(), plus_col[static_cast<std::size_t>(j)]) += cj;
    if (minus_col[static_cast<std::size_t>(j)] >= 0) {
      t.at(t.obj_row(), minus_col[static_cast<std::size_t>(j)]) -= cj;
    }
  }
  for (int i = 0; i < m; ++i) {
    const int bi = basis[static_cast<std::size_t>(i)];
    if (bi >= art_start) continue;
    const double cb = t.at(t.obj_row(), bi);
    if (cb == 0.0) continue;
    for (int c = 0; c <= t.rhs_col(); ++c) t.at(t.obj_row(), c) -= cb * t.at(i, c);
  }
  const PhaseOutcome outcome = run_simplex(t, basis, art_start, &budget);
  solution.iterations = 50 * (m + total_cols) + 100 - budget;
  if (outcome == PhaseOutcome::IterationLimit) {
    solution.status = LpStatus::IterationLimit;
    return solution;
  }
  if (outcome == PhaseOutcome::Unbounded) {
    solution.status = LpStatus::Unbounded;
    return solution;
  }

  std::vector<double> x_std(static_cast<std::size_t>(total_cols), 0.0);
  for (int i = 0; i < m; ++i) {
    x_std[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
        t.at(i, t.rhs_col());
  }
  solution.x.assign(static_cast<std::size_t>(n_orig), 0.0);
  double objective = 0.0;
  for (int j = 0; j < n_orig; ++j) {
    double v = shift[static_cast<std::size_t>(j)] +
               x_std[static_cast<std::size_t>(plus_col[static_cast<std::size_t>(j)])];
    if (minus_col[static_cast<std::size_t>(j)] >= 0) {
      v -= x_std[static_cast<std::size_t>(minus_col[static_cast<std::size_t>(j)])];
    }
    solution.x[static_cast<std::size_t>(j)] = v;
    objective += lp.objective[static_cast<std::size_t>(j)] * v;
  }
  solution.objective = objective;
  solution.basis = basis;
  solution.status = LpStatus::Optimal;
  return solution;
}

namespace {

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

// Least-core LP over an explicit constraint set: variables p_1..p_n, eps.
LpSolution solve_least_core_lp(int n, const std::vector<Coalition>& coalitions) {
  LinearProgram lp(n + 1);
  lp.objective[static_cast<std::size_t>(n)] = 1.0;
  for (const Coalition& c : coalitions) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i : c.members()) row[static_cast<std::size_t>(i)] = 1.0;
    row[static_cast<std::size_t>(n)] = 1.0;
    lp.add_row(std::move(row), RowSense::GreaterEqual, 1.0);
  }
  std::vector<double> sum_row(static_cast<std::size_t>(n) + 1, 0.0);
  std::fill(sum_row.begin(), sum_row.begin() + n, 1.0);
  lp.add_row(std::move(sum_row), RowSense::Equal, 1.0);
  return solve_lp(lp);
}

// Canonical representative: among payoffs feasible at the optimal eps,
// minimize the L1 deviation from the uniform split (LP stand-in for the
// variance objective; unique and interior-leaning wherever the least core
// is a set with a symmetric axis).
LpSolution solve_canonical_lp(int n, const std::vector<Coalition>& coalitions,
                              double eps_star) {
  const double eps_fixed = eps_star + 1e-10;
  const double uniform = 1.0 / n;
  LinearProgram lp(2 * n);  // p_0..p_{n-1}, t_0..t_{n-1}
  for (int i = 0; i < n; ++i) lp.objective[static_cast<std::size_t>(n + i)] = 1.0;
  for (const Coalition& c : coalitions) {
    std::vector<double> row(static_cast<std::size_t>(2 * n), 0.0);
    for (int i : c.members()) row[static_cast<std::size_t>(i)] = 1.0;
    lp.add_row(std::move(row), RowSense::GreaterEqual, 1.0 - eps_fixed);
  }
  std::vector<double> sum_row(static_cast<std::size_t>(2 * n), 0.0);
  std::fill(sum_row.begin(), sum_row.begin() + n, 1.0);
  lp.add_row(std::move(sum_row), RowSense::Equal, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> upper(static_cast<std::size_t>(2 * n), 0.0);
    upper[static_cast<std::size_t>(i)] = -1.0;
    upper[static_cast<std::size_t>(n + i)] = 1.0;
    lp.add_row(std::move(upper), RowSense::GreaterEqual, -uniform);
    std::vector<double> lower(static_cast<std::size_t>(2 * n), 0.0);
    lower[static_cast<std::size_t>(i)] = 1.0;
    lower[static_cast<std::size_t>(n + i)] = 1.0;
    lp.add_row(std::move(lower), RowSense::GreaterEqual, uniform);
  }
  return solve_lp(lp);
}

// Winning coalition with the smallest payoff sum; ties resolved toward the
// smaller bitset so separation is deterministic.
std::pair<Coalition, double> most_violated(const WeightedVotingGame& game,
                                           std::span<const double> payoffs) {
  const int n = game.num_players();
  const auto& w = game.weights();
  const double q = game.quota();
  const std::uint64_t total = (1ULL << n) - 1;

  Coalition best;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    double wsum = 0.0;
    double psum = 0.0;
    for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
      const int i = std::countr_zero(bits);
      wsum += w[static_cast<std::size_t>(i)];
      psum += payoffs[static_cast<std::size_t>(i)];
    }
    if (wsum >= q && psum < best_sum) {
      best_sum = psum;
      best = Coalition(mask);
    }
  }
  return {best, best_sum};
}

SolutionVector extract_solution(int n, const LpSolution& sol) {
  SolutionVector out;
  out.payoffs.assign(sol.x.begin(), sol.x.begin() + n);
  for (double& p : out.payoffs) {
    if (p < 0.0 && p > -kLpTol) p = 0.0;
  }
  return out;
}

}  // namespace

SolutionVector least_core(const WeightedVotingGame& game,
                          const LeastCoreOptions& options) {
  game.require_winnable("least_core");
  const int n = game.num_players();
  int cap = options.cap;
  if (options.formulation == LcFormulation::Naive) cap = std::min(cap, 14);
  if (n > cap) {
    throw EnumerationLimitError("least_core: n=" + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(cap));
  }

  std::vector<Coalition> constraints;
  bool lazy = false;
  {
    CoalitionSet set = (options.formulation == LcFormulation::Naive)
                           ? winning_coalitions(game, cap)
                           : minimal_winning_coalitions(game, cap);
    if (static_cast<int>(set.coalitions.size()) <= options.dense_row_limit) {
      constraints = std::move(set.coalitions);
    } else {
      // Too many rows for a dense tableau; generate them lazily. Both
      // formulations admit the same winning-coalition cuts, so the optimum
      // is unchanged.
      lazy = true;
      constraints = {Coalition::grand(n)};
    }
  }

  LpSolution sol;
  for (int round = 0;; ++round) {
    if (round > 1 << 14) {
      throw SolverError("least_core: row generation failed to converge");
    }
    sol = solve_least_core_lp(n, constraints);
    if (sol.status != LpStatus::Optimal) {
      throw SolverError(std::string("least_core: LP ") + status_name(sol.status) +
                        " with " + std::to_string(constraints.size()) +
                        " constraints");
    }
    if (!lazy) break;
    const double eps = sol.x[static_cast<std::size_t>(n)];
    const auto [cut, psum] =
        most_violated(game, std::span<const double>(sol.x.data(), n));
    if (psum >= 1.0 - eps - 1e-10) break;
    constraints.push_back(cut);
  }

  const double eps_star = sol.x[static_cast<std::size_t>(n)];
  if (options.canonical) {
    LpSolution canon = solve_canonical_lp(n, constraints, eps_star);
    if (lazy) {
      // The canonical point must honor coalitions outside the working set.
      while (canon.status == LpStatus::Optimal) {
        const auto [cut, psum] =
            most_violated(game, std::span<const double>(canon.x.data(), n));
        if (psum >= 1.0 - eps_star - 1e-9) break;
        constraints.push_back(cut);
        canon = solve_canonical_lp(n, constraints, eps_star);
      }
    }
    if (canon.status != LpStatus::Optimal) {
      throw SolverError(std::string("least_core: canonicalization LP ") +
                        status_name(canon.status));
    }
    SolutionVector out = extract_solution(n, canon);
    out.lcv = std::max(0.0, eps_star);
    return out;
  }

  SolutionVector out = extract_solution(n, sol);
  out.lcv = std::max(0.0, eps_star);
  return out;
}

double max_excess(const WeightedVotingGame& game, std::span<const double> payoffs,
                  int cap) {
  if (static_cast<int>(payoffs.size()) != game.num_players()) {
    throw DimensionError("max_excess: payoff length does not match player count");
  }
  const int n = game.num_players();
  if (n > cap) {
    throw EnumerationLimitError("max_excess: n=" + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(cap));
  }
  game.require_winnable("max_excess");
  const auto [cut, psum] = most_violated(game, payoffs);
  (void)cut;
  return 1.0 - psum;
}

FeasibilityReport check_feasibility(const WeightedVotingGame& game,
                                    std::span<const double> payoffs,
                                    double epsilon, int cap, double tol) {
  if (static_cast<int>(payoffs.size()) != game.num_players()) {
    throw DimensionError(
        "check_feasibility: payoff length does not match player count");
  }
  const int n = game.num_players();
  if (n > cap) {
    throw EnumerationLimitError("check_feasibility: n=" + std::to_string(n) +
                                " exceeds enumeration cap " + std::to_string(cap));
  }
  game.require_winnable("check_feasibility");

  constexpr std::size_t kMaxStored = 10000;
  const auto& w = game.weights();
  const double q = game.quota();
  const std::uint64_t total = (1ULL << n) - 1;

  FeasibilityReport report;
  report.feasible = true;
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    double wsum = 0.0;
    double psum = 0.0;
    for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
      const int i = std::countr_zero(bits);
      wsum += w[static_cast<std::size_t>(i)];
      psum += payoffs[static_cast<std::size_t>(i)];
    }
    if (wsum < q) continue;
    if (psum < 1.0 - epsilon - tol) {
      report.feasible = false;
      ++report.total_violations;
      if (report.violations.size() < kMaxStored) {
        report.violations.push_back({Coalition(mask), 1.0 - psum});
      }
    }
  }
  return report;
}

}  // namespace coopsolve
