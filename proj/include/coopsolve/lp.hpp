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

#ifndef COOPSOLVE_LP_HPP
#define COOPSOLVE_LP_HPP

#include <limits>
#include <span>
#include <vector>

#include "coopsolve/exact.hpp"
#include "coopsolve/games.hpp"

namespace coopsolve {

enum class RowSense { LessEqual, GreaterEqual, Equal };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline constexpr double kLpTol = 1e-9;

// Minimization problem: min c.x subject to rows and per-variable lower
// bounds. A lower bound of -infinity marks a free variable.
struct LinearProgram {
  explicit LinearProgram(int num_vars)
      : objective(static_cast<std::size_t>(num_vars), 0.0),
        lower_bounds(static_cast<std::size_t>(num_vars), 0.0) {}

  int num_vars() const { return static_cast<int>(objective.size()); }

  void add_row(std::vector<double> coeffs, RowSense sense, double rhs_value) {
    if (static_cast<int>(coeffs.size()) != num_vars()) {
      throw DimensionError("constraint row length does not match variable count");
    }
    rows.push_back(std::move(coeffs));
    senses.push_back(sense);
    rhs.push_back(rhs_value);
  }

  void set_free(int var) {
    lower_bounds[static_cast<std::size_t>(var)] =
        -std::numeric_limits<double>::infinity();
  }

  std::vector<double> objective;
  std::vector<double> lower_bounds;
  std::vector<std::vector<double>> rows;
  std::vector<RowSense> senses;
  std::vector<double> rhs;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Standard-form column indices of the final basic variables.
  std::vector<int> basis;
  int iterations = 0;
};

// Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.
// Deterministic for identical inputs; never throws for infeasible, unbounded,
// or iteration-limited problems (the status reports those).
LpSolution solve_lp(const LinearProgram& lp);

enum class LcFormulation { Naive, Minimal };

struct LeastCoreOptions {
  LcFormulation formulation = LcFormulation::Minimal;
  // Re-solve with a secondary objective pulling payoffs toward the uniform
  // split, replacing the arbitrary simplex corner with a canonical
  // representative when the least core is a set.
  bool canonical = false;
  int cap = kEnumerationCap;
  // Constraint count above which the LP is solved by lazy row generation
  // against the most-violated winning coalition instead of one dense solve.
  int dense_row_limit = 4096;
};

// Minimizes epsilon subject to every (minimal) winning coalition receiving at
// least 1 - epsilon, payoffs summing to 1, payoffs >= 0. Returns payoffs plus
// the least-core value.
SolutionVector least_core(const WeightedVotingGame& game,
                          const LeastCoreOptions& options = {});

// Largest excess 1 - sum_{i in C} p_i over winning coalitions C; for an
// imputation this is the maximal excess over all coalitions.
double max_excess(const WeightedVotingGame& game, std::span<const double> payoffs,
                  int cap = kEnumerationCap);

struct FeasibilityReport {
  bool feasible = false;
  struct Violation {
    Coalition coalition;
    double excess = 0.0;
  };
  // Violating coalitions with their excesses (capped; see total_violations).
  std::vector<Violation> violations;
  std::size_t total_violations = 0;
};

// Checks sum_{i in C} p_i >= 1 - epsilon - tol for every winning coalition.
FeasibilityReport check_feasibility(const WeightedVotingGame& game,
                                    std::span<const double> payoffs,
                                    double epsilon, int cap = kEnumerationCap,
                                    double tol = kLpTol);

}  // namespace coopsolve

#endif  // COOPSOLVE_LP_HPP
