#pragma once

#include <span>
#include <vector>

#include "fleetsample/model.hpp"

namespace fleetsample {

struct SolverConfig {
  double step_tolerance = 1e-10;
  long max_iterations = 100000;
  double objective_tolerance = 1e-9;

  void validate() const;
};

struct SolveResult {
  std::vector<Action> actions;
  /// Sum of P_i a_i over the blocks, in true-class space.
  Vector image;
  /// ||goal - image||_2 evaluated at the returned actions.
  double objective = 0.0;
  long iterations = 0;
  /// ||x - proj(x - grad)|| of the half squared objective, over all blocks.
  double kkt_residual = 0.0;
  /// False when max_iterations was hit; the actions are then the last iterate.
  bool converged = true;
};

/// Euclidean projection onto {x >= 0, 1^T x <= budget}.
Vector project_capped_simplex(const Vector& v, double budget);

/// Minimizes ||goal - sum_i P_i a_i||_2 subject to a_i >= 0, 1^T a_i <= budgets[i].
///
/// Projected gradient descent on the half squared norm with step 1/L, where L
/// bounds the largest eigenvalue of sum_i P_i P_i^T. Each block is projected
/// independently. `warm_start`, when nonempty, supplies one starting action per
/// block (projected onto its set before use); otherwise every block starts at 0.
/// The objective never increases from the starting point.
SolveResult solve_capped_lsq(std::span<const FeasibleDataMatrix> blocks, const Vector& goal,
                             std::span<const double> budgets, const SolverConfig& cfg,
                             std::span<const Vector> warm_start = {});

/// Single robot: minimizes ||target - counts - P a||.
SolveResult solve_single(const FeasibleDataMatrix& P, const CloudState& cloud, double budget,
                         const SolverConfig& cfg);

/// All robots jointly: minimizes ||target - counts - sum_i P_i a_i||. Only the
/// image sum_i P_i a_i is unique; the per-robot split is whatever descent reaches.
SolveResult solve_stacked(std::span<const FeasibleDataMatrix> P_list, const CloudState& cloud,
                          std::span<const double> budgets, const SolverConfig& cfg,
                          std::span<const Vector> warm_start = {});

}  // namespace fleetsample
