#include "fleetsample/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace fleetsample {

namespace {

constexpr int kPowerIterations = 100;
// Power iteration approaches lambda_max from below; keep the step safely under 1/L.
constexpr double kLipschitzMargin = 1.01;

double largest_eigenvalue(const Matrix& gram) {
  Vector x = Vector::Ones(gram.rows());
  x.normalize();
  for (int k = 0; k < kPowerIterations; ++k) {
    Vector y = gram * x;
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    x = y / n;
  }
  return x.dot(gram * x);
}

struct Problem {
  std::span<const FeasibleDataMatrix> blocks;
  const Vector& goal;
  std::span<const double> budgets;

  Eigen::Index n() const { return goal.size(); }

  Vector image(std::span<const Vector> x) const {
    Vector v = Vector::Zero(n());
    for (std::size_t i = 0; i < blocks.size(); ++i) v.noalias() += blocks[i].matrix() * x[i];
    return v;
  }
};

double objective_of(const Problem& problem, std::span<const Vector> x) {
  return (problem.goal - problem.image(x)).norm();
}

// Solves the equality-constrained least-squares problem on the support of `x`
// (entries above a small threshold, with the budget row kept for blocks sitting
// on their cap). Returns true and overwrites `x` when the result is feasible and
// no worse than the current point.
bool polish_on_support(const Problem& problem, std::vector<Vector>& x) {
  const Eigen::Index n = problem.n();
  const std::size_t m = problem.blocks.size();

  std::vector<std::pair<std::size_t, Eigen::Index>> free;
  std::vector<std::size_t> capped;
  for (std::size_t i = 0; i < m; ++i) {
    const double budget = problem.budgets[i];
    const double active_tol = 1e-9 * std::max(1.0, budget);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (x[i](k) > active_tol) free.emplace_back(i, k);
    }
    if (budget - x[i].sum() <= active_tol) capped.push_back(i);
  }
  const auto nf = static_cast<Eigen::Index>(free.size());
  const auto nc = static_cast<Eigen::Index>(capped.size());
  if (nf == 0) return false;

  Matrix A(n, nf);
  for (Eigen::Index c = 0; c < nf; ++c) A.col(c) = problem.blocks[free[c].first].matrix().col(free[c].second);

  Matrix kkt = Matrix::Zero(nf + nc, nf + nc);
  Vector rhs(nf + nc);
  kkt.topLeftCorner(nf, nf) = A.transpose() * A;
  rhs.head(nf) = A.transpose() * problem.goal;
  for (Eigen::Index r = 0; r < nc; ++r) {
    for (Eigen::Index c = 0; c < nf; ++c) {
      if (free[c].first == capped[r]) {
        kkt(nf + r, c) = 1.0;
        kkt(c, nf + r) = 1.0;
      }
    }
    rhs(nf + r) = problem.budgets[capped[r]];
  }
  const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return false;

  std::vector<Vector> candidate(m, Vector::Zero(n));
  for (Eigen::Index c = 0; c < nf; ++c) {
    if (sol(c) < -1e-9) return false;
    candidate[free[c].first](free[c].second) = std::max(sol(c), 0.0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (candidate[i].sum() > problem.budgets[i] + 1e-9) return false;
    candidate[i] = project_capped_simplex(candidate[i], problem.budgets[i]);
  }
  if (objective_of(problem, candidate) > objective_of(problem, x)) return false;
  x.swap(candidate);
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(step_tolerance > 0.0) || !(objective_tolerance > 0.0) || max_iterations <= 0)
    throw Error(ErrorCode::InvalidArgument, "solver tolerances and max_iterations must be positive");
}

Vector project_capped_simplex(const Vector& v, double budget) {
  if (budget < 0.0) throw Error(ErrorCode::NegativeBudget, "budget " + std::to_string(budget));
  Vector clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= budget) return clipped;

  // The cap is active: water-fill down to the budget, x = max(v - theta, 0).
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - budget) / static_cast<double>(k + 1);
    if (sorted[k] > candidate) theta = candidate;
  }
  Vector out = (v.array() - theta).max(0.0);
  // Rounding in theta can leave the sum a few ulps over the cap.
  const double s = out.sum();
  if (s > budget) out *= budget / s;
  return out;
}

SolveResult solve_capped_lsq(std::span<const FeasibleDataMatrix> blocks, const Vector& goal,
                             std::span<const double> budgets, const SolverConfig& cfg,
                             std::span<const Vector> warm_start) {
  cfg.validate();
  if (blocks.empty()) throw Error(ErrorCode::EmptyFleet, "no blocks to solve");
  if (budgets.size() != blocks.size())
    throw Error(ErrorCode::DimensionMismatch, "one budget per block required");
  if (!warm_start.empty() && warm_start.size() != blocks.size())
    throw Error(ErrorCode::DimensionMismatch, "one warm-start action per block required");
  const Eigen::Index n = goal.size();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (static_cast<Eigen::Index>(blocks[i].size()) != n)
      throw Error(ErrorCode::DimensionMismatch, "block " + std::to_string(i) + " has wrong size");
    if (!(budgets[i] > 0.0))
      throw Error(ErrorCode::NegativeBudget, "budget " + std::to_string(i) + " must be positive");
    if (!warm_start.empty() && warm_start[i].size() != n)
      throw Error(ErrorCode::DimensionMismatch, "warm start " + std::to_string(i) + " has wrong size");
  }

  const Problem problem{blocks, goal, budgets};
  const std::size_t m = blocks.size();

  Matrix gram = Matrix::Zero(n, n);
  for (const auto& P : blocks) gram.noalias() += P.matrix() * P.matrix().transpose();
  const double lipschitz = largest_eigenvalue(gram) * kLipschitzMargin;
  const double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

  std::vector<Vector> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = warm_start.empty() ? Vector::Zero(n) : project_capped_simplex(warm_start[i], budgets[i]);
  }
  Vector residual = goal - problem.image(x);
  double objective = residual.norm();

  std::vector<Vector> next(m);
  long iter = 0;
  bool converged = false;
  while (iter < cfg.max_iterations) {
    ++iter;
    double moved_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      // grad of 0.5 ||goal - A x||^2 w.r.t. block i is -P_i^T residual
      next[i] = project_capped_simplex(x[i] + step * (blocks[i].matrix().transpose() * residual),
                                       budgets[i]);
      moved_sq += (next[i] - x[i]).squaredNorm();
    }
    Vector next_residual = goal - problem.image(next);
    const double next_objective = next_residual.norm();
    const double improvement = objective - next_objective;
    if (next_objective > objective) {
      // Rounding-level increase; keep the better iterate and stop.
      converged = std::sqrt(moved_sq) <= cfg.step_tolerance * 1e3;
      break;
    }
    x.swap(next);
    residual = std::move(next_residual);
    objective = next_objective;
    if (std::sqrt(moved_sq) <= cfg.step_tolerance && improvement <= cfg.objective_tolerance) {
      converged = true;
      break;
    }
  }

  if (polish_on_support(problem, x)) {
    residual = goal - problem.image(x);
    objective = residual.norm();
  }

  SolveResult result;
  result.iterations = iter;
  result.converged = converged;
  result.image = goal - residual;
  result.objective = objective;
  double kkt_sq = 0.0;
  result.actions.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector grad = -(blocks[i].matrix().transpose() * residual);
    kkt_sq += (x[i] - project_capped_simplex(x[i] - grad, budgets[i])).squaredNorm();
    result.actions.emplace_back(x[i], budgets[i]);
  }
  result.kkt_residual = std::sqrt(kkt_sq);
  return result;
}

SolveResult solve_single(const FeasibleDataMatrix& P, const CloudState& cloud, double budget,
                         const SolverConfig& cfg) {
  const double budgets[] = {budget};
  return solve_capped_lsq(std::span<const FeasibleDataMatrix>(&P, 1), cloud.deficit(), budgets, cfg);
}

SolveResult solve_stacked(std::span<const FeasibleDataMatrix> P_list, const CloudState& cloud,
                          std::span<const double> budgets, const SolverConfig& cfg,
                          std::span<const Vector> warm_start) {
  return solve_capped_lsq(P_list, cloud.deficit(), budgets, cfg, warm_start);
}

}  // namespace fleetsample
