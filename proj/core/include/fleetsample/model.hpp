#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fleetsample/error.hpp"

namespace fleetsample {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDistributionTolerance = 1e-9;
inline constexpr double kRankTolerance = 1e-8;
inline constexpr double kConditionCap = 1e8;

/// Probability vector over the classes. Entries are nonnegative and sum to 1.
class ClassDistribution {
 public:
  explicit ClassDistribution(Vector probs);

  static ClassDistribution uniform(std::size_t n_class);

  const Vector& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(probs_.size()); }
  double operator[](std::size_t k) const { return probs_(static_cast<Eigen::Index>(k)); }

 private:
  Vector probs_;
};

/// Row-stochastic matrix; entry (k, j) is p(predicted = j | true = k).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(Matrix rows);

  static ConfusionMatrix identity(std::size_t n_class);
  /// `accuracy` on the diagonal, the remaining mass split evenly off-diagonal.
  static ConfusionMatrix noisy_symmetric(std::size_t n_class, double accuracy);

  const Matrix& matrix() const noexcept { return rows_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }

 private:
  Matrix rows_;
};

/// Column-stochastic matrix whose column j is the posterior p(true | predicted = j).
/// Maps an action (predicted-class counts) to expected true-class counts.
class FeasibleDataMatrix {
 public:
  /// Validates column stochasticity and full rank.
  explicit FeasibleDataMatrix(Matrix cols);

  const Matrix& matrix() const noexcept { return cols_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(cols_.rows()); }

 private:
  struct Unchecked {};
  FeasibleDataMatrix(Matrix cols, Unchecked) : cols_(std::move(cols)) {}
  friend FeasibleDataMatrix build_feasible_matrix(const ConfusionMatrix&,
                                                  const ClassDistribution&);

  Matrix cols_;
};

/// Expected per-class counts of the cloud dataset plus the target it is steered toward.
class CloudState {
 public:
  CloudState(Vector counts, Vector target);

  const Vector& counts() const noexcept { return counts_; }
  const Vector& target() const noexcept { return target_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(counts_.size()); }

  /// target - counts
  Vector deficit() const { return target_ - counts_; }

 private:
  Vector counts_;
  Vector target_;
};

/// Intended uploads per predicted class, bounded by the cache budget.
class Action {
 public:
  Action(Vector counts, double cache_budget);

  const Vector& counts() const noexcept { return counts_; }
  double cache_budget() const noexcept { return cache_budget_; }

 private:
  Vector counts_;
  double cache_budget_;
};

/// Image of an action in true-class space, v = P a.
struct FeasibleAction {
  Vector expected_true_counts;
};

FeasibleAction to_feasible(const FeasibleDataMatrix& P, const Action& a);

struct RobotProfile {
  int id = 0;
  ClassDistribution true_dist;
  ConfusionMatrix confusion;
  long obs_per_round = 0;
  double cache_budget = 0.0;

  /// Checks dimensions and obs_per_round >= 10 * cache_budget.
  void validate() const;
};

enum class EstimationMode { GroundTruth, LinearInversion };

/// Bayes posterior columns p(y | y_hat = j) from a confusion channel and a class prior.
FeasibleDataMatrix build_feasible_matrix(const ConfusionMatrix& confusion,
                                         const ClassDistribution& true_dist);

/// Recovers p(y) from the predicted-label distribution.
///
/// GroundTruth returns `scenario_truth` unchanged. LinearInversion solves
/// C^T p = pred and projects the solution onto the probability simplex; it
/// throws SingularChannel when C^T has condition number above kConditionCap.
ClassDistribution estimate_true_distribution(const ClassDistribution& pred_dist,
                                             const ConfusionMatrix& confusion,
                                             EstimationMode mode,
                                             const ClassDistribution& scenario_truth);

CloudState update_cloud_counts(const CloudState& state, std::span<const Vector> contributions);

/// ||target - counts||_2
double loss_l2(const CloudState& state);

/// Euclidean projection onto {x >= 0, 1^T x = 1}.
Vector project_probability_simplex(const Vector& v);

}  // namespace fleetsample
