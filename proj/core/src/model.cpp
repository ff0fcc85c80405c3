#include "fleetsample/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fleetsample {

namespace {

bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

void check_distribution(const Vector& p, const char* what) {
  if (p.size() == 0) throw Error(ErrorCode::InvalidDistribution, std::string(what) + " is empty");
  if (!all_finite(p)) throw Error(ErrorCode::InvalidDistribution, std::string(what) + " has non-finite entries");
  if ((p.array() < 0.0).any())
    throw Error(ErrorCode::InvalidDistribution, std::string(what) + " has negative entries");
  if (std::abs(p.sum() - 1.0) > kDistributionTolerance)
    throw Error(ErrorCode::InvalidDistribution,
                std::string(what) + " sums to " + std::to_string(p.sum()));
}

// Ratio of smallest to largest singular value.
double inverse_condition(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

}  // namespace

ClassDistribution::ClassDistribution(Vector probs) : probs_(std::move(probs)) {
  check_distribution(probs_, "class distribution");
}

ClassDistribution ClassDistribution::uniform(std::size_t n_class) {
  if (n_class == 0) throw Error(ErrorCode::ZeroClasses, "uniform distribution over zero classes");
  return ClassDistribution(Vector::Constant(static_cast<Eigen::Index>(n_class),
                                            1.0 / static_cast<double>(n_class)));
}

ConfusionMatrix::ConfusionMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols())
    throw Error(ErrorCode::InvalidConfusion, "confusion matrix must be square and nonempty");
  if (!all_finite(rows_)) throw Error(ErrorCode::InvalidConfusion, "non-finite entry");
  if ((rows_.array() < 0.0).any() || (rows_.array() > 1.0).any())
    throw Error(ErrorCode::InvalidConfusion, "entries must lie in [0, 1]");
  for (Eigen::Index k = 0; k < rows_.rows(); ++k) {
    const double s = rows_.row(k).sum();
    if (std::abs(s - 1.0) > kDistributionTolerance)
      throw Error(ErrorCode::RowNotStochastic,
                  "row " + std::to_string(k) + " sums to " + std::to_string(s));
  }
}

ConfusionMatrix ConfusionMatrix::identity(std::size_t n_class) {
  const auto n = static_cast<Eigen::Index>(n_class);
  return ConfusionMatrix(Matrix::Identity(n, n));
}

ConfusionMatrix ConfusionMatrix::noisy_symmetric(std::size_t n_class, double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0))
    throw Error(ErrorCode::InvalidConfusion, "accuracy must lie in [0, 1]");
  const auto n = static_cast<Eigen::Index>(n_class);
  if (n == 1) return identity(1);
  const double off = (1.0 - accuracy) / static_cast<double>(n - 1);
  Matrix m = Matrix::Constant(n, n, off);
  m.diagonal().setConstant(accuracy);
  return ConfusionMatrix(std::move(m));
}

FeasibleDataMatrix::FeasibleDataMatrix(Matrix cols) : cols_(std::move(cols)) {
  if (cols_.rows() == 0 || cols_.rows() != cols_.cols())
    throw Error(ErrorCode::DimensionMismatch, "feasible data matrix must be square and nonempty");
  for (Eigen::Index j = 0; j < cols_.cols(); ++j) {
    check_distribution(cols_.col(j), ("column " + std::to_string(j)).c_str());
  }
  if (inverse_condition(cols_) < kRankTolerance)
    throw Error(ErrorCode::RankDeficient, "columns are linearly dependent");
}

CloudState::CloudState(Vector counts, Vector target)
    : counts_(std::move(counts)), target_(std::move(target)) {
  if (counts_.size() != target_.size())
    throw Error(ErrorCode::DimensionMismatch, "cloud counts and target differ in length");
  if (!all_finite(counts_) || !all_finite(target_))
    throw Error(ErrorCode::InvalidArgument, "cloud state has non-finite entries");
  if ((counts_.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "cloud counts must be nonnegative");
  if ((target_.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "target counts must be nonnegative");
}

Action::Action(Vector counts, double cache_budget)
    : counts_(std::move(counts)), cache_budget_(cache_budget) {
  if (!(cache_budget_ > 0.0)) throw Error(ErrorCode::NegativeBudget, "cache budget must be positive");
  if (!all_finite(counts_) || (counts_.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "action counts must be finite and nonnegative");
  if (counts_.sum() > cache_budget_ + kDistributionTolerance)
    throw Error(ErrorCode::InvalidArgument, "action exceeds cache budget");
}

FeasibleAction to_feasible(const FeasibleDataMatrix& P, const Action& a) {
  if (P.matrix().cols() != a.counts().size())
    throw Error(ErrorCode::DimensionMismatch, "action length differs from feasible matrix");
  return FeasibleAction{P.matrix() * a.counts()};
}

void RobotProfile::validate() const {
  if (true_dist.size() != confusion.size())
    throw Error(ErrorCode::DimensionMismatch,
                "robot " + std::to_string(id) + ": true_dist and confusion sizes differ");
  if (!(cache_budget > 0.0))
    throw Error(ErrorCode::NegativeBudget, "robot " + std::to_string(id) + ": cache_budget must be positive");
  if (static_cast<double>(obs_per_round) < 10.0 * cache_budget)
    throw Error(ErrorCode::InvalidArgument,
                "robot " + std::to_string(id) + ": obs_per_round must be at least 10x cache_budget");
}

FeasibleDataMatrix build_feasible_matrix(const ConfusionMatrix& confusion,
                                         const ClassDistribution& true_dist) {
  const Matrix& C = confusion.matrix();
  const Vector& p = true_dist.probs();
  if (C.rows() != p.size())
    throw Error(ErrorCode::DimensionMismatch, "confusion and distribution sizes differ");

  // Joint p(y_k, y_hat_j) = p(y_k) C(k, j); normalize each column by p(y_hat_j).
  Matrix joint = p.asDiagonal() * C;
  for (Eigen::Index j = 0; j < joint.cols(); ++j) {
    const double mass = joint.col(j).sum();
    if (!(mass > 0.0))
      throw Error(ErrorCode::ZeroPredictedMass, "predicted class " + std::to_string(j) + " has zero mass");
    joint.col(j) /= mass;
  }
  if (inverse_condition(joint) < kRankTolerance)
    throw Error(ErrorCode::RankDeficient, "posterior columns are linearly dependent");
  return FeasibleDataMatrix(std::move(joint), FeasibleDataMatrix::Unchecked{});
}

Vector project_probability_simplex(const Vector& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Vector out = (v.array() - theta).max(0.0);
  // Renormalize away rounding so the result passes the distribution check.
  return out / out.sum();
}

ClassDistribution estimate_true_distribution(const ClassDistribution& pred_dist,
                                             const ConfusionMatrix& confusion,
                                             EstimationMode mode,
                                             const ClassDistribution& scenario_truth) {
  if (pred_dist.size() != confusion.size())
    throw Error(ErrorCode::DimensionMismatch, "predicted distribution and confusion sizes differ");
  if (mode == EstimationMode::GroundTruth) return scenario_truth;

  const Matrix Ct = confusion.matrix().transpose();
  Eigen::JacobiSVD<Matrix> svd(Ct, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0 || s(0) / s(s.size() - 1) > kConditionCap)
    throw Error(ErrorCode::SingularChannel, "confusion transpose is ill-conditioned");
  const Vector solved = svd.solve(pred_dist.probs());
  return ClassDistribution(project_probability_simplex(solved));
}

CloudState update_cloud_counts(const CloudState& state, std::span<const Vector> contributions) {
  Vector counts = state.counts();
  for (const Vector& c : contributions) {
    if (c.size() != counts.size())
      throw Error(ErrorCode::DimensionMismatch, "contribution length differs from cloud");
    if ((c.array() < 0.0).any())
      throw Error(ErrorCode::NegativeContribution, "contribution has negative entries");
    counts += c;
  }
  return CloudState(std::move(counts), state.target());
}

double loss_l2(const CloudState& state) { return state.deficit().norm(); }

}  // namespace fleetsample
