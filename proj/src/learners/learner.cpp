#include "learners/learner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "learners/gbt.hpp"
#include "learners/linear.hpp"

namespace geolift {

std::string_view ToString(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kGbtRegressor: return "gbt-regressor";
    case LearnerKind::kGbtClassifier: return "gbt-classifier";
    case LearnerKind::kRidge: return "ridge";
    case LearnerKind::kLogistic: return "logistic";
  }
  return "?";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (LearnerKind k : {LearnerKind::kGbtRegressor, LearnerKind::kGbtClassifier,
                        LearnerKind::kRidge, LearnerKind::kLogistic}) {
    if (lower == ToString(k)) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown learner kind '" + std::string(name) + "'");
}

void LearnerSpec::Validate() const {
  Require(n_trees >= 0, ErrorCode::kInvalidArgument, "n_trees must be >= 0");
  Require(max_depth >= 1, ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  Require(learning_rate > 0.0 && learning_rate <= 1.0, ErrorCode::kInvalidArgument,
          "learning_rate must be in (0, 1]");
  Require(min_leaf >= 1, ErrorCode::kInvalidArgument, "min_leaf must be >= 1");
  Require(subsample > 0.0 && subsample <= 1.0, ErrorCode::kInvalidArgument,
          "subsample must be in (0, 1]");
  Require(l2_leaf >= 0.0 && std::isfinite(l2_leaf), ErrorCode::kInvalidArgument,
          "l2_leaf must be finite and >= 0");
  Require(ridge_lambda >= 0.0 && std::isfinite(ridge_lambda), ErrorCode::kInvalidArgument,
          "ridge_lambda must be finite and >= 0");
}

double ClipProbability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

Eigen::VectorXd FittedModel::Predict(const Eigen::MatrixXd& x) const {
  Require(x.cols() == n_features_, ErrorCode::kDimensionMismatch,
          "model trained on " + std::to_string(n_features_) + " features, got " +
              std::to_string(x.cols()));
  Require(x.allFinite(), ErrorCode::kNumerical, "non-finite feature value in predict");
  return PredictImpl(x);
}

std::shared_ptr<const FittedModel> Fit(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y, RngStream rng) {
  spec.Validate();
  Require(x.rows() == y.size(), ErrorCode::kDimensionMismatch,
          "feature rows and target length differ");
  Require(x.allFinite(), ErrorCode::kNumerical, "non-finite feature value");
  Require(y.allFinite(), ErrorCode::kNumerical, "non-finite target value");
  if (spec.is_classifier()) {
    Require(((y.array() == 0.0) || (y.array() == 1.0)).all(), ErrorCode::kInvalidArgument,
            "classifier targets must be 0 or 1");
  }
  switch (spec.kind) {
    case LearnerKind::kGbtRegressor:
    case LearnerKind::kGbtClassifier:
      return FitGbt(spec, x, y, rng);
    case LearnerKind::kRidge:
      return FitRidge(spec, x, y);
    case LearnerKind::kLogistic:
      return FitLogistic(spec, x, y);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown learner kind");
}

std::shared_ptr<const FittedModel> Fit(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y) {
  return Fit(spec, x, y, RngStream(0, 0, "learner/default"));
}

}  // namespace geolift
