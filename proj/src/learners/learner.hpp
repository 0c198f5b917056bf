#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string_view>

#include "core/rng.hpp"

namespace geolift {

enum class LearnerKind { kGbtRegressor, kGbtClassifier, kRidge, kLogistic };

std::string_view ToString(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kGbtRegressor;
  int n_trees = 200;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 5;
  double subsample = 1.0;
  double l2_leaf = 1.0;
  double ridge_lambda = 1.0;

  void Validate() const;
  bool is_classifier() const {
    return kind == LearnerKind::kGbtClassifier || kind == LearnerKind::kLogistic;
  }
};

inline constexpr double kProbabilityFloor = 1e-6;

double ClipProbability(double p);

class FittedModel {
 public:
  virtual ~FittedModel() = default;

  // Regressors return levels, classifiers probabilities clipped to
  // [kProbabilityFloor, 1 - kProbabilityFloor]. The ridge learner used as a
  // propensity model returns unclipped linear-probability predictions.
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const;

  const LearnerSpec& spec() const { return spec_; }
  int train_rows() const { return train_rows_; }
  int n_features() const { return n_features_; }

 protected:
  FittedModel(LearnerSpec spec, int train_rows, int n_features)
      : spec_(spec), train_rows_(train_rows), n_features_(n_features) {}

  virtual Eigen::VectorXd PredictImpl(const Eigen::MatrixXd& x) const = 0;

 private:
  LearnerSpec spec_;
  int train_rows_;
  int n_features_;
};

// `rng` drives row subsampling only; fits with subsample = 1 never draw.
std::shared_ptr<const FittedModel> Fit(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y, RngStream rng);
std::shared_ptr<const FittedModel> Fit(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y);

}  // namespace geolift
