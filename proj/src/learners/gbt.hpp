#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "learners/learner.hpp"

namespace geolift {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(const Eigen::MatrixXd& x, Eigen::Index row) const;
  int depth() const;
};

// Boosted trees on squared loss (regressor) or logistic loss (classifier).
// Scores are raw margins: levels for the regressor, log-odds for the
// classifier.
class GbtModel final : public FittedModel {
 public:
  GbtModel(LearnerSpec spec, int train_rows, int n_features, double base_score,
           std::vector<RegressionTree> trees);

  // Raw score using only the first `n_stages` trees.
  Eigen::VectorXd PredictScore(const Eigen::MatrixXd& x, int n_stages) const;

  double base_score() const { return base_score_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  // Mean loss on (x, y) after 0, 1, ..., n_trees stages (squared error for the
  // regressor, log loss for the classifier).
  std::vector<double> LossPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;

 protected:
  Eigen::VectorXd PredictImpl(const Eigen::MatrixXd& x) const override;

 private:
  double base_score_;
  std::vector<RegressionTree> trees_;
};

std::shared_ptr<const GbtModel> FitGbt(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y, RngStream& rng);

}  // namespace geolift
