#pragma once

#include <Eigen/Dense>
#include <memory>

#include "learners/learner.hpp"

namespace geolift {

// Linear predictor with an unpenalized intercept. For the logistic kind the
// linear score is mapped through the logistic function.
class LinearModel final : public FittedModel {
 public:
  LinearModel(LearnerSpec spec, int train_rows, double intercept, Eigen::VectorXd coefficients,
              int iterations);

  double intercept() const { return intercept_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  int iterations() const { return iterations_; }

 protected:
  Eigen::VectorXd PredictImpl(const Eigen::MatrixXd& x) const override;

 private:
  double intercept_;
  Eigen::VectorXd coefficients_;
  int iterations_;
};

// min ||y - b0 - X b||^2 + lambda ||b||^2
std::shared_ptr<const LinearModel> FitRidge(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                            const Eigen::VectorXd& y);

// Penalized logistic regression (penalty lambda/2 ||b||^2) by Newton-IRLS.
std::shared_ptr<const LinearModel> FitLogistic(const LearnerSpec& spec,
                                               const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y);

}  // namespace geolift
