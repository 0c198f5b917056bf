#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/estimate_result.hpp"

namespace geolift {

// Linear-interpolation sample quantile (the "type 7" definition).
double EmpiricalQuantile(const Eigen::VectorXd& values, double q);

struct IptwWeights {
  Eigen::VectorXd weights;
  double trim_threshold = 0.0;
  int n_trimmed = 0;  // weights that were above the threshold before clamping
};

// w = D (1 - p) / p + (1 - D) p / (1 - p), then winsorized at the
// trim_quantile sample quantile. trim_quantile = 1 leaves weights untouched.
IptwWeights ComputeIptwWeights(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& d_raw,
                               double trim_quantile);

struct SecondStageFit {
  double theta = 0.0;
  double se = 0.0;
  int n_clusters = 0;
  Eigen::VectorXd residuals;
};

// Weighted no-intercept regression of eps_y on eps_d with a geo-clustered
// sandwich variance and the G / (G - 1) small-cluster factor.
SecondStageFit FitSecondStage(const Eigen::VectorXd& eps_y, const Eigen::VectorXd& eps_d,
                              const Eigen::VectorXd& weights, const std::vector<int>& cluster);

EstimateResult SecondStage(EstimatorId id, const Eigen::VectorXd& eps_y,
                           const Eigen::VectorXd& eps_d, const Eigen::VectorXd& weights,
                           const std::vector<int>& cluster);

}  // namespace geolift
