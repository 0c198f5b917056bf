#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/estimate_result.hpp"
#include "core/panel.hpp"
#include "scm/features.hpp"
#include "scm/simplex.hpp"

namespace geolift {

struct ScmSpec {
  AscVariant variant = AscVariant::kY;
  double ridge_lambda = 1.0;
  bool feature_standardize = true;
  // Re-fit every donor weight vector for each leave-one-treated-out sample
  // instead of re-averaging the fixed per-unit gaps.
  bool jackknife_refit = false;

  void Validate() const;
};

EstimatorId ToEstimatorId(AscVariant v);

struct CounterfactualAtt {
  double att_hat = 0.0;
  Eigen::VectorXd att_path;   // one entry per post week
  Eigen::MatrixXd unit_gaps;  // treated units x post weeks
  Eigen::VectorXd unit_att;   // per treated unit, mean gap over post weeks
};

struct ScmFit {
  std::vector<DonorWeights> weights;  // one per treated unit, in unit order
  CounterfactualAtt att;
};

// Fits one simplex-ridge weight vector per treated unit against the
// never-treated donor pool.
std::vector<DonorWeights> FitAllWeights(const Panel& panel, const ScmSpec& spec);

CounterfactualAtt ComputeCounterfactualAtt(const Panel& panel,
                                           const std::vector<DonorWeights>& weights);

ScmFit FitSyntheticControl(const Panel& panel, const ScmSpec& spec);

// Delete-one jackknife SE over per-unit ATTs.
double JackknifeSe(const Eigen::VectorXd& unit_att);

// Point estimate plus leave-one-treated-out jackknife CI.
EstimateResult JackknifeCi(const Panel& panel, const ScmSpec& spec);
EstimateResult JackknifeCi(const Panel& panel, const ScmSpec& spec, ScmFit* fit_out);

}  // namespace geolift
