#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/rng.hpp"
#include "dml/dml_spec.hpp"
#include "dml/folds.hpp"
#include "dml/transform.hpp"

namespace geolift {

struct FoldDiagnostics {
  int fold = 0;
  int train_rows = 0;
  int test_rows = 0;
  double outcome_test_rmse = 0.0;
  double propensity_test_mean = 0.0;
};

struct CrossfitResult {
  Eigen::VectorXd eps_y;
  Eigen::VectorXd eps_d;
  Eigen::VectorXd p_hat;       // clipped propensity, for the IPTW weights
  Eigen::VectorXd y_hat;       // out-of-fold outcome prediction on the y-dagger scale
  Eigen::VectorXd d_hat;       // transformed propensity surface
  std::vector<FoldDiagnostics> folds;
};

// `cluster_fold[c]` is the fold of cluster c, where clusters are the values of
// tp.geo_of_row. Each fold's rows are predicted by models trained only on rows
// of clusters in other folds.
CrossfitResult CrossfitResiduals(const TransformedPanel& tp, const std::vector<int>& cluster_fold,
                                 int n_folds, const DmlSpec& spec, const RngStream& rng);

CrossfitResult CrossfitResiduals(const TransformedPanel& tp, const FoldAssignment& folds,
                                 const DmlSpec& spec, const RngStream& rng);

}  // namespace geolift
