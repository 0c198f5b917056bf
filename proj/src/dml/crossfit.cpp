#include "dml/crossfit.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace geolift {

namespace {

Eigen::MatrixXd SelectRows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (size_t k = 0; k < rows.size(); ++k) out(static_cast<Eigen::Index>(k), c) = m(rows[k], c);
  }
  return out;
}

Eigen::VectorXd SelectRows(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (size_t k = 0; k < rows.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[rows[k]];
  return out;
}

}  // namespace

CrossfitResult CrossfitResiduals(const TransformedPanel& tp, const std::vector<int>& cluster_fold,
                                 int n_folds, const DmlSpec& spec, const RngStream& rng) {
  const Eigen::Index n = tp.rows();
  Require(static_cast<Eigen::Index>(tp.geo_of_row.size()) == n, ErrorCode::kDimensionMismatch,
          "geo_of_row length differs from row count");
  CrossfitResult out;
  out.y_hat = Eigen::VectorXd::Constant(n, std::nan(""));
  Eigen::VectorXd surface = Eigen::VectorXd::Constant(n, std::nan(""));
  out.p_hat.resize(n);

  for (int k = 0; k < n_folds; ++k) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (Eigen::Index r = 0; r < n; ++r) {
      const int g = tp.geo_of_row[static_cast<size_t>(r)];
      Require(g >= 0 && g < static_cast<int>(cluster_fold.size()), ErrorCode::kInvalidArgument,
              "row cluster has no fold");
      (cluster_fold[static_cast<size_t>(g)] == k ? test : train).push_back(r);
    }
    const std::string where = "fold " + std::to_string(k) + ": ";
    Require(!test.empty() && !train.empty(), ErrorCode::kInvalidArgument,
            where + "empty train or test set");
    const Eigen::MatrixXd x_train = SelectRows(tp.x_dagger, train);
    const Eigen::MatrixXd x_test = SelectRows(tp.x_dagger, test);
    Eigen::VectorXd y_pred;
    Eigen::VectorXd d_pred;
    try {
      const auto outcome = Fit(spec.outcome_learner, x_train, SelectRows(tp.y_dagger, train),
                               rng.Derive("outcome/" + std::to_string(k)));
      y_pred = outcome->Predict(x_test);
      const auto propensity = Fit(spec.propensity_learner, x_train, SelectRows(tp.d_raw, train),
                                  rng.Derive("propensity/" + std::to_string(k)));
      d_pred = propensity->Predict(x_test);
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
    FoldDiagnostics diag;
    diag.fold = k;
    diag.train_rows = static_cast<int>(train.size());
    diag.test_rows = static_cast<int>(test.size());
    double sse = 0.0;
    for (size_t j = 0; j < test.size(); ++j) {
      const Eigen::Index r = test[j];
      out.y_hat[r] = y_pred[static_cast<Eigen::Index>(j)];
      surface[r] = d_pred[static_cast<Eigen::Index>(j)];
      out.p_hat[r] = ClipProbability(surface[r]);
      const double e = tp.y_dagger[r] - out.y_hat[r];
      sse += e * e;
    }
    diag.outcome_test_rmse = std::sqrt(sse / static_cast<double>(test.size()));
    diag.propensity_test_mean = d_pred.mean();
    out.folds.push_back(diag);
  }
  Require(out.y_hat.allFinite() && surface.allFinite(), ErrorCode::kEstimatorFailure,
          "some rows were not predicted by any fold");
  out.d_hat = TransformTreatmentSurface(tp, surface);
  out.eps_y = tp.y_dagger - out.y_hat;
  out.eps_d = tp.d_dagger - out.d_hat;
  return out;
}

CrossfitResult CrossfitResiduals(const TransformedPanel& tp, const FoldAssignment& folds,
                                 const DmlSpec& spec, const RngStream& rng) {
  return CrossfitResiduals(tp, folds.fold_of_geo, folds.n_folds, spec, rng);
}

}  // namespace geolift
