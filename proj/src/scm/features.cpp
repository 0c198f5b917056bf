#include "scm/features.hpp"

#include <cmath>

#include "core/error.hpp"

namespace geolift {

std::string_view ToString(AscVariant v) {
  switch (v) {
    case AscVariant::kY: return "ASC-Y";
    case AscVariant::kDem: return "ASC-DEM";
    case AscVariant::kDemLag: return "ASC-DEM-LAG";
  }
  return "?";
}

void StandardizeColumns(Eigen::MatrixXd& f) {
  const double n = static_cast<double>(f.rows());
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    auto col = f.col(c);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) col /= sd;
  }
}

Eigen::MatrixXd BuildFeatures(const Panel& panel, AscVariant variant, bool standardize) {
  const int n = panel.n_units;
  const int t_pre = panel.t_pre;
  const bool dem = variant != AscVariant::kY;
  const bool lag = variant == AscVariant::kDemLag;
  if (lag) {
    Require(panel.n_dynamic() > 0, ErrorCode::kInvalidArgument,
            "ASC-DEM-LAG needs a search-volume series (no dynamic covariates in panel)");
    Require(t_pre >= 3, ErrorCode::kInvalidArgument, "ASC-DEM-LAG needs t_pre >= 3");
  }
  const int width = t_pre + (dem ? panel.n_static() : 0) + (lag ? 2 : 0);
  Eigen::MatrixXd f(n, width);
  f.leftCols(t_pre) = panel.outcome.leftCols(t_pre);
  int col = t_pre;
  if (dem) {
    f.middleCols(col, panel.n_static()) = panel.static_covariates;
    col += panel.n_static();
  }
  if (lag) {
    const Eigen::MatrixXd& search = panel.dynamic_covariates[0];
    for (int lag_weeks = 1; lag_weeks <= 2; ++lag_weeks) {
      // Lagged series at week t is s_{t-lag}; averaged over pre weeks where defined.
      const int count = t_pre - lag_weeks;
      f.col(col) = search.leftCols(count).rowwise().sum() / count;
      ++col;
    }
  }
  Require(f.allFinite(), ErrorCode::kNumerical, "non-finite synthetic-control feature");
  if (standardize) StandardizeColumns(f);
  return f;
}

}  // namespace geolift
