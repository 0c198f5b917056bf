#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "core/estimate_result.hpp"
#include "core/panel.hpp"

namespace geolift {

enum class DmlVariant { kTwfe, kWg, kFd, kCre };

std::string_view ToString(DmlVariant v);
DmlVariant ParseDmlVariant(std::string_view text);
EstimatorId ToEstimatorId(DmlVariant v);

struct TransformOptions {
  // Adds the week index to the CRE feature set.
  bool cre_include_week = true;
  // Adds the geo mean of D to the CRE feature set.
  bool cre_include_treatment_mean = true;
};

// Long-format learning problem. Rows are geo-major: all retained weeks of geo
// 0, then geo 1, and so on.
struct TransformedPanel {
  DmlVariant variant = DmlVariant::kTwfe;
  Eigen::VectorXd y_dagger;
  Eigen::VectorXd d_dagger;
  Eigen::MatrixXd x_dagger;
  Eigen::VectorXd d_raw;  // untransformed D_it of each retained row
  std::vector<int> geo_of_row;
  std::vector<int> week_of_row;
  std::vector<std::string> feature_names;
  int n_geos = 0;
  int weeks_per_geo = 0;
  int rows_dropped = 0;

  Eigen::Index rows() const { return y_dagger.size(); }
};

//   TWFE  static, dynamic, week, N-1 geo dummies, T-1 week dummies; y, D raw
//   WG    geo-demeaned dynamic and week; y, D geo-demeaned; static dropped
//   FD    first-differenced dynamic plus the week index; y, D differenced;
//         week 0 dropped; static dropped
//   CRE   static, dynamic, geo means of dynamic, optionally the geo mean of
//         D and the week index; y, D raw
TransformedPanel Transform(const Panel& panel, DmlVariant variant,
                           const TransformOptions& options = {});

// Maps a per-row surface fitted on raw D (the propensity) through the same
// operation the variant applies to D: identity for TWFE/CRE, geo-demeaning
// for WG, within-geo differencing for FD. The first retained FD row of each
// geo has no predecessor row and maps to 0.
Eigen::VectorXd TransformTreatmentSurface(const TransformedPanel& tp,
                                          const Eigen::VectorXd& surface);

}  // namespace geolift
