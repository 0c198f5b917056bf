#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "core/panel.hpp"

namespace geolift {

// Feature sets for the donor-weight problem.
//   kY      pre-period outcomes only
//   kDem    + static covariates
//   kDemLag + pre-period means of the 1- and 2-week lagged search volume
enum class AscVariant { kY, kDem, kDemLag };

std::string_view ToString(AscVariant v);

// One row per unit. With `standardize`, every column is centred and scaled
// to unit population sd across all units; constant columns are only centred.
Eigen::MatrixXd BuildFeatures(const Panel& panel, AscVariant variant, bool standardize);

void StandardizeColumns(Eigen::MatrixXd& features);

}  // namespace geolift
