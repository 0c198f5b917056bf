#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/rng.hpp"
#include "sim/baseline.hpp"
#include "sim/config.hpp"

namespace geolift {

struct Covariates {
  Eigen::MatrixXd static_covariates;               // N x P
  std::vector<Eigen::MatrixXd> dynamic_covariates; // Q slices of N x T
};

// Static covariate k is a noisy reading of one standardized latent, cycling
// through alpha, beta, gamma and (alpha - beta)/sqrt(2):
//   x_ik = z_ik + static_noise_sd * N(0,1).
// Dynamic slice 0 is weekly search volume, a leading demand signal:
//   s_it = exp(search_elasticity * (log Y0_{i,t+1} - m) + nu_it),
// with m the grand mean of log Y0 and nu_it ~ N(0, search_noise_sd^2).
// Further slices are pure N(0,1) noise.
//
// `y0_with_lead` must hold at least n_weeks + 1 columns of untreated outcomes.
Covariates GenCovariates(const SimConfig& cfg, const UnitLatents& latents,
                         const Eigen::MatrixXd& y0_with_lead, int n_weeks, RngStream& static_rng,
                         RngStream& dynamic_rng);

}  // namespace geolift
