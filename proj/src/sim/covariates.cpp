#include "sim/covariates.hpp"

#include <cmath>

#include "core/error.hpp"

namespace geolift {

namespace {

double Standardize(double value, double mean, double sd) {
  return sd > 0.0 ? (value - mean) / sd : 0.0;
}

}  // namespace

Covariates GenCovariates(const SimConfig& cfg, const UnitLatents& u,
                         const Eigen::MatrixXd& y0_with_lead, int n_weeks, RngStream& static_rng,
                         RngStream& dynamic_rng) {
  const int n = cfg.n_units;
  Require(y0_with_lead.rows() == n && y0_with_lead.cols() >= n_weeks + 1,
          ErrorCode::kDimensionMismatch, "covariate generator needs one lead week of Y0");
  Covariates out;

  out.static_covariates.resize(n, cfg.n_static_cov);
  for (int i = 0; i < n; ++i) {
    const double za = Standardize(u.alpha(i), cfg.mu_alpha, cfg.sigma_alpha);
    const double zb = Standardize(u.beta(i), cfg.beta_mean(), cfg.beta_sd());
    const double zg = Standardize(u.gamma(i), cfg.a_season, cfg.a_season / 4.0);
    for (int k = 0; k < cfg.n_static_cov; ++k) {
      double signal = 0.0;
      switch (k % 4) {
        case 0: signal = za; break;
        case 1: signal = zb; break;
        case 2: signal = zg; break;
        default: signal = (za - zb) / std::sqrt(2.0); break;
      }
      out.static_covariates(i, k) = signal + static_rng.Normal(0.0, cfg.static_noise_sd);
    }
  }

  if (cfg.n_dynamic_cov == 0) return out;
  const Eigen::MatrixXd log_y0 = y0_with_lead.leftCols(n_weeks + 1).array().log().matrix();
  const double grand_mean = log_y0.mean();
  Eigen::MatrixXd search(n, n_weeks);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < n_weeks; ++t)
      search(i, t) = std::exp(cfg.search_elasticity * (log_y0(i, t + 1) - grand_mean) +
                              dynamic_rng.Normal(0.0, cfg.search_noise_sd));
  out.dynamic_covariates.push_back(std::move(search));
  for (int q = 1; q < cfg.n_dynamic_cov; ++q) {
    Eigen::MatrixXd noise(n, n_weeks);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < n_weeks; ++t) noise(i, t) = dynamic_rng.Normal(0.0, 1.0);
    out.dynamic_covariates.push_back(std::move(noise));
  }
  return out;
}

}  // namespace geolift
