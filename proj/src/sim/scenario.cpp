#include "sim/scenario.hpp"

#include "core/error.hpp"

namespace geolift {

Eigen::MatrixXd BaseImpact(const SimConfig& cfg, const std::vector<int>& ever_treated,
                           int n_weeks) {
  const int n = static_cast<int>(ever_treated.size());
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(n, n_weeks);
  for (int i = 0; i < n; ++i) {
    if (ever_treated[i] != 1) continue;
    for (int t = cfg.t_pre; t < n_weeks; ++t) tau(i, t) = ImpactCurve(t, cfg);
  }
  return tau;
}

void ApplyScenario(Components& c, const SimConfig& cfg, const ScenarioSpec& spec,
                   const UnitLatents& u) {
  const auto n = c.log_base.rows();
  const auto w = c.log_base.cols();
  Require(c.tau.rows() == n && c.tau.cols() == w && c.level_factor.rows() == n &&
              c.level_factor.cols() == w && static_cast<Eigen::Index>(c.ever_treated.size()) == n &&
              u.alpha.size() == n,
          ErrorCode::kDimensionMismatch, "scenario components disagree in shape");
  switch (spec.id) {
    case ScenarioId::kBase:
      return;
    case ScenarioId::kS1:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index t = 0; t < w; ++t) {
          const double x = static_cast<double>(t) / cfg.t_pre;
          c.log_base(i, t) += u.beta2(i) * (x * x);
        }
      return;
    case ScenarioId::kS2:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c.ever_treated[i] != 1) continue;
        for (Eigen::Index t = cfg.t_pre; t < w; ++t)
          c.tau(i, t) = cfg.tau_max * ImpactShape(static_cast<double>(t - cfg.t_pre), u.onset(i),
                                                  u.duration(i), u.scale(i));
      }
      return;
    case ScenarioId::kS3: {
      const double factor = 1.0 + u.shock;
      Require(factor > 0.0, ErrorCode::kNumerical, "S3 shock must keep outcomes positive");
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c.ever_treated[i] != 1) continue;
        for (Eigen::Index t = cfg.t_pre; t < w; ++t) {
          c.level_factor(i, t) *= factor;
          c.tau(i, t) /= factor;
        }
      }
      return;
    }
    case ScenarioId::kS4:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index t = 0; t < w; ++t) {
          const double x = static_cast<double>(t) / cfg.t_pre;
          c.log_base(i, t) += u.eta(i) * Sigmoid(x - 0.5) - u.beta(i) * x;
        }
      return;
    case ScenarioId::kS5:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c.ever_treated[i] == 1) continue;
        for (Eigen::Index t = cfg.t_pre; t < w; ++t)
          c.log_base(i, t) += spec.s5_alpha_drift * static_cast<double>(t - cfg.t_pre);
      }
      return;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario id");
}

}  // namespace geolift
