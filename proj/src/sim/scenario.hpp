#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sim/baseline.hpp"
#include "sim/config.hpp"

namespace geolift {

// Generator state between the baseline and the observed outcome. All grids
// cover the exported weeks plus any lead weeks used by the covariate
// generator.
struct Components {
  Eigen::MatrixXd log_base;      // N x W
  Eigen::MatrixXd level_factor;  // N x W multiplier applied to Y0 after noise
  Eigen::MatrixXd tau;           // N x W proportional lift on Y0
  std::vector<int> ever_treated;
};

// Base impact grid: ImpactCurve for treated geos in post weeks, 0 elsewhere.
Eigen::MatrixXd BaseImpact(const SimConfig& cfg, const std::vector<int>& ever_treated, int n_weeks);

// Adds the scenario's single mechanism in place:
//   S1  log_base += beta2_i (t/t_pre)^2                    (all geos)
//   S2  tau      := tau_max * ImpactShape(t - t_pre; onset_i, duration_i, scale_i)
//   S3  level_factor *= (1 + shock) on treated post weeks; the lift stays
//       tau * unshocked Y0, so tau is divided by (1 + shock) there
//   S4  beta_i t/t_pre replaced by eta_i sigmoid(t/t_pre - 0.5)
//   S5  log_base += alpha_drift (t - t_pre) for control geos, t >= t_pre
// BASE leaves the components untouched.
void ApplyScenario(Components& components, const SimConfig& cfg, const ScenarioSpec& spec,
                   const UnitLatents& latents);

}  // namespace geolift
