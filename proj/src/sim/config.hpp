#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace geolift {

// Generator parameters. Defaults follow the reference geo roll-out:
// 200 geos, 40 treated, 52 pre weeks, 12 campaign weeks.
struct SimConfig {
  int n_units = 200;
  int n_treated = 40;
  int t_pre = 52;
  int t_post = 12;
  double mu_growth = 1.20;     // annual baseline growth factor
  double tau_max = 0.23;       // peak proportional lift
  double a_season = 0.23;      // seasonal amplitude (log scale)
  double sigma_eps = 0.10;     // weekly log-noise sd
  double sigma_eta = 0.23;     // sd of the S4 sigmoid intercepts
  int t_season = 52;           // weeks per seasonal cycle
  double mu_alpha = std::log(30000.0);
  double sigma_alpha = 0.5;
  int n_static_cov = 4;
  int n_dynamic_cov = 2;
  // Covariate generator. Static covariates load on standardized unit latents
  // plus N(0, static_noise_sd^2); search volume carries N(0, search_noise_sd^2)
  // log-noise on top of the next-week outcome signal.
  double static_noise_sd = 0.75;
  double search_noise_sd = 0.10;
  double search_elasticity = 0.8;

  int n_weeks() const { return t_pre + t_post; }
  double beta_mean() const { return std::log(mu_growth); }
  double beta_sd() const { return 0.25 * std::abs(beta_mean()); }
  void Validate() const;
};

enum class ScenarioId { kBase, kS1, kS2, kS3, kS4, kS5 };

std::string_view ToString(ScenarioId id);
ScenarioId ParseScenarioId(std::string_view text);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct ScenarioSpec {
  ScenarioId id = ScenarioId::kBase;
  // S1: quadratic log-trend curvature beta2_i ~ N(mean, sd^2).
  double s1_beta2_mean = -0.10;
  double s1_beta2_sd = 0.03;
  // S2: per-geo impact curve onset / duration / sigmoid scale, uniform draws.
  Interval s2_onset{0.0, 6.0};
  Interval s2_duration{6.0, 12.0};
  Interval s2_scale{2.0, 5.0};
  // S3: proportional post-period shock on treated Y(0), drawn once per replication.
  double s3_shock_mean = 0.10;
  double s3_shock_sd = 0.02;
  // S4: eta_i ~ N(mean, sigma_eta^2) replaces the linear growth slope.
  double s4_eta_mean = 1.0;
  // S5: log-drift per post week added to control geos.
  double s5_alpha_drift = 0.005;

  // The sign constraints (S1 curvature negative, S5 drift positive) apply to the
  // active scenario; an exactly-zero magnitude switches the mechanism off.
  void Validate() const;
};

struct SimSettings {
  SimConfig config;
  ScenarioSpec scenario;
};

// Parses a flat JSON object whose keys are SimConfig / ScenarioSpec field
// names (intervals as two-element arrays). Absent keys keep their defaults;
// unknown keys are rejected. The scenario id is not part of the file.
SimSettings ParseSimSettingsJson(const std::string& json_text);
std::string SimSettingsToJson(const SimSettings& settings);

}  // namespace geolift
