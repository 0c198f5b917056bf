#include "sim/baseline.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace geolift {

namespace {

Eigen::VectorXd NormalVector(int n, double mean, double sd, RngStream rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.Normal(mean, sd);
  return v;
}

Eigen::VectorXd UniformVector(int n, const Interval& range, RngStream rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.Uniform(range.low, range.high);
  return v;
}

}  // namespace

UnitLatents DrawLatents(const SimConfig& cfg, const ScenarioSpec& spec, std::uint64_t master_seed,
                        std::uint64_t replication) {
  const int n = cfg.n_units;
  auto stream = [&](const char* label) { return RngStream(master_seed, replication, label); };
  UnitLatents u;
  u.alpha = NormalVector(n, cfg.mu_alpha, cfg.sigma_alpha, stream("sim/alpha"));
  u.beta = NormalVector(n, cfg.beta_mean(), cfg.beta_sd(), stream("sim/beta"));
  u.gamma = NormalVector(n, cfg.a_season, cfg.a_season / 4.0, stream("sim/gamma"));
  u.beta2 = NormalVector(n, spec.s1_beta2_mean, spec.s1_beta2_sd, stream("sim/s1_beta2"));
  u.eta = NormalVector(n, spec.s4_eta_mean, cfg.sigma_eta, stream("sim/s4_eta"));
  u.onset = UniformVector(n, spec.s2_onset, stream("sim/s2_onset"));
  u.duration = UniformVector(n, spec.s2_duration, stream("sim/s2_duration"));
  u.scale = UniformVector(n, spec.s2_scale, stream("sim/s2_scale"));
  u.shock = stream("sim/s3_shock").Normal(spec.s3_shock_mean, spec.s3_shock_sd);
  return u;
}

Eigen::MatrixXd GenBaseline(const SimConfig& cfg, const UnitLatents& latents, int n_weeks) {
  const int n = static_cast<int>(latents.alpha.size());
  Eigen::MatrixXd out(n, n_weeks);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < n_weeks; ++t) {
      const double trend = latents.beta(i) * (static_cast<double>(t) / cfg.t_pre);
      const double season =
          latents.gamma(i) * std::sin(2.0 * std::numbers::pi * t / cfg.t_season);
      out(i, t) = latents.alpha(i) + trend + season;
    }
  }
  return out;
}

Eigen::MatrixXd ApplyNoise(const Eigen::MatrixXd& log_base, double sigma_eps, RngStream& rng) {
  Eigen::MatrixXd out(log_base.rows(), log_base.cols());
  for (Eigen::Index i = 0; i < log_base.rows(); ++i)
    for (Eigen::Index t = 0; t < log_base.cols(); ++t)
      out(i, t) = std::exp(log_base(i, t) + rng.Normal(0.0, sigma_eps));
  return out;
}

Assignment AssignTreatment(const SimConfig& cfg, RngStream& rng) {
  std::vector<int> order(cfg.n_units);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  Assignment a;
  a.ever_treated.assign(cfg.n_units, 0);
  for (int k = 0; k < cfg.n_treated; ++k) a.ever_treated[order[k]] = 1;
  a.treat_active = Eigen::MatrixXi::Zero(cfg.n_units, cfg.n_weeks());
  for (int i = 0; i < cfg.n_units; ++i)
    if (a.ever_treated[i] == 1)
      for (int t = cfg.t_pre; t < cfg.n_weeks(); ++t) a.treat_active(i, t) = 1;
  return a;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double ImpactShape(double weeks_since_launch, double onset, double duration, double scale) {
  const double s = weeks_since_launch;
  return Sigmoid((s - onset) / scale) - Sigmoid((s - onset - duration) / scale);
}

double ImpactCurve(int week, const SimConfig& cfg) {
  return cfg.tau_max * ImpactShape(week - cfg.t_pre, 0.0, cfg.t_post, 3.0);
}

}  // namespace geolift
