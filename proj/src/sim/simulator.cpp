#include "sim/simulator.hpp"

#include "core/rng.hpp"
#include "sim/baseline.hpp"
#include "sim/covariates.hpp"
#include "sim/scenario.hpp"

namespace geolift {

SimOutput Generate(const SimConfig& cfg, const ScenarioSpec& spec, std::uint64_t master_seed,
                   std::uint64_t replication) {
  cfg.Validate();
  spec.Validate();
  const int n = cfg.n_units;
  const int t = cfg.n_weeks();
  // One lead week beyond the panel feeds the leading search-volume signal.
  const int w = t + 1;

  const UnitLatents latents = DrawLatents(cfg, spec, master_seed, replication);
  RngStream assign_rng(master_seed, replication, "sim/assignment");
  const Assignment assignment = AssignTreatment(cfg, assign_rng);

  Components c;
  c.log_base = GenBaseline(cfg, latents, w);
  c.level_factor = Eigen::MatrixXd::Ones(n, w);
  c.ever_treated = assignment.ever_treated;
  c.tau = BaseImpact(cfg, c.ever_treated, w);
  ApplyScenario(c, cfg, spec, latents);

  RngStream noise_rng(master_seed, replication, "sim/noise");
  const Eigen::MatrixXd y0_full = ApplyNoise(c.log_base, cfg.sigma_eps, noise_rng).cwiseProduct(
      c.level_factor);

  RngStream static_rng(master_seed, replication, "sim/static_covariates");
  RngStream dynamic_rng(master_seed, replication, "sim/dynamic_covariates");
  Covariates cov = GenCovariates(cfg, latents, y0_full, t, static_rng, dynamic_rng);

  SimOutput out;
  auto& truth = out.truth;
  truth.y0 = y0_full.leftCols(t);
  truth.tau = c.tau.leftCols(t);
  truth.y1 = truth.y0.cwiseProduct((1.0 + truth.tau.array()).matrix());

  auto& p = out.panel;
  p.n_units = n;
  p.n_weeks = t;
  p.t_pre = cfg.t_pre;
  p.t_post = cfg.t_post;
  p.outcome = truth.y1;
  p.treat_active = assignment.treat_active;
  p.ever_treated = assignment.ever_treated;
  p.static_covariates = std::move(cov.static_covariates);
  p.dynamic_covariates = std::move(cov.dynamic_covariates);

  truth.true_att = cfg.n_treated > 0 ? TrueAtt(truth, p) : 0.0;
  return out;
}

}  // namespace geolift
