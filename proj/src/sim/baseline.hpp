#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/rng.hpp"
#include "sim/config.hpp"

namespace geolift {

// Per-geo latent parameters. Every field is drawn for every replication from
// its own keyed stream, whatever the active scenario, so two scenarios run on
// the same (seed, replication) share all of them.
struct UnitLatents {
  Eigen::VectorXd alpha;     // log level
  Eigen::VectorXd beta;      // log growth over t_pre weeks
  Eigen::VectorXd gamma;     // seasonal amplitude
  Eigen::VectorXd beta2;     // S1 curvature
  Eigen::VectorXd eta;       // S4 sigmoid intercept
  Eigen::VectorXd onset;     // S2, weeks after launch
  Eigen::VectorXd duration;  // S2, weeks
  Eigen::VectorXd scale;     // S2, sigmoid scale in weeks
  double shock = 0.0;        // S3, one draw per replication
};

UnitLatents DrawLatents(const SimConfig& cfg, const ScenarioSpec& spec, std::uint64_t master_seed,
                        std::uint64_t replication);

// log Y_base(i,t) = alpha_i + beta_i * t / t_pre + gamma_i * sin(2 pi t / t_season)
// for t = 0 .. n_weeks-1.
Eigen::MatrixXd GenBaseline(const SimConfig& cfg, const UnitLatents& latents, int n_weeks);

// Y0 = exp(log_base + eps), eps iid N(0, sigma_eps^2), drawn row by row.
Eigen::MatrixXd ApplyNoise(const Eigen::MatrixXd& log_base, double sigma_eps, RngStream& rng);

struct Assignment {
  std::vector<int> ever_treated;  // N
  Eigen::MatrixXi treat_active;   // N x T
};

// Uniformly chooses n_treated geos without replacement.
Assignment AssignTreatment(const SimConfig& cfg, RngStream& rng);

double Sigmoid(double x);

// sigmoid((s - onset) / scale) - sigmoid((s - onset - duration) / scale)
double ImpactShape(double weeks_since_launch, double onset, double duration, double scale);

// tau_max * [sigmoid((t - t_pre) / 3) - sigmoid((t - t_pre - t_post) / 3)].
// Unmasked: callers zero it for control geos and pre-period weeks.
double ImpactCurve(int week, const SimConfig& cfg);

}  // namespace geolift
