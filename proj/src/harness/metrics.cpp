#include "harness/metrics.hpp"

#include <cmath>

namespace geolift {

bool CiCovers(const MetricInput& m) { return m.ci_low <= m.true_att && m.true_att <= m.ci_high; }

bool CiExcludesZero(const MetricInput& m) { return !(m.ci_low < 0.0 && 0.0 < m.ci_high); }

EstimatorSummary Summarize(EstimatorId id, const std::vector<MetricInput>& inputs, int n_failed) {
  EstimatorSummary s;
  s.estimator_id = id;
  s.n_failed = n_failed;
  s.n_success = static_cast<int>(inputs.size());
  s.available = s.n_success > 0;
  if (!s.available) return s;
  double abs_sum = 0.0;
  double signed_sum = 0.0;
  double width_sum = 0.0;
  int covered = 0;
  int rejected = 0;
  for (const MetricInput& m : inputs) {
    const double error = m.att_hat - m.true_att;
    abs_sum += std::abs(error);
    signed_sum += error;
    width_sum += m.ci_high - m.ci_low;
    covered += CiCovers(m) ? 1 : 0;
    rejected += CiExcludesZero(m) ? 1 : 0;
  }
  const double n = static_cast<double>(s.n_success);
  s.abs_bias = abs_sum / n;
  s.signed_bias = signed_sum / n;
  s.avg_ci_width = width_sum / n;
  s.coverage = covered / n;
  s.power = rejected / n;
  return s;
}

}  // namespace geolift
