#pragma once

#include <vector>

#include "core/estimate_result.hpp"

namespace geolift {

struct MetricInput {
  double att_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double true_att = 0.0;
};

struct EstimatorSummary {
  EstimatorId estimator_id = EstimatorId::kAscY;
  bool available = false;  // false when no replication succeeded
  int n_success = 0;
  int n_failed = 0;
  double abs_bias = 0.0;     // mean |att_hat - true_att|
  double signed_bias = 0.0;  // mean (att_hat - true_att)
  double coverage = 0.0;     // share of CIs containing the truth
  double power = 0.0;        // share of CIs excluding zero
  double avg_ci_width = 0.0;
};

bool CiCovers(const MetricInput& m);
bool CiExcludesZero(const MetricInput& m);

// Metrics over the successful replications in `inputs`; `n_failed` is carried
// through for reporting.
EstimatorSummary Summarize(EstimatorId id, const std::vector<MetricInput>& inputs, int n_failed = 0);

}  // namespace geolift
