#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/estimate_result.hpp"
#include "harness/estimators.hpp"
#include "harness/metrics.hpp"
#include "sim/config.hpp"

namespace geolift {

struct StudyConfig {
  ScenarioSpec scenario;
  SimConfig sim;
  int replications = 100;
  std::vector<EstimatorId> estimators{kAllEstimators.begin(), kAllEstimators.end()};
  EstimatorOptions options;
  std::uint64_t master_seed = 0;
  int parallelism = 1;

  void Validate() const;
};

struct EstimatorOutcome {
  EstimatorId estimator_id = EstimatorId::kAscY;
  bool ok = false;
  EstimateResult result;  // meaningful only when ok
  std::string error;
};

struct ReplicationResult {
  int replication = 0;
  double true_att = 0.0;
  std::vector<EstimatorOutcome> outcomes;  // in StudyConfig::estimators order
};

struct StudyReport {
  ScenarioId scenario = ScenarioId::kBase;
  int replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<EstimatorSummary> rows;  // in StudyConfig::estimators order
  std::vector<ReplicationResult> per_replication;

  int unavailable_count() const;
};

// Generates panel r once and runs every configured estimator on it.
// Estimator failures are recorded; simulator failures propagate.
ReplicationResult RunReplication(const StudyConfig& cfg, int r);

StudyReport Aggregate(const StudyConfig& cfg, std::vector<ReplicationResult> results);

// Replications run on up to cfg.parallelism threads; results are folded in
// replication order, so the report does not depend on the thread count.
StudyReport RunStudy(const StudyConfig& cfg);

// Study file: {"scenario": "S3", "replications": 100, "seed": 42, "jobs": 8,
// "estimators": ["asc-y", ...], "sim": {...sim settings...},
// "options": {...estimator options...}}. All keys optional.
StudyConfig ParseStudyConfigJson(const std::string& json_text);

}  // namespace geolift
