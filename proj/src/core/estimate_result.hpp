#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geolift {

// Declaration order is the reporting order of the study tables.
enum class EstimatorId { kAscY, kAscDem, kAscDemLag, kCreDml, kTwfeDml, kFdDml, kWgDml };

inline constexpr std::array<EstimatorId, 7> kAllEstimators = {
    EstimatorId::kAscY,    EstimatorId::kAscDem, EstimatorId::kAscDemLag, EstimatorId::kCreDml,
    EstimatorId::kTwfeDml, EstimatorId::kFdDml,  EstimatorId::kWgDml};

// "ASC-Y", "WG-DML", ...
std::string_view DisplayName(EstimatorId id);
// "asc-y", "wg-dml", ... (CLI method names)
std::string_view MethodName(EstimatorId id);
std::optional<EstimatorId> ParseEstimatorId(std::string_view text);

inline constexpr double kNormalQuantile975 = 1.96;

struct EstimateResult {
  EstimatorId estimator_id = EstimatorId::kAscY;
  double att_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool converged = true;
  std::map<std::string, double> diagnostics;
  // Larger per-run artifacts (donor weights, fold map, weekly ATT path).
  std::map<std::string, std::vector<double>> series;
};

// Fills att_hat/se and the symmetric 95% normal interval.
EstimateResult MakeEstimate(EstimatorId id, double att_hat, double se);

}  // namespace geolift
