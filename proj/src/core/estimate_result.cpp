#include "core/estimate_result.hpp"

#include <cctype>
#include <string>

#include "core/error.hpp"

namespace geolift {

std::string_view DisplayName(EstimatorId id) {
  switch (id) {
    case EstimatorId::kAscY: return "ASC-Y";
    case EstimatorId::kAscDem: return "ASC-DEM";
    case EstimatorId::kAscDemLag: return "ASC-DEM-LAG";
    case EstimatorId::kCreDml: return "CRE-DML";
    case EstimatorId::kTwfeDml: return "TWFE-DML";
    case EstimatorId::kFdDml: return "FD-DML";
    case EstimatorId::kWgDml: return "WG-DML";
  }
  return "?";
}

std::string_view MethodName(EstimatorId id) {
  switch (id) {
    case EstimatorId::kAscY: return "asc-y";
    case EstimatorId::kAscDem: return "asc-dem";
    case EstimatorId::kAscDemLag: return "asc-dem-lag";
    case EstimatorId::kCreDml: return "cre-dml";
    case EstimatorId::kTwfeDml: return "twfe-dml";
    case EstimatorId::kFdDml: return "fd-dml";
    case EstimatorId::kWgDml: return "wg-dml";
  }
  return "?";
}

std::optional<EstimatorId> ParseEstimatorId(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto id : kAllEstimators)
    if (lower == MethodName(id)) return id;
  return std::nullopt;
}

EstimateResult MakeEstimate(EstimatorId id, double att_hat, double se) {
  Require(se >= 0.0, ErrorCode::kNumerical, "standard error must be non-negative");
  EstimateResult r;
  r.estimator_id = id;
  r.att_hat = att_hat;
  r.se = se;
  r.ci_low = att_hat - kNormalQuantile975 * se;
  r.ci_high = att_hat + kNormalQuantile975 * se;
  return r;
}

}  // namespace geolift
