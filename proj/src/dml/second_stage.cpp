#include "dml/second_stage.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/error.hpp"

namespace geolift {

double EmpiricalQuantile(const Eigen::VectorXd& values, double q) {
  Require(values.size() > 0, ErrorCode::kInvalidArgument, "quantile of an empty vector");
  Require(q >= 0.0 && q <= 1.0, ErrorCode::kInvalidArgument, "quantile level outside [0, 1]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IptwWeights ComputeIptwWeights(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& d_raw,
                               double trim_quantile) {
  Require(p_hat.size() == d_raw.size(), ErrorCode::kDimensionMismatch,
          "propensity and treatment lengths differ");
  Require(trim_quantile > 0.5 && trim_quantile <= 1.0, ErrorCode::kInvalidArgument,
          "trim_quantile must be in (0.5, 1]");
  Require(((p_hat.array() > 0.0) && (p_hat.array() < 1.0)).all(), ErrorCode::kInvalidArgument,
          "propensities must lie strictly inside (0, 1)");
  IptwWeights out;
  out.weights.resize(p_hat.size());
  for (Eigen::Index r = 0; r < p_hat.size(); ++r) {
    const double p = p_hat[r];
    const double d = d_raw[r];
    out.weights[r] = d * (1.0 - p) / p + (1.0 - d) * p / (1.0 - p);
  }
  out.trim_threshold = EmpiricalQuantile(out.weights, trim_quantile);
  for (Eigen::Index r = 0; r < out.weights.size(); ++r) {
    if (out.weights[r] > out.trim_threshold) {
      out.weights[r] = out.trim_threshold;
      ++out.n_trimmed;
    }
  }
  return out;
}

SecondStageFit FitSecondStage(const Eigen::VectorXd& eps_y, const Eigen::VectorXd& eps_d,
                              const Eigen::VectorXd& weights, const std::vector<int>& cluster) {
  const Eigen::Index n = eps_y.size();
  Require(eps_d.size() == n && weights.size() == n &&
              static_cast<Eigen::Index>(cluster.size()) == n,
          ErrorCode::kDimensionMismatch, "second-stage inputs differ in length");
  Require(eps_y.allFinite() && eps_d.allFinite() && weights.allFinite(), ErrorCode::kNumerical,
          "non-finite second-stage input");
  const double denom = (weights.array() * eps_d.array().square()).sum();
  Require(denom > 0.0, ErrorCode::kNumerical,
          "degenerate treatment residuals: sum of w * eps_d^2 is zero");
  SecondStageFit fit;
  fit.theta = (weights.array() * eps_d.array() * eps_y.array()).sum() / denom;
  fit.residuals = eps_y - fit.theta * eps_d;

  std::map<int, double> score;
  for (Eigen::Index r = 0; r < n; ++r) {
    score[cluster[static_cast<size_t>(r)]] += weights[r] * eps_d[r] * fit.residuals[r];
  }
  fit.n_clusters = static_cast<int>(score.size());
  Require(fit.n_clusters >= 2, ErrorCode::kNumerical, "cluster-robust SE needs >= 2 clusters");
  double meat = 0.0;
  for (const auto& [g, s] : score) meat += s * s;
  const double g = static_cast<double>(fit.n_clusters);
  fit.se = std::sqrt(g / (g - 1.0) * meat) / denom;
  return fit;
}

EstimateResult SecondStage(EstimatorId id, const Eigen::VectorXd& eps_y,
                           const Eigen::VectorXd& eps_d, const Eigen::VectorXd& weights,
                           const std::vector<int>& cluster) {
  const SecondStageFit fit = FitSecondStage(eps_y, eps_d, weights, cluster);
  EstimateResult result = MakeEstimate(id, fit.theta, fit.se);
  result.diagnostics["n_clusters"] = fit.n_clusters;
  return result;
}

}  // namespace geolift
