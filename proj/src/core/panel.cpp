#include "core/panel.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace geolift {

int Panel::n_treated() const {
  int n = 0;
  for (int g : ever_treated) n += g;
  return n;
}

std::vector<int> Panel::treated_units() const {
  std::vector<int> out;
  for (int i = 0; i < n_units; ++i)
    if (ever_treated[i] == 1) out.push_back(i);
  return out;
}

std::vector<int> Panel::control_units() const {
  std::vector<int> out;
  for (int i = 0; i < n_units; ++i)
    if (ever_treated[i] == 0) out.push_back(i);
  return out;
}

void Panel::Validate() const {
  auto dim = [](bool ok, const std::string& what) {
    Require(ok, ErrorCode::kDimensionMismatch, what);
  };
  dim(n_units > 0 && n_weeks > 0, "panel must be non-empty");
  dim(n_weeks == t_pre + t_post, "n_weeks must equal t_pre + t_post");
  Require(t_pre > 0 && t_post > 0, ErrorCode::kInvalidArgument,
          "need 0 < t_pre < n_weeks");
  dim(outcome.rows() == n_units && outcome.cols() == n_weeks, "outcome shape");
  dim(treat_active.rows() == n_units && treat_active.cols() == n_weeks, "treat_active shape");
  dim(static_cast<int>(ever_treated.size()) == n_units, "ever_treated length");
  dim(static_covariates.rows() == n_units, "static_covariates rows");
  for (const auto& slice : dynamic_covariates)
    dim(slice.rows() == n_units && slice.cols() == n_weeks, "dynamic covariate slice shape");

  for (int i = 0; i < n_units; ++i) {
    const int g = ever_treated[i];
    Require(g == 0 || g == 1, ErrorCode::kInvalidArgument, "ever_treated must be 0/1");
    int max_d = 0;
    for (int t = 0; t < n_weeks; ++t) {
      const int d = treat_active(i, t);
      Require(d == 0 || d == 1, ErrorCode::kInvalidArgument, "treat_active must be 0/1");
      Require(d == (g == 1 && t >= t_pre ? 1 : 0), ErrorCode::kInvalidArgument,
              "treat_active must equal 1 exactly for treated geos from week t_pre on (geo " +
                  std::to_string(i) + ", week " + std::to_string(t) + ")");
      max_d = std::max(max_d, d);
      Require(std::isfinite(outcome(i, t)) && outcome(i, t) > 0.0, ErrorCode::kNumerical,
              "outcomes must be finite and strictly positive");
    }
    Require(max_d == g, ErrorCode::kInvalidArgument, "ever_treated must equal max_t treat_active");
  }
}

double TrueAtt(const GroundTruth& truth, const Panel& panel) {
  const auto n = panel.n_units;
  const auto t = panel.n_weeks;
  Require(truth.y0.rows() == n && truth.y0.cols() == t && truth.y1.rows() == n &&
              truth.y1.cols() == t && static_cast<int>(panel.ever_treated.size()) == n,
          ErrorCode::kDimensionMismatch, "ground truth and panel dimensions disagree");
  Require(panel.t_pre > 0 && panel.t_pre < t, ErrorCode::kInvalidArgument, "bad t_pre");
  double sum = 0.0;
  int cells = 0;
  for (int i = 0; i < n; ++i) {
    if (panel.ever_treated[i] != 1) continue;
    for (int w = panel.t_pre; w < t; ++w) {
      sum += truth.y1(i, w) - truth.y0(i, w);
      ++cells;
    }
  }
  Require(cells > 0, ErrorCode::kInvalidArgument, "true ATT needs at least one treated geo");
  return sum / cells;
}

PeriodSplit SplitPrePost(const Panel& panel) {
  Require(panel.t_pre > 0 && panel.t_pre < panel.n_weeks, ErrorCode::kInvalidArgument,
          "split requires 0 < t_pre < n_weeks");
  return {WeekRange{0, panel.t_pre}, WeekRange{panel.t_pre, panel.n_weeks}};
}

}  // namespace geolift
