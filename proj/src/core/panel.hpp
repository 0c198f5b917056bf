#pragma once

#include <Eigen/Dense>
#include <vector>

namespace geolift {

// Half-open week range [begin, end), 0-based.
struct WeekRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool contains(int week) const { return week >= begin && week < end; }
};

// Balanced geo x week panel. Treatment switches on for every treated geo at
// week index t_pre (0-based) and stays on until the end of the panel.
struct Panel {
  int n_units = 0;
  int n_weeks = 0;
  int t_pre = 0;
  int t_post = 0;

  Eigen::MatrixXd outcome;       // N x T, Y_it
  Eigen::MatrixXi treat_active;  // N x T, D_it in {0,1}
  std::vector<int> ever_treated; // N, G_i in {0,1}
  Eigen::MatrixXd static_covariates;               // N x P
  std::vector<Eigen::MatrixXd> dynamic_covariates; // Q slices, each N x T

  int n_static() const { return static_cast<int>(static_covariates.cols()); }
  int n_dynamic() const { return static_cast<int>(dynamic_covariates.size()); }
  int n_treated() const;
  std::vector<int> treated_units() const;
  std::vector<int> control_units() const;

  // Throws Error on any violated invariant (shape, D/G consistency, positivity).
  void Validate() const;
};

// Potential outcomes known only to the simulator.
struct GroundTruth {
  Eigen::MatrixXd y0;   // N x T
  Eigen::MatrixXd y1;   // N x T, y0 .* (1 + tau)
  Eigen::MatrixXd tau;  // N x T
  double true_att = 0.0;
};

// Mean of y1 - y0 over treated geos and post-period weeks.
double TrueAtt(const GroundTruth& truth, const Panel& panel);

struct PeriodSplit {
  WeekRange pre;
  WeekRange post;
};

PeriodSplit SplitPrePost(const Panel& panel);

// Column block of an N x T matrix restricted to a week range.
inline auto Columns(const Eigen::MatrixXd& m, WeekRange range) {
  return m.middleCols(range.begin, range.size());
}

}  // namespace geolift
