#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace geolift {

// Euclidean projection onto {w >= 0, sum w = 1} (sort-based).
Eigen::VectorXd ProjectToSimplex(const Eigen::VectorXd& v);

struct DonorWeights {
  int treated_unit = -1;
  std::vector<int> donor_units;
  Eigen::VectorXd weights;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SimplexSolverOptions {
  int max_iterations = 10000;
  double relative_tolerance = 1e-10;
  // Called with every accepted iterate (for feasibility checks).
  std::function<void(const Eigen::VectorXd&)> on_iterate;
};

// min_w ||x - D w||^2 + lambda ||w||^2  s.t. w >= 0, 1'w = 1
//
// D holds one donor per column. The Gram matrix and step size are computed
// once, so a solver instance can be reused across treated units that share a
// donor pool. Iterates are accelerated projected-gradient steps with a
// monotone safeguard: a step that raises the objective is rejected and the
// momentum is restarted, so the objective never exceeds its value at the
// uniform starting point.
class SimplexRidgeSolver {
 public:
  SimplexRidgeSolver(Eigen::MatrixXd donor_features, double lambda);

  DonorWeights Solve(const Eigen::VectorXd& treated_features,
                     const SimplexSolverOptions& options = {}) const;

  double Objective(const Eigen::VectorXd& treated_features, const Eigen::VectorXd& w) const;

  int n_donors() const { return static_cast<int>(donors_.cols()); }

 private:
  Eigen::MatrixXd donors_;  // k x J
  Eigen::MatrixXd gram_;    // J x J
  double lambda_;
  double step_;
};

DonorWeights FitWeights(const Eigen::VectorXd& treated_features,
                        const Eigen::MatrixXd& donor_features, double lambda,
                        const SimplexSolverOptions& options = {});

}  // namespace geolift
