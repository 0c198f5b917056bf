#include "scm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "core/error.hpp"

namespace geolift {

Eigen::VectorXd ProjectToSimplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Require(n > 0, ErrorCode::kInvalidArgument, "cannot project an empty vector");
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd w = (v.array() - theta).max(0.0).matrix();
  // Renormalize away rounding drift; w has at least one positive entry.
  const double total = w.sum();
  if (total > 0.0) w /= total;
  return w;
}

SimplexRidgeSolver::SimplexRidgeSolver(Eigen::MatrixXd donor_features, double lambda)
    : donors_(std::move(donor_features)), lambda_(lambda) {
  Require(donors_.cols() >= 1, ErrorCode::kInvalidArgument, "need at least one donor");
  Require(lambda_ >= 0.0 && std::isfinite(lambda_), ErrorCode::kInvalidArgument,
          "ridge lambda must be finite and >= 0");
  Require(donors_.allFinite(), ErrorCode::kNumerical, "non-finite donor features");
  gram_ = donors_.transpose() * donors_;
  const double top = gram_.cols() == 1
                         ? gram_(0, 0)
                         : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                               gram_, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .maxCoeff();
  const double lipschitz = 2.0 * (std::max(top, 0.0) + lambda_);
  step_ = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
}

double SimplexRidgeSolver::Objective(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
  return (x - donors_ * w).squaredNorm() + lambda_ * w.squaredNorm();
}

DonorWeights SimplexRidgeSolver::Solve(const Eigen::VectorXd& x,
                                       const SimplexSolverOptions& options) const {
  Require(x.size() == donors_.rows(), ErrorCode::kDimensionMismatch,
          "treated feature length differs from donor feature length");
  Require(x.allFinite(), ErrorCode::kNumerical, "non-finite treated features");
  const Eigen::Index j = donors_.cols();
  DonorWeights out;
  if (j == 1) {
    out.weights = Eigen::VectorXd::Ones(1);
    out.objective_value = Objective(x, out.weights);
    out.converged = true;
    if (options.on_iterate) options.on_iterate(out.weights);
    return out;
  }

  const Eigen::VectorXd linear = donors_.transpose() * x;
  const double constant = x.squaredNorm();
  // Gram-form objective; cheaper than the residual form inside the loop.
  auto objective = [&](const Eigen::VectorXd& w) {
    return w.dot(gram_ * w) - 2.0 * linear.dot(w) + constant + lambda_ * w.squaredNorm();
  };

  Eigen::VectorXd w = Eigen::VectorXd::Constant(j, 1.0 / static_cast<double>(j));
  Eigen::VectorXd w_prev = w;
  Eigen::VectorXd y = w;
  double f = objective(w);
  double momentum = 1.0;
  if (options.on_iterate) options.on_iterate(w);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::VectorXd grad = 2.0 * (gram_ * y - linear) + 2.0 * lambda_ * y;
    const Eigen::VectorXd z = ProjectToSimplex(y - step_ * grad);
    const double fz = objective(z);
    if (fz > f) {
      // Reject and restart from the incumbent with a plain gradient step next.
      y = w;
      momentum = 1.0;
      continue;
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    w_prev = w;
    w = z;
    y = w + ((momentum - 1.0) / next_momentum) * (w - w_prev);
    momentum = next_momentum;
    if (options.on_iterate) options.on_iterate(w);
    const double change = f - fz;
    f = fz;
    if (change <= options.relative_tolerance * std::max(std::abs(f), 1e-300)) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.weights = w;
  out.objective_value = Objective(x, w);
  out.iterations = it;
  return out;
}

DonorWeights FitWeights(const Eigen::VectorXd& treated_features,
                        const Eigen::MatrixXd& donor_features, double lambda,
                        const SimplexSolverOptions& options) {
  return SimplexRidgeSolver(donor_features, lambda).Solve(treated_features, options);
}

}  // namespace geolift
