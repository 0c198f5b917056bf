#include "learners/linear.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace geolift {

LinearModel::LinearModel(LearnerSpec spec, int train_rows, double intercept,
                         Eigen::VectorXd coefficients, int iterations)
    : FittedModel(spec, train_rows, static_cast<int>(coefficients.size())),
      intercept_(intercept),
      coefficients_(std::move(coefficients)),
      iterations_(iterations) {}

Eigen::VectorXd LinearModel::PredictImpl(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd score = (x * coefficients_).array() + intercept_;
  if (spec().kind == LearnerKind::kLogistic) {
    for (Eigen::Index r = 0; r < score.size(); ++r) {
      score[r] = ClipProbability(1.0 / (1.0 + std::exp(-score[r])));
    }
  }
  return score;
}

std::shared_ptr<const LinearModel> FitRidge(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                                            const Eigen::VectorXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Require(n >= 1, ErrorCode::kInvalidArgument, "ridge needs at least one row");
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += spec.ridge_lambda;
  const Eigen::VectorXd rhs = xc.transpose() * yc;
  Eigen::VectorXd beta(p);
  if (p > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    beta = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !beta.allFinite()) {
      // Singular system (lambda = 0 with collinear columns): minimum-norm solution.
      beta = gram.completeOrthogonalDecomposition().solve(rhs);
    }
  }
  Require(beta.allFinite(), ErrorCode::kNumerical, "ridge solve produced non-finite coefficients");
  const double intercept = y_mean - x_mean.dot(beta);
  return std::make_shared<LinearModel>(spec, static_cast<int>(n), intercept, std::move(beta), 1);
}

std::shared_ptr<const LinearModel> FitLogistic(const LearnerSpec& spec,
                                               const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Require(n >= 1, ErrorCode::kInvalidArgument, "logistic regression needs at least one row");
  const double mean = y.mean();
  if (mean <= 0.0 || mean >= 1.0) {
    const double q = ClipProbability(mean);
    return std::make_shared<LinearModel>(spec, static_cast<int>(n), std::log(q / (1.0 - q)),
                                         Eigen::VectorXd::Zero(p), 0);
  }
  // Design with a leading intercept column; the intercept is not penalized.
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = x;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, spec.ridge_lambda);
  penalty[0] = 0.0;

  auto objective = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd s = design * b;
    double total = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      total += std::max(s[r], 0.0) + std::log1p(std::exp(-std::abs(s[r]))) - y[r] * s[r];
    }
    return total + 0.5 * (penalty.array() * b.array().square()).sum();
  };

  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
  b[0] = std::log(mean / (1.0 - mean));
  double f = objective(b);
  int it = 0;
  constexpr int kMaxIterations = 100;
  for (; it < kMaxIterations; ++it) {
    const Eigen::VectorXd s = design * b;
    Eigen::VectorXd prob(n);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      prob[r] = 1.0 / (1.0 + std::exp(-s[r]));
      curvature[r] = std::max(prob[r] * (1.0 - prob[r]), 1e-12);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (prob - y) + (penalty.array() * b.array()).matrix();
    Eigen::MatrixXd hess = design.transpose() * curvature.asDiagonal() * design;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd candidate = b - step;
    double fc = objective(candidate);
    while (fc > f && scale > 1e-8) {
      scale *= 0.5;
      candidate = b - scale * step;
      fc = objective(candidate);
    }
    if (fc > f) break;
    const double change = (candidate - b).cwiseAbs().maxCoeff();
    b = candidate;
    f = fc;
    if (change < 1e-10) {
      ++it;
      break;
    }
  }
  Require(b.allFinite(), ErrorCode::kNumerical, "logistic fit produced non-finite coefficients");
  return std::make_shared<LinearModel>(spec, static_cast<int>(n), b[0], b.tail(p), it);
}

}  // namespace geolift
