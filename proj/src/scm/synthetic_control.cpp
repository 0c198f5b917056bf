#include "scm/synthetic_control.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace geolift {

void ScmSpec::Validate() const {
  Require(std::isfinite(ridge_lambda) && ridge_lambda >= 0.0, ErrorCode::kInvalidArgument,
          "ridge_lambda must be finite and >= 0");
}

EstimatorId ToEstimatorId(AscVariant v) {
  switch (v) {
    case AscVariant::kY: return EstimatorId::kAscY;
    case AscVariant::kDem: return EstimatorId::kAscDem;
    case AscVariant::kDemLag: return EstimatorId::kAscDemLag;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown ASC variant");
}

namespace {

std::vector<DonorWeights> FitWeightsOnFeatures(const Eigen::MatrixXd& features,
                                               const std::vector<int>& treated,
                                               const std::vector<int>& donors, double lambda) {
  Require(!donors.empty(), ErrorCode::kInvalidArgument, "synthetic control needs >= 1 donor");
  Eigen::MatrixXd donor_features(features.cols(), static_cast<Eigen::Index>(donors.size()));
  for (size_t j = 0; j < donors.size(); ++j) {
    donor_features.col(static_cast<Eigen::Index>(j)) = features.row(donors[j]).transpose();
  }
  const SimplexRidgeSolver solver(std::move(donor_features), lambda);
  std::vector<DonorWeights> out;
  out.reserve(treated.size());
  for (int unit : treated) {
    DonorWeights w = solver.Solve(features.row(unit).transpose());
    w.treated_unit = unit;
    w.donor_units = donors;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

std::vector<DonorWeights> FitAllWeights(const Panel& panel, const ScmSpec& spec) {
  spec.Validate();
  panel.Validate();
  const Eigen::MatrixXd features =
      BuildFeatures(panel, spec.variant, spec.feature_standardize);
  return FitWeightsOnFeatures(features, panel.treated_units(), panel.control_units(),
                              spec.ridge_lambda);
}

CounterfactualAtt ComputeCounterfactualAtt(const Panel& panel,
                                           const std::vector<DonorWeights>& weights) {
  Require(!weights.empty(), ErrorCode::kInvalidArgument, "no donor weights supplied");
  const int t_pre = panel.t_pre;
  const int t_post = panel.n_weeks - t_pre;
  CounterfactualAtt out;
  out.unit_gaps.resize(static_cast<Eigen::Index>(weights.size()), t_post);
  for (size_t k = 0; k < weights.size(); ++k) {
    const DonorWeights& w = weights[k];
    Require(w.weights.size() == static_cast<Eigen::Index>(w.donor_units.size()),
            ErrorCode::kDimensionMismatch, "weight vector does not match donor list");
    Require(w.treated_unit >= 0 && w.treated_unit < panel.n_units,
            ErrorCode::kInvalidArgument, "treated unit out of range");
    Eigen::RowVectorXd synthetic = Eigen::RowVectorXd::Zero(t_post);
    for (size_t j = 0; j < w.donor_units.size(); ++j) {
      synthetic += w.weights[static_cast<Eigen::Index>(j)] *
                   panel.outcome.row(w.donor_units[j]).tail(t_post);
    }
    out.unit_gaps.row(static_cast<Eigen::Index>(k)) =
        panel.outcome.row(w.treated_unit).tail(t_post) - synthetic;
  }
  out.att_path = out.unit_gaps.colwise().mean().transpose();
  out.unit_att = out.unit_gaps.rowwise().mean();
  out.att_hat = out.att_path.mean();
  return out;
}

ScmFit FitSyntheticControl(const Panel& panel, const ScmSpec& spec) {
  ScmFit fit;
  fit.weights = FitAllWeights(panel, spec);
  fit.att = ComputeCounterfactualAtt(panel, fit.weights);
  return fit;
}

double JackknifeSe(const Eigen::VectorXd& unit_att) {
  const Eigen::Index n = unit_att.size();
  Require(n >= 2, ErrorCode::kInvalidArgument, "jackknife needs >= 2 treated units");
  const double total = unit_att.sum();
  const double nd = static_cast<double>(n);
  Eigen::VectorXd loo = (total - unit_att.array()) / (nd - 1.0);
  const double mean = loo.mean();
  return std::sqrt((nd - 1.0) / nd * (loo.array() - mean).square().sum());
}

EstimateResult JackknifeCi(const Panel& panel, const ScmSpec& spec) {
  return JackknifeCi(panel, spec, nullptr);
}

EstimateResult JackknifeCi(const Panel& panel, const ScmSpec& spec, ScmFit* fit_out) {
  Require(panel.n_treated() >= 2, ErrorCode::kInvalidArgument,
          "jackknife needs >= 2 treated units");
  ScmFit fit = FitSyntheticControl(panel, spec);
  double se = 0.0;
  if (!spec.jackknife_refit) {
    se = JackknifeSe(fit.att.unit_att);
  } else {
    // Drop each treated unit in turn, re-standardize and re-fit the rest.
    const std::vector<int> treated = panel.treated_units();
    const std::vector<int> donors = panel.control_units();
    Eigen::MatrixXd raw = BuildFeatures(panel, spec.variant, false);
    const double n = static_cast<double>(treated.size());
    Eigen::VectorXd loo(static_cast<Eigen::Index>(treated.size()));
    for (size_t drop = 0; drop < treated.size(); ++drop) {
      std::vector<int> kept_units;
      std::vector<int> kept_treated;
      for (int u = 0; u < panel.n_units; ++u) {
        if (u != treated[drop]) kept_units.push_back(u);
      }
      for (size_t k = 0; k < treated.size(); ++k) {
        if (k != drop) kept_treated.push_back(treated[k]);
      }
      Eigen::MatrixXd features = raw;
      if (spec.feature_standardize) {
        Eigen::MatrixXd kept(static_cast<Eigen::Index>(kept_units.size()), raw.cols());
        for (size_t r = 0; r < kept_units.size(); ++r) {
          kept.row(static_cast<Eigen::Index>(r)) = raw.row(kept_units[r]);
        }
        const Eigen::RowVectorXd mean = kept.colwise().mean();
        const Eigen::RowVectorXd sd =
            ((kept.rowwise() - mean).array().square().colwise().sum() /
             static_cast<double>(kept.rows()))
                .sqrt()
                .matrix();
        for (Eigen::Index c = 0; c < raw.cols(); ++c) {
          features.col(c).array() -= mean[c];
          if (sd[c] > 0.0) features.col(c) /= sd[c];
        }
      }
      const auto weights =
          FitWeightsOnFeatures(features, kept_treated, donors, spec.ridge_lambda);
      loo[static_cast<Eigen::Index>(drop)] = ComputeCounterfactualAtt(panel, weights).att_hat;
    }
    const double mean = loo.mean();
    se = std::sqrt((n - 1.0) / n * (loo.array() - mean).square().sum());
  }

  EstimateResult result = MakeEstimate(ToEstimatorId(spec.variant), fit.att.att_hat, se);
  bool converged = true;
  double max_iterations = 0.0;
  double effective_donors = 0.0;
  double nonzero = 0.0;
  for (const DonorWeights& w : fit.weights) {
    converged = converged && w.converged;
    max_iterations = std::max(max_iterations, static_cast<double>(w.iterations));
    effective_donors += 1.0 / w.weights.squaredNorm();
    nonzero += static_cast<double>((w.weights.array() > 1e-8).count());
  }
  const double n_treated = static_cast<double>(fit.weights.size());
  result.converged = converged;
  result.diagnostics["ridge_lambda"] = spec.ridge_lambda;
  result.diagnostics["n_treated"] = n_treated;
  result.diagnostics["n_donors"] = static_cast<double>(fit.weights.front().donor_units.size());
  result.diagnostics["max_solver_iterations"] = max_iterations;
  result.diagnostics["mean_effective_donors"] = effective_donors / n_treated;
  result.diagnostics["mean_nonzero_weights"] = nonzero / n_treated;
  result.diagnostics["jackknife_refit"] = spec.jackknife_refit ? 1.0 : 0.0;
  result.series["att_path"] =
      std::vector<double>(fit.att.att_path.data(), fit.att.att_path.data() + fit.att.att_path.size());
  if (fit_out != nullptr) *fit_out = std::move(fit);
  return result;
}

}  // namespace geolift
