#include "dml/panel_dml.hpp"

#include <algorithm>
#include <string>

#include "core/error.hpp"

namespace geolift {

void DmlSpec::Validate() const {
  Require(n_folds >= 2, ErrorCode::kInvalidArgument, "n_folds must be >= 2");
  Require(trim_quantile > 0.5 && trim_quantile <= 1.0, ErrorCode::kInvalidArgument,
          "trim_quantile must be in (0.5, 1]");
  Require(bootstrap_reps >= 0, ErrorCode::kInvalidArgument, "bootstrap_reps must be >= 0");
  outcome_learner.Validate();
  propensity_learner.Validate();
  Require(!outcome_learner.is_classifier(), ErrorCode::kInvalidArgument,
          "outcome learner must be a regressor");
}

namespace {

template <typename F>
auto Stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  }
}

// Row blocks of the drawn geos, each copy becoming its own cluster.
TransformedPanel ResampleGeos(const TransformedPanel& tp, const std::vector<int>& draw) {
  const Eigen::Index block = tp.weeks_per_geo;
  const Eigen::Index rows = block * static_cast<Eigen::Index>(draw.size());
  TransformedPanel out;
  out.variant = tp.variant;
  out.n_geos = static_cast<int>(draw.size());
  out.weeks_per_geo = tp.weeks_per_geo;
  out.rows_dropped = tp.rows_dropped;
  out.feature_names = tp.feature_names;
  out.y_dagger.resize(rows);
  out.d_dagger.resize(rows);
  out.d_raw.resize(rows);
  out.x_dagger.resize(rows, tp.x_dagger.cols());
  out.geo_of_row.resize(static_cast<size_t>(rows));
  out.week_of_row.resize(static_cast<size_t>(rows));
  for (size_t c = 0; c < draw.size(); ++c) {
    const Eigen::Index src = static_cast<Eigen::Index>(draw[c]) * block;
    const Eigen::Index dst = static_cast<Eigen::Index>(c) * block;
    out.y_dagger.segment(dst, block) = tp.y_dagger.segment(src, block);
    out.d_dagger.segment(dst, block) = tp.d_dagger.segment(src, block);
    out.d_raw.segment(dst, block) = tp.d_raw.segment(src, block);
    out.x_dagger.middleRows(dst, block) = tp.x_dagger.middleRows(src, block);
    for (Eigen::Index k = 0; k < block; ++k) {
      out.geo_of_row[static_cast<size_t>(dst + k)] = static_cast<int>(c);
      out.week_of_row[static_cast<size_t>(dst + k)] = tp.week_of_row[static_cast<size_t>(src + k)];
    }
  }
  return out;
}

}  // namespace

EstimateResult EstimateDml(const Panel& panel, const DmlSpec& spec, const RngStream& rng,
                           DmlFit* fit_out) {
  spec.Validate();
  const EstimatorId id = ToEstimatorId(spec.variant);
  DmlFit fit;
  fit.transformed = Stage("transform", [&] { return Transform(panel, spec.variant, spec.transform); });
  fit.folds = Stage("folds", [&] {
    RngStream fold_rng = rng.Derive("folds");
    FoldAssignment folds = MakeFolds(panel, spec.n_folds, fold_rng);
    ValidateFolds(panel.ever_treated, folds);
    return folds;
  });
  fit.crossfit = Stage("crossfit", [&] {
    return CrossfitResiduals(fit.transformed, fit.folds, spec, rng.Derive("crossfit"));
  });
  fit.weights = Stage("iptw", [&] {
    return ComputeIptwWeights(fit.crossfit.p_hat, fit.transformed.d_raw, spec.trim_quantile);
  });
  EstimateResult result = Stage("second stage", [&] {
    return SecondStage(id, fit.crossfit.eps_y, fit.crossfit.eps_d, fit.weights.weights,
                       fit.transformed.geo_of_row);
  });

  const TransformedPanel& tp = fit.transformed;
  result.diagnostics["n_folds"] = spec.n_folds;
  result.diagnostics["n_rows"] = static_cast<double>(tp.rows());
  result.diagnostics["rows_dropped"] = tp.rows_dropped;
  result.diagnostics["n_features"] = static_cast<double>(tp.x_dagger.cols());
  result.diagnostics["trim_quantile"] = spec.trim_quantile;
  result.diagnostics["trim_threshold"] = fit.weights.trim_threshold;
  result.diagnostics["n_trimmed"] = fit.weights.n_trimmed;
  result.diagnostics["mean_p_hat"] = fit.crossfit.p_hat.mean();
  result.diagnostics["sum_weights"] = fit.weights.weights.sum();
  result.series["fold_of_geo"] =
      std::vector<double>(fit.folds.fold_of_geo.begin(), fit.folds.fold_of_geo.end());
  std::vector<double> rmse;
  std::vector<double> p_mean;
  for (const FoldDiagnostics& f : fit.crossfit.folds) {
    rmse.push_back(f.outcome_test_rmse);
    p_mean.push_back(f.propensity_test_mean);
  }
  result.series["fold_outcome_test_rmse"] = rmse;
  result.series["fold_propensity_test_mean"] = p_mean;

  if (spec.bootstrap_reps > 0) {
    RngStream boot_rng = rng.Derive("bootstrap");
    const std::vector<int> treated = panel.treated_units();
    const std::vector<int> control = panel.control_units();
    std::vector<double> thetas;
    int failures = 0;
    for (int b = 0; b < spec.bootstrap_reps; ++b) {
      // Stratified draw keeps the treated/control counts fixed.
      std::vector<int> draw;
      for (const std::vector<int>* stratum : {&treated, &control}) {
        for (size_t k = 0; k < stratum->size(); ++k) {
          const auto pick = boot_rng.UniformInt(0, static_cast<std::int64_t>(stratum->size()) - 1);
          draw.push_back((*stratum)[static_cast<size_t>(pick)]);
        }
      }
      try {
        const TransformedPanel boot = ResampleGeos(tp, draw);
        RngStream fold_rng = boot_rng.Derive("folds/" + std::to_string(b));
        // Copies of one geo share its fold so no geo is both trained on and predicted.
        const FoldAssignment geo_folds = MakeFolds(panel, spec.n_folds, fold_rng);
        std::vector<int> cluster_fold;
        for (int g : draw) cluster_fold.push_back(geo_folds.fold_of_geo[static_cast<size_t>(g)]);
        const CrossfitResult cf =
            CrossfitResiduals(boot, cluster_fold, spec.n_folds, spec,
                              boot_rng.Derive("crossfit/" + std::to_string(b)));
        const IptwWeights w = ComputeIptwWeights(cf.p_hat, boot.d_raw, spec.trim_quantile);
        thetas.push_back(FitSecondStage(cf.eps_y, cf.eps_d, w.weights, boot.geo_of_row).theta);
      } catch (const Error&) {
        ++failures;
      }
    }
    result.diagnostics["bootstrap_reps"] = spec.bootstrap_reps;
    result.diagnostics["bootstrap_failures"] = failures;
    if (!thetas.empty()) {
      const Eigen::Map<const Eigen::VectorXd> v(thetas.data(), static_cast<Eigen::Index>(thetas.size()));
      result.diagnostics["bootstrap_ci_low"] = EmpiricalQuantile(v, 0.025);
      result.diagnostics["bootstrap_ci_high"] = EmpiricalQuantile(v, 0.975);
    }
  }
  if (fit_out != nullptr) *fit_out = std::move(fit);
  return result;
}

}  // namespace geolift
