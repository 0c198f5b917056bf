#pragma once

#include <string>
#include <vector>

#include "core/estimate_result.hpp"
#include "core/panel.hpp"
#include "core/rng.hpp"
#include "dml/dml_spec.hpp"
#include "scm/synthetic_control.hpp"

namespace geolift {

// Shared settings for every estimator in a run. ASC variants read the scm
// fields, DML variants the dml fields; the variant itself comes from the id.
struct EstimatorOptions {
  ScmSpec scm;
  DmlSpec dml;
};

bool IsAscEstimator(EstimatorId id);
AscVariant AscVariantOf(EstimatorId id);
DmlVariant DmlVariantOf(EstimatorId id);

// JSON object with optional keys:
//   lambda, standardize, jackknife_refit                  (ASC)
//   folds, trim, bootstrap_reps, cre_include_week,
//   cre_include_treatment_mean, outcome_learner,
//   propensity_learner                                    (DML)
// Learner objects take kind, n_trees, max_depth, learning_rate, min_leaf,
// subsample, l2_leaf, ridge_lambda.
// Unknown keys are rejected.
EstimatorOptions ParseEstimatorOptionsJson(const std::string& json_text);
std::string EstimatorOptionsToJson(const EstimatorOptions& options);

// Runs one estimator. `rng` seeds fold shuffles and learner subsampling.
// With `with_weights`, ASC results also carry the donor list ("donor_units")
// and one weight vector per treated geo ("weights/geo_<id>") in `series`.
EstimateResult RunEstimator(EstimatorId id, const Panel& panel, const EstimatorOptions& options,
                            const RngStream& rng, bool with_weights = false);

}  // namespace geolift
