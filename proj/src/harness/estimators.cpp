#include "harness/estimators.hpp"

#include <json.hpp>

#include "core/error.hpp"
#include "dml/panel_dml.hpp"

namespace geolift {

using nlohmann::json;

bool IsAscEstimator(EstimatorId id) {
  return id == EstimatorId::kAscY || id == EstimatorId::kAscDem || id == EstimatorId::kAscDemLag;
}

AscVariant AscVariantOf(EstimatorId id) {
  switch (id) {
    case EstimatorId::kAscY: return AscVariant::kY;
    case EstimatorId::kAscDem: return AscVariant::kDem;
    case EstimatorId::kAscDemLag: return AscVariant::kDemLag;
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "not an ASC estimator");
}

DmlVariant DmlVariantOf(EstimatorId id) {
  switch (id) {
    case EstimatorId::kCreDml: return DmlVariant::kCre;
    case EstimatorId::kTwfeDml: return DmlVariant::kTwfe;
    case EstimatorId::kFdDml: return DmlVariant::kFd;
    case EstimatorId::kWgDml: return DmlVariant::kWg;
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "not a DML estimator");
}

namespace {

template <typename T>
void Read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("option '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    Require(ok, ErrorCode::kInvalidArgument,
            std::string("unknown ") + where + " option '" + item.key() + "'");
  }
}

LearnerSpec ParseLearner(const json& obj, LearnerSpec spec) {
  Require(obj.is_object(), ErrorCode::kInvalidArgument, "learner options must be an object");
  RejectUnknown(obj, {"kind", "n_trees", "max_depth", "learning_rate", "min_leaf", "subsample",
                      "l2_leaf", "ridge_lambda"},
                "learner");
  if (obj.contains("kind")) {
    std::string kind;
    Read(obj, "kind", kind);
    spec.kind = ParseLearnerKind(kind);
  }
  Read(obj, "n_trees", spec.n_trees);
  Read(obj, "max_depth", spec.max_depth);
  Read(obj, "learning_rate", spec.learning_rate);
  Read(obj, "min_leaf", spec.min_leaf);
  Read(obj, "subsample", spec.subsample);
  Read(obj, "l2_leaf", spec.l2_leaf);
  Read(obj, "ridge_lambda", spec.ridge_lambda);
  spec.Validate();
  return spec;
}

json LearnerToJson(const LearnerSpec& s) {
  return json{{"kind", std::string(ToString(s.kind))},
              {"n_trees", s.n_trees},
              {"max_depth", s.max_depth},
              {"learning_rate", s.learning_rate},
              {"min_leaf", s.min_leaf},
              {"subsample", s.subsample},
              {"l2_leaf", s.l2_leaf},
              {"ridge_lambda", s.ridge_lambda}};
}

}  // namespace

EstimatorOptions ParseEstimatorOptionsJson(const std::string& json_text) {
  EstimatorOptions options;
  if (json_text.empty()) return options;
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("estimator options: ") + e.what());
  }
  Require(obj.is_object(), ErrorCode::kInvalidArgument, "estimator options must be a JSON object");
  RejectUnknown(obj, {"lambda", "standardize", "jackknife_refit", "folds", "trim",
                      "bootstrap_reps", "cre_include_week", "cre_include_treatment_mean",
                      "outcome_learner", "propensity_learner"},
                "estimator");
  Read(obj, "lambda", options.scm.ridge_lambda);
  Read(obj, "standardize", options.scm.feature_standardize);
  Read(obj, "jackknife_refit", options.scm.jackknife_refit);
  Read(obj, "folds", options.dml.n_folds);
  Read(obj, "trim", options.dml.trim_quantile);
  Read(obj, "bootstrap_reps", options.dml.bootstrap_reps);
  Read(obj, "cre_include_week", options.dml.transform.cre_include_week);
  Read(obj, "cre_include_treatment_mean", options.dml.transform.cre_include_treatment_mean);
  if (obj.contains("outcome_learner")) {
    options.dml.outcome_learner = ParseLearner(obj.at("outcome_learner"), options.dml.outcome_learner);
  }
  if (obj.contains("propensity_learner")) {
    options.dml.propensity_learner =
        ParseLearner(obj.at("propensity_learner"), options.dml.propensity_learner);
  }
  options.scm.Validate();
  options.dml.Validate();
  return options;
}

std::string EstimatorOptionsToJson(const EstimatorOptions& o) {
  json obj{{"lambda", o.scm.ridge_lambda},
           {"standardize", o.scm.feature_standardize},
           {"jackknife_refit", o.scm.jackknife_refit},
           {"folds", o.dml.n_folds},
           {"trim", o.dml.trim_quantile},
           {"bootstrap_reps", o.dml.bootstrap_reps},
           {"cre_include_week", o.dml.transform.cre_include_week},
           {"cre_include_treatment_mean", o.dml.transform.cre_include_treatment_mean},
           {"outcome_learner", LearnerToJson(o.dml.outcome_learner)},
           {"propensity_learner", LearnerToJson(o.dml.propensity_learner)}};
  return obj.dump(2);
}

EstimateResult RunEstimator(EstimatorId id, const Panel& panel, const EstimatorOptions& options,
                            const RngStream& rng, bool with_weights) {
  if (IsAscEstimator(id)) {
    ScmSpec spec = options.scm;
    spec.variant = AscVariantOf(id);
    if (!with_weights) return JackknifeCi(panel, spec);
    ScmFit fit;
    EstimateResult result = JackknifeCi(panel, spec, &fit);
    const std::vector<int>& donors = fit.weights.front().donor_units;
    result.series["donor_units"] = std::vector<double>(donors.begin(), donors.end());
    for (const DonorWeights& w : fit.weights) {
      result.series["weights/geo_" + std::to_string(w.treated_unit)] =
          std::vector<double>(w.weights.data(), w.weights.data() + w.weights.size());
    }
    return result;
  }
  DmlSpec spec = options.dml;
  spec.variant = DmlVariantOf(id);
  return EstimateDml(panel, spec, rng);
}

}  // namespace geolift
