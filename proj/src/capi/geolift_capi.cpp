#include "geolift/geolift.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <json.hpp>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "core/error.hpp"
#include "core/panel.hpp"
#include "core/panel_csv.hpp"
#include "harness/estimators.hpp"
#include "harness/report.hpp"
#include "harness/study.hpp"
#include "sim/config.hpp"
#include "sim/simulator.hpp"

struct geolift_panel {
  geolift::Panel panel;
  std::optional<geolift::GroundTruth> truth;
};

struct geolift_result {
  geolift::EstimateResult result;
  std::string options_json;
  std::optional<double> true_att;
};

struct geolift_report {
  geolift::StudyReport report;
};

namespace {

thread_local std::string g_last_error;

geolift_status ToStatus(geolift::ErrorCode code) {
  switch (code) {
    case geolift::ErrorCode::kInvalidArgument: return GEOLIFT_ERR_INVALID_ARGUMENT;
    case geolift::ErrorCode::kDimensionMismatch: return GEOLIFT_ERR_DIMENSION;
    case geolift::ErrorCode::kNumerical: return GEOLIFT_ERR_NUMERICAL;
    case geolift::ErrorCode::kIo: return GEOLIFT_ERR_IO;
    case geolift::ErrorCode::kEstimatorFailure: return GEOLIFT_ERR_ESTIMATOR;
  }
  return GEOLIFT_ERR_INTERNAL;
}

geolift_status Fail(geolift_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
geolift_status Guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return GEOLIFT_OK;
  } catch (const geolift::Error& e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(GEOLIFT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(GEOLIFT_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(GEOLIFT_ERR_INTERNAL, "unknown error");
  }
}

void RequirePointer(const void* p, const char* name) {
  geolift::Require(p != nullptr, geolift::ErrorCode::kInvalidArgument,
                   std::string(name) + " must not be NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json ResultJson(const geolift_result& r) {
  const geolift::EstimateResult& e = r.result;
  nlohmann::json out;
  out["estimator_id"] = std::string(geolift::DisplayName(e.estimator_id));
  out["method"] = std::string(geolift::MethodName(e.estimator_id));
  out["att_hat"] = e.att_hat;
  out["se"] = e.se;
  out["ci_low"] = e.ci_low;
  out["ci_high"] = e.ci_high;
  out["converged"] = e.converged;
  out["diagnostics"] = e.diagnostics;
  out["series"] = e.series;
  if (r.true_att) out["true_att"] = *r.true_att;
  if (!r.options_json.empty()) out["options"] = nlohmann::json::parse(r.options_json);
  return out;
}

}  // namespace

extern "C" {

const char* geolift_version(void) { return "1.0.0"; }

const char* geolift_last_error(void) { return g_last_error.c_str(); }

const char* geolift_status_string(geolift_status status) {
  switch (status) {
    case GEOLIFT_OK: return "ok";
    case GEOLIFT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GEOLIFT_ERR_DIMENSION: return "dimension mismatch";
    case GEOLIFT_ERR_NUMERICAL: return "numerical error";
    case GEOLIFT_ERR_IO: return "i/o error";
    case GEOLIFT_ERR_ESTIMATOR: return "estimator failure";
    case GEOLIFT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void geolift_string_free(char* s) { std::free(s); }

geolift_status geolift_simulate(const char* settings_json, const char* scenario, uint64_t seed,
                                uint64_t rep, geolift_panel** out) {
  return Guard([&] {
    RequirePointer(out, "out");
    *out = nullptr;
    geolift::SimSettings settings;
    if (settings_json != nullptr) settings = geolift::ParseSimSettingsJson(settings_json);
    if (scenario != nullptr) settings.scenario.id = geolift::ParseScenarioId(scenario);
    geolift::SimOutput sim = geolift::Generate(settings.config, settings.scenario, seed, rep);
    auto* handle = new geolift_panel{std::move(sim.panel), std::move(sim.truth)};
    *out = handle;
  });
}

geolift_status geolift_panel_read_csv(const char* panel_path, const char* truth_path,
                                      geolift_panel** out) {
  return Guard([&] {
    RequirePointer(out, "out");
    RequirePointer(panel_path, "panel_path");
    *out = nullptr;
    auto handle = std::make_unique<geolift_panel>();
    handle->panel = geolift::ReadPanelCsv(std::string(panel_path));
    if (truth_path != nullptr) {
      handle->truth = geolift::ReadTruthCsv(std::string(truth_path), handle->panel);
    }
    *out = handle.release();
  });
}

geolift_status geolift_panel_write_csv(const geolift_panel* panel, const char* panel_path,
                                       const char* truth_path) {
  return Guard([&] {
    RequirePointer(panel, "panel");
    RequirePointer(panel_path, "panel_path");
    geolift::WritePanelCsv(panel->panel, std::string(panel_path));
    if (truth_path != nullptr) {
      geolift::Require(panel->truth.has_value(), geolift::ErrorCode::kInvalidArgument,
                       "panel carries no ground truth");
      geolift::WriteTruthCsv(*panel->truth, panel->panel, std::string(truth_path));
    }
  });
}

geolift_status geolift_panel_dims(const geolift_panel* panel, int* n_units, int* n_weeks,
                                  int* t_pre, int* n_treated) {
  return Guard([&] {
    RequirePointer(panel, "panel");
    if (n_units != nullptr) *n_units = panel->panel.n_units;
    if (n_weeks != nullptr) *n_weeks = panel->panel.n_weeks;
    if (t_pre != nullptr) *t_pre = panel->panel.t_pre;
    if (n_treated != nullptr) *n_treated = panel->panel.n_treated();
  });
}

geolift_status geolift_panel_true_att(const geolift_panel* panel, double* out) {
  return Guard([&] {
    RequirePointer(panel, "panel");
    RequirePointer(out, "out");
    geolift::Require(panel->truth.has_value(), geolift::ErrorCode::kInvalidArgument,
                     "panel carries no ground truth");
    *out = panel->truth->true_att;
  });
}

geolift_status geolift_panel_outcomes(const geolift_panel* panel, double* buffer,
                                      int64_t capacity) {
  return Guard([&] {
    RequirePointer(panel, "panel");
    RequirePointer(buffer, "buffer");
    const auto& y = panel->panel.outcome;
    geolift::Require(capacity >= static_cast<int64_t>(y.size()), geolift::ErrorCode::kDimensionMismatch,
                     "buffer smaller than n_units * n_weeks");
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index t = 0; t < y.cols(); ++t) buffer[i * y.cols() + t] = y(i, t);
    }
  });
}

void geolift_panel_free(geolift_panel* panel) { delete panel; }

geolift_status geolift_estimate(const geolift_panel* panel, const char* method,
                                const char* options_json, uint64_t seed, geolift_result** out) {
  return Guard([&] {
    RequirePointer(out, "out");
    RequirePointer(panel, "panel");
    RequirePointer(method, "method");
    *out = nullptr;
    const auto id = geolift::ParseEstimatorId(method);
    geolift::Require(id.has_value(), geolift::ErrorCode::kInvalidArgument,
                     std::string("unknown method '") + method + "'");
    const geolift::EstimatorOptions options =
        geolift::ParseEstimatorOptionsJson(options_json != nullptr ? options_json : "");
    const geolift::RngStream rng(seed, 0, "estimator/" + std::string(geolift::MethodName(*id)));
    auto handle = std::make_unique<geolift_result>();
    handle->result = geolift::RunEstimator(*id, panel->panel, options, rng, true);
    handle->options_json = geolift::EstimatorOptionsToJson(options);
    if (panel->truth) handle->true_att = panel->truth->true_att;
    *out = handle.release();
  });
}

geolift_status geolift_result_summary(const geolift_result* result, double* att_hat, double* se,
                                      double* ci_low, double* ci_high, int* converged) {
  return Guard([&] {
    RequirePointer(result, "result");
    const geolift::EstimateResult& r = result->result;
    if (att_hat != nullptr) *att_hat = r.att_hat;
    if (se != nullptr) *se = r.se;
    if (ci_low != nullptr) *ci_low = r.ci_low;
    if (ci_high != nullptr) *ci_high = r.ci_high;
    if (converged != nullptr) *converged = r.converged ? 1 : 0;
  });
}

geolift_status geolift_result_diagnostic(const geolift_result* result, const char* name,
                                         double* out) {
  return Guard([&] {
    RequirePointer(result, "result");
    RequirePointer(name, "name");
    RequirePointer(out, "out");
    const auto it = result->result.diagnostics.find(name);
    geolift::Require(it != result->result.diagnostics.end(), geolift::ErrorCode::kInvalidArgument,
                     std::string("no diagnostic named '") + name + "'");
    *out = it->second;
  });
}

geolift_status geolift_result_to_json(const geolift_result* result, char** out_json) {
  return Guard([&] {
    RequirePointer(result, "result");
    RequirePointer(out_json, "out_json");
    *out_json = CopyString(ResultJson(*result).dump(2) + "\n");
  });
}

void geolift_result_free(geolift_result* result) { delete result; }

geolift_status geolift_study_run(const char* study_json, const char* out_dir,
                                 geolift_report** out) {
  return Guard([&] {
    RequirePointer(out, "out");
    *out = nullptr;
    const geolift::StudyConfig cfg =
        geolift::ParseStudyConfigJson(study_json != nullptr ? study_json : "{}");
    auto handle = std::make_unique<geolift_report>();
    handle->report = geolift::RunStudy(cfg);
    if (out_dir != nullptr) geolift::WriteStudyArtifacts(handle->report, out_dir);
    *out = handle.release();
  });
}

geolift_status geolift_report_row_count(const geolift_report* report, int* out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    *out = static_cast<int>(report->report.rows.size());
  });
}

geolift_status geolift_report_get_row(const geolift_report* report, int index,
                                      geolift_report_row* out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    geolift::Require(index >= 0 && index < static_cast<int>(report->report.rows.size()),
                     geolift::ErrorCode::kInvalidArgument, "row index out of range");
    const geolift::EstimatorSummary& s = report->report.rows[static_cast<size_t>(index)];
    *out = geolift_report_row{};
    const std::string_view name = geolift::DisplayName(s.estimator_id);
    std::memcpy(out->model, name.data(), std::min(name.size(), sizeof(out->model) - 1));
    out->available = s.available ? 1 : 0;
    out->n_success = s.n_success;
    out->n_failed = s.n_failed;
    out->abs_bias = s.abs_bias;
    out->signed_bias = s.signed_bias;
    out->coverage = s.coverage;
    out->power = s.power;
    out->avg_ci_width = s.avg_ci_width;
  });
}

geolift_status geolift_report_unavailable_count(const geolift_report* report, int* out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    *out = report->report.unavailable_count();
  });
}

geolift_status geolift_report_to_markdown(const geolift_report* report, char** out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    *out = CopyString(geolift::ReportToMarkdown(report->report));
  });
}

geolift_status geolift_report_to_csv(const geolift_report* report, char** out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    *out = CopyString(geolift::ReportToCsv(report->report));
  });
}

geolift_status geolift_report_replications_csv(const geolift_report* report, char** out) {
  return Guard([&] {
    RequirePointer(report, "report");
    RequirePointer(out, "out");
    *out = CopyString(geolift::ReplicationsToCsv(report->report));
  });
}

void geolift_report_free(geolift_report* report) { delete report; }

}  // extern "C"
