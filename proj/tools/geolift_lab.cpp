// geolift-lab: command-line front end over the geolift C API.
#include <geolift/geolift.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct CliError {
  int exit_code;
};

void Check(geolift_status status, const char* what) {
  if (status == GEOLIFT_OK) return;
  std::cerr << "geolift-lab: " << what << ": " << geolift_status_string(status) << ": "
            << geolift_last_error() << "\n";
  throw CliError{2};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "geolift-lab: cannot read " << path << "\n";
    throw CliError{2};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "geolift-lab: cannot write " << path << "\n";
    throw CliError{2};
  }
}

json ParseJsonFile(const std::string& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    std::cerr << "geolift-lab: " << path << ": " << e.what() << "\n";
    throw CliError{2};
  }
}

struct TakeString {
  char* s = nullptr;
  ~TakeString() { geolift_string_free(s); }
};

struct EstimatorFlags {
  std::string options_path;
  std::optional<double> lambda;
  std::optional<int> folds;
  std::optional<double> trim;
  std::optional<int> bootstrap;

  void Register(CLI::App* cmd) {
    cmd->add_option("--options", options_path, "Estimator options JSON file");
    cmd->add_option("--lambda", lambda, "Synthetic-control ridge penalty");
    cmd->add_option("--folds", folds, "Cross-fitting folds for DML estimators");
    cmd->add_option("--trim", trim, "IPTW winsorization quantile");
    cmd->add_option("--bootstrap", bootstrap, "Geo-bootstrap replicates for DML (0 = off)");
  }

  json ToJson() const {
    json opts = options_path.empty() ? json::object() : ParseJsonFile(options_path);
    if (lambda) opts["lambda"] = *lambda;
    if (folds) opts["folds"] = *folds;
    if (trim) opts["trim"] = *trim;
    if (bootstrap) opts["bootstrap_reps"] = *bootstrap;
    return opts;
  }
};

int RunSim(const std::string& scenario, std::uint64_t seed, std::uint64_t rep,
           const std::string& out, const std::string& truth, const std::string& config) {
  const std::string settings = config.empty() ? std::string() : ReadFile(config);
  geolift_panel* panel = nullptr;
  Check(geolift_simulate(config.empty() ? nullptr : settings.c_str(), scenario.c_str(), seed, rep,
                         &panel),
        "sim");
  const geolift_status st =
      geolift_panel_write_csv(panel, out.c_str(), truth.empty() ? nullptr : truth.c_str());
  double att = 0.0;
  const bool has_att = geolift_panel_true_att(panel, &att) == GEOLIFT_OK;
  geolift_panel_free(panel);
  Check(st, "sim");
  if (has_att) std::cout << "true_att " << att << "\n";
  return 0;
}

int RunEstimate(const std::string& method, const std::string& panel_path,
                const std::string& truth_path, const std::string& out, std::uint64_t seed,
                const EstimatorFlags& flags) {
  geolift_panel* panel = nullptr;
  Check(geolift_panel_read_csv(panel_path.c_str(), truth_path.empty() ? nullptr : truth_path.c_str(),
                               &panel),
        "estimate");
  const std::string options = flags.ToJson().dump();
  geolift_result* result = nullptr;
  const geolift_status st = geolift_estimate(panel, method.c_str(), options.c_str(), seed, &result);
  geolift_panel_free(panel);
  Check(st, "estimate");
  TakeString text;
  const geolift_status js = geolift_result_to_json(result, &text.s);
  double att = 0.0, se = 0.0, lo = 0.0, hi = 0.0;
  int converged = 0;
  geolift_result_summary(result, &att, &se, &lo, &hi, &converged);
  geolift_result_free(result);
  Check(js, "estimate");
  if (out.empty()) {
    std::cout << text.s;
  } else {
    WriteFile(out, text.s);
    std::printf("att_hat %.6g se %.6g ci [%.6g, %.6g]%s\n", att, se, lo, hi,
                converged ? "" : " (solver not converged)");
  }
  return 0;
}

int RunStudy(const std::string& scenario, int reps, std::uint64_t seed, bool seed_given, int jobs,
             const std::string& config, const std::string& out_dir,
             const std::vector<std::string>& estimators, const EstimatorFlags& flags) {
  if (const char* env = std::getenv("GEOLIFT_SEED"); env != nullptr && *env != '\0') {
    try {
      size_t used = 0;
      seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      std::cerr << "geolift-lab: GEOLIFT_SEED is not an unsigned integer: " << env << "\n";
      return 2;
    }
  } else if (!seed_given) {
    seed = 0;
  }
  json study{{"scenario", scenario}, {"replications", reps}, {"seed", seed}, {"jobs", jobs}};
  if (!config.empty()) study["sim"] = ParseJsonFile(config);
  if (!estimators.empty()) study["estimators"] = estimators;
  study["options"] = flags.ToJson();
  const std::string text = study.dump();
  geolift_report* report = nullptr;
  Check(geolift_study_run(text.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &report),
        "study");
  TakeString md;
  const geolift_status st = geolift_report_to_markdown(report, &md.s);
  int unavailable = 0;
  geolift_report_unavailable_count(report, &unavailable);
  geolift_report_free(report);
  Check(st, "study");
  std::cout << md.s;
  if (unavailable > 0) {
    std::cerr << "geolift-lab: " << unavailable << " estimator(s) had no successful replication\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geo-experiment estimator laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(geolift_version()));

  std::string scenario = "BASE";
  std::uint64_t seed = 0;
  std::uint64_t rep = 0;
  std::string out;
  std::string truth;
  std::string config;

  CLI::App* sim = app.add_subcommand("sim", "Simulate one panel and write it as CSV");
  sim->add_option("--scenario", scenario, "BASE, S1, S2, S3, S4 or S5")->capture_default_str();
  sim->add_option("--seed", seed, "Master seed")->capture_default_str();
  sim->add_option("--rep", rep, "Replication index")->capture_default_str();
  sim->add_option("--out", out, "Panel CSV path")->required();
  sim->add_option("--truth", truth, "Ground-truth CSV path");
  sim->add_option("--config", config, "Generator settings JSON");

  std::string method;
  std::string panel_path;
  std::string truth_path;
  EstimatorFlags est_flags;
  CLI::App* estimate = app.add_subcommand("estimate", "Run one estimator on a panel CSV");
  estimate->add_option("--method", method,
                       "asc-y, asc-dem, asc-dem-lag, cre-dml, twfe-dml, fd-dml or wg-dml")
      ->required();
  estimate->add_option("--panel", panel_path, "Panel CSV path")->required();
  estimate->add_option("--truth", truth_path, "Ground-truth CSV (adds true_att to the output)");
  estimate->add_option("--seed", seed, "Seed for folds and learners")->capture_default_str();
  estimate->add_option("--out", out, "Result JSON path (stdout when omitted)");
  est_flags.Register(estimate);

  int reps = 100;
  int jobs = 1;
  std::string out_dir;
  std::vector<std::string> estimators;
  EstimatorFlags study_flags;
  CLI::App* study = app.add_subcommand("study", "Monte Carlo study over replications");
  study->add_option("--scenario", scenario, "BASE, S1, S2, S3, S4 or S5")->capture_default_str();
  study->add_option("--reps", reps, "Replications")->capture_default_str();
  CLI::Option* seed_opt = study->add_option("--seed", seed, "Master seed (GEOLIFT_SEED overrides)");
  study->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  study->add_option("--config", config, "Generator settings JSON");
  study->add_option("--out-dir", out_dir, "Directory for report.md, report.csv, replications.csv");
  study->add_option("--estimators", estimators, "Subset of methods (default: all seven)")
      ->delimiter(',');
  study_flags.Register(study);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return RunSim(scenario, seed, rep, out, truth, config);
    if (estimate->parsed()) {
      return RunEstimate(method, panel_path, truth_path, out, seed, est_flags);
    }
    if (study->parsed()) {
      return RunStudy(scenario, reps, seed, seed_opt->count() > 0, jobs, config, out_dir,
                      estimators, study_flags);
    }
  } catch (const CliError& e) {
    return e.exit_code;
  }
  return 2;
}
