#include "harness/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "core/error.hpp"
#include "sim/simulator.hpp"

namespace geolift {

using nlohmann::json;

void StudyConfig::Validate() const {
  Require(replications >= 1, ErrorCode::kInvalidArgument, "replications must be >= 1");
  Require(!estimators.empty(), ErrorCode::kInvalidArgument, "estimator list is empty");
  Require(parallelism >= 1, ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  sim.Validate();
  scenario.Validate();
  options.scm.Validate();
  options.dml.Validate();
}

int StudyReport::unavailable_count() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const EstimatorSummary& s) { return !s.available; }));
}

ReplicationResult RunReplication(const StudyConfig& cfg, int r) {
  Require(r >= 0 && r < cfg.replications, ErrorCode::kInvalidArgument,
          "replication index out of range");
  const SimOutput sim = Generate(cfg.sim, cfg.scenario, cfg.master_seed, static_cast<std::uint64_t>(r));
  ReplicationResult out;
  out.replication = r;
  out.true_att = sim.truth.true_att;
  for (EstimatorId id : cfg.estimators) {
    EstimatorOutcome o;
    o.estimator_id = id;
    try {
      const RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(r),
                          "estimator/" + std::string(MethodName(id)));
      o.result = RunEstimator(id, sim.panel, cfg.options, rng);
      o.ok = std::isfinite(o.result.att_hat) && std::isfinite(o.result.se);
      if (!o.ok) o.error = "non-finite estimate";
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

StudyReport Aggregate(const StudyConfig& cfg, std::vector<ReplicationResult> results) {
  std::sort(results.begin(), results.end(),
            [](const ReplicationResult& a, const ReplicationResult& b) {
              return a.replication < b.replication;
            });
  StudyReport report;
  report.scenario = cfg.scenario.id;
  report.replications = static_cast<int>(results.size());
  report.master_seed = cfg.master_seed;
  for (size_t k = 0; k < cfg.estimators.size(); ++k) {
    std::vector<MetricInput> inputs;
    int failed = 0;
    for (const ReplicationResult& rep : results) {
      const EstimatorOutcome& o = rep.outcomes.at(k);
      if (!o.ok) {
        ++failed;
        continue;
      }
      inputs.push_back({o.result.att_hat, o.result.ci_low, o.result.ci_high, rep.true_att});
    }
    report.rows.push_back(Summarize(cfg.estimators[k], inputs, failed));
  }
  report.per_replication = std::move(results);
  return report;
}

StudyReport RunStudy(const StudyConfig& cfg) {
  cfg.Validate();
  std::vector<ReplicationResult> results(static_cast<size_t>(cfg.replications));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < cfg.replications; r = next++) {
      try {
        results[static_cast<size_t>(r)] = RunReplication(cfg, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.replications;
      }
    }
  };
  const int threads = std::min(cfg.parallelism, cfg.replications);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return Aggregate(cfg, std::move(results));
}

StudyConfig ParseStudyConfigJson(const std::string& json_text) {
  StudyConfig cfg;
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("study config: ") + e.what());
  }
  Require(obj.is_object(), ErrorCode::kInvalidArgument, "study config must be a JSON object");
  for (const auto& item : obj.items()) {
    const std::string& key = item.key();
    const json& value = item.value();
    try {
      if (key == "scenario") {
        cfg.scenario.id = ParseScenarioId(value.get<std::string>());
      } else if (key == "replications") {
        cfg.replications = value.get<int>();
      } else if (key == "seed") {
        cfg.master_seed = value.get<std::uint64_t>();
      } else if (key == "jobs") {
        cfg.parallelism = value.get<int>();
      } else if (key == "estimators") {
        cfg.estimators.clear();
        for (const json& name : value) {
          const auto id = ParseEstimatorId(name.get<std::string>());
          Require(id.has_value(), ErrorCode::kInvalidArgument,
                  "unknown estimator '" + name.get<std::string>() + "'");
          cfg.estimators.push_back(*id);
        }
      } else if (key == "sim") {
        const ScenarioId id = cfg.scenario.id;
        const SimSettings settings = ParseSimSettingsJson(value.dump());
        cfg.sim = settings.config;
        cfg.scenario = settings.scenario;
        cfg.scenario.id = id;
      } else if (key == "options") {
        cfg.options = ParseEstimatorOptionsJson(value.dump());
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown study key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "study key '" + key + "': " + e.what());
    }
  }
  // "sim" may precede "scenario" in the object; re-read the id last.
  if (obj.contains("scenario")) cfg.scenario.id = ParseScenarioId(obj.at("scenario").get<std::string>());
  cfg.Validate();
  return cfg;
}

}  // namespace geolift
