#include "sim/config.hpp"

#include <json.hpp>

#include "core/error.hpp"

namespace geolift {

namespace {

void Check(bool ok, const std::string& what) { Require(ok, ErrorCode::kInvalidArgument, what); }

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

void ReadInterval(const nlohmann::json& j, const char* key, Interval& field) {
  auto it = j.find(key);
  if (it == j.end()) return;
  Check(it->is_array() && it->size() == 2, std::string(key) + " must be a [low, high] array");
  field = Interval{(*it)[0].get<double>(), (*it)[1].get<double>()};
}

}  // namespace

void SimConfig::Validate() const {
  Check(n_units >= 2, "n_units must be >= 2");
  Check(n_treated >= 0 && n_treated < n_units, "need 0 <= n_treated < n_units");
  Check(t_pre >= 2, "t_pre must be >= 2");
  Check(t_post >= 1, "t_post must be >= 1");
  Check(t_season >= 1, "t_season must be >= 1");
  Check(mu_growth > 0.0, "mu_growth must be positive");
  Check(tau_max >= 0.0, "tau_max must be >= 0");
  Check(sigma_eps >= 0.0 && sigma_eta >= 0.0 && sigma_alpha >= 0.0 && static_noise_sd >= 0.0 &&
            search_noise_sd >= 0.0,
        "standard deviations must be >= 0");
  Check(n_static_cov >= 0 && n_dynamic_cov >= 0, "covariate counts must be >= 0");
  Check(std::isfinite(mu_alpha) && std::isfinite(a_season) && std::isfinite(search_elasticity),
        "non-finite generator parameter");
}

std::string_view ToString(ScenarioId id) {
  switch (id) {
    case ScenarioId::kBase: return "BASE";
    case ScenarioId::kS1: return "S1";
    case ScenarioId::kS2: return "S2";
    case ScenarioId::kS3: return "S3";
    case ScenarioId::kS4: return "S4";
    case ScenarioId::kS5: return "S5";
  }
  return "?";
}

ScenarioId ParseScenarioId(std::string_view text) {
  for (auto id : {ScenarioId::kBase, ScenarioId::kS1, ScenarioId::kS2, ScenarioId::kS3,
                  ScenarioId::kS4, ScenarioId::kS5}) {
    if (text == ToString(id)) return id;
  }
  if (text == "base") return ScenarioId::kBase;
  if (text.size() == 2 && text[0] == 's' && text[1] >= '1' && text[1] <= '5')
    return ParseScenarioId(std::string{'S', text[1]});
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario id '" + std::string(text) + "'");
}

void ScenarioSpec::Validate() const {
  auto interval_ok = [](const Interval& r) { return r.low <= r.high; };
  Check(s1_beta2_sd >= 0.0 && s3_shock_sd >= 0.0, "scenario sds must be >= 0");
  Check(s1_beta2_mean <= 0.0, "S1 curvature mean must be negative (or zero to disable)");
  Check(s5_alpha_drift >= 0.0, "S5 drift must be positive (or zero to disable)");
  Check(interval_ok(s2_onset) && interval_ok(s2_duration) && interval_ok(s2_scale),
        "S2 ranges must satisfy low <= high");
  Check(s2_onset.low >= 0.0 && s2_duration.low >= 0.0, "S2 onset and duration must be >= 0");
  Check(s2_scale.low > 0.0, "S2 sigmoid scale must be positive");
  if (id == ScenarioId::kS1) Check(s1_beta2_mean < 0.0 || s1_beta2_sd == 0.0, "S1 needs E[beta2] < 0");
  if (id == ScenarioId::kS5) Check(s5_alpha_drift >= 0.0, "S5 needs alpha_drift > 0");
}

SimSettings ParseSimSettingsJson(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("sim config is not valid JSON: ") + e.what());
  }
  Check(j.is_object(), "sim config must be a JSON object");
  static const char* kKeys[] = {
      "n_units",        "n_treated",      "t_pre",          "t_post",
      "mu_growth",      "tau_max",        "a_season",       "sigma_eps",
      "sigma_eta",      "t_season",       "mu_alpha",       "sigma_alpha",
      "n_static_cov",   "n_dynamic_cov",  "static_noise_sd", "search_noise_sd",
      "search_elasticity", "s1_beta2_mean", "s1_beta2_sd",   "s2_onset_range",
      "s2_duration_range", "s2_scale_range", "s3_shock_mean", "s3_shock_sd",
      "s4_eta_mean",    "s5_alpha_drift"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kKeys) known = known || it.key() == k;
    Check(known, "unknown sim config key '" + it.key() + "'");
  }
  SimSettings s;
  try {
    auto& c = s.config;
    Read(j, "n_units", c.n_units);
    Read(j, "n_treated", c.n_treated);
    Read(j, "t_pre", c.t_pre);
    Read(j, "t_post", c.t_post);
    Read(j, "mu_growth", c.mu_growth);
    Read(j, "tau_max", c.tau_max);
    Read(j, "a_season", c.a_season);
    Read(j, "sigma_eps", c.sigma_eps);
    Read(j, "sigma_eta", c.sigma_eta);
    Read(j, "t_season", c.t_season);
    Read(j, "mu_alpha", c.mu_alpha);
    Read(j, "sigma_alpha", c.sigma_alpha);
    Read(j, "n_static_cov", c.n_static_cov);
    Read(j, "n_dynamic_cov", c.n_dynamic_cov);
    Read(j, "static_noise_sd", c.static_noise_sd);
    Read(j, "search_noise_sd", c.search_noise_sd);
    Read(j, "search_elasticity", c.search_elasticity);
    auto& sc = s.scenario;
    Read(j, "s1_beta2_mean", sc.s1_beta2_mean);
    Read(j, "s1_beta2_sd", sc.s1_beta2_sd);
    ReadInterval(j, "s2_onset_range", sc.s2_onset);
    ReadInterval(j, "s2_duration_range", sc.s2_duration);
    ReadInterval(j, "s2_scale_range", sc.s2_scale);
    Read(j, "s3_shock_mean", sc.s3_shock_mean);
    Read(j, "s3_shock_sd", sc.s3_shock_sd);
    Read(j, "s4_eta_mean", sc.s4_eta_mean);
    Read(j, "s5_alpha_drift", sc.s5_alpha_drift);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad sim config value: ") + e.what());
  }
  s.config.Validate();
  s.scenario.Validate();
  return s;
}

std::string SimSettingsToJson(const SimSettings& s) {
  const auto& c = s.config;
  const auto& sc = s.scenario;
  nlohmann::ordered_json j;
  j["n_units"] = c.n_units;
  j["n_treated"] = c.n_treated;
  j["t_pre"] = c.t_pre;
  j["t_post"] = c.t_post;
  j["mu_growth"] = c.mu_growth;
  j["tau_max"] = c.tau_max;
  j["a_season"] = c.a_season;
  j["sigma_eps"] = c.sigma_eps;
  j["sigma_eta"] = c.sigma_eta;
  j["t_season"] = c.t_season;
  j["mu_alpha"] = c.mu_alpha;
  j["sigma_alpha"] = c.sigma_alpha;
  j["n_static_cov"] = c.n_static_cov;
  j["n_dynamic_cov"] = c.n_dynamic_cov;
  j["static_noise_sd"] = c.static_noise_sd;
  j["search_noise_sd"] = c.search_noise_sd;
  j["search_elasticity"] = c.search_elasticity;
  j["s1_beta2_mean"] = sc.s1_beta2_mean;
  j["s1_beta2_sd"] = sc.s1_beta2_sd;
  j["s2_onset_range"] = {sc.s2_onset.low, sc.s2_onset.high};
  j["s2_duration_range"] = {sc.s2_duration.low, sc.s2_duration.high};
  j["s2_scale_range"] = {sc.s2_scale.low, sc.s2_scale.high};
  j["s3_shock_mean"] = sc.s3_shock_mean;
  j["s3_shock_sd"] = sc.s3_shock_sd;
  j["s4_eta_mean"] = sc.s4_eta_mean;
  j["s5_alpha_drift"] = sc.s5_alpha_drift;
  return j.dump(2);
}

}  // namespace geolift
