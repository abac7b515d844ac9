#include "forbearance/presets.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#ifndef FORBEARANCE_PRESET_DIR
#define FORBEARANCE_PRESET_DIR ""
#endif

namespace forbearance {

namespace {

DgpCoefficients dgp_from_json(const nlohmann::json& j) {
  DgpCoefficients d;
  d.intercept = j.value("intercept", 0.0);
  d.endowment = j.value("endowment", 0.0);
  d.age = j.value("age", 0.0);
  d.export_intensity = j.value("export_intensity", 0.0);
  d.phi = j.value("phi", 0.0);
  d.noise_sd = j.value("noise_sd", 0.0);
  d.validate();
  return d;
}

RegressorProcess regressors_from_json(const nlohmann::json& j) {
  RegressorProcess r;
  r.endowment_log_mean = j.value("endowment_log_mean", r.endowment_log_mean);
  r.endowment_log_sd = j.value("endowment_log_sd", r.endowment_log_sd);
  r.endowment_scale = j.value("endowment_scale", r.endowment_scale);
  r.standardize_endowment = j.value("standardize_endowment", r.standardize_endowment);
  r.age_min = j.value("age_min", r.age_min);
  r.age_max = j.value("age_max", r.age_max);
  if (j.contains("export_beta")) {
    r.export_beta_a = j.at("export_beta").at(0).get<double>();
    r.export_beta_b = j.at("export_beta").at(1).get<double>();
  }
  if (j.contains("phi_beta")) {
    r.phi_beta_a = j.at("phi_beta").at(0).get<double>();
    r.phi_beta_b = j.at("phi_beta").at(1).get<double>();
  }
  r.persistence = j.value("persistence", r.persistence);
  r.endowment_shock_sd = j.value("endowment_shock_sd", r.endowment_shock_sd);
  r.export_shock_sd = j.value("export_shock_sd", r.export_shock_sd);
  r.phi_shock_sd = j.value("phi_shock_sd", r.phi_shock_sd);
  r.validate();
  return r;
}

ExpectedSign sign_from_string(const std::string& s) {
  if (s == "+") return ExpectedSign::Positive;
  if (s == "-") return ExpectedSign::Negative;
  if (s == "any") return ExpectedSign::Any;
  throw std::invalid_argument("pattern sign must be '+', '-' or 'any', got '" + s + "'");
}

}  // namespace

PanelSpec Preset::spec_for(std::uint64_t seed) const {
  PanelSpec s = panel;
  s.seed = seed;
  if (s.n_periods == 1 && cross_section_dgp) s.dgp = *cross_section_dgp;
  return s;
}

Preset preset_from_json(const nlohmann::json& j) {
  Preset p;
  p.name = j.at("name").get<std::string>();
  p.description = j.value("description", "");
  const auto& panel = j.at("panel");
  p.panel.n_firms = panel.at("n_firms").get<int>();
  p.panel.n_periods = panel.at("n_periods").get<int>();
  p.panel.fixed_effect_sd = panel.value("fixed_effect_sd", 0.0);
  p.panel.dgp = dgp_from_json(panel.at("dgp"));
  p.panel.regressors = regressors_from_json(panel.value("regressors", nlohmann::json::object()));
  p.panel.reverse_phi = panel.value("reverse_phi", false);
  if (j.contains("cross_section_dgp")) p.cross_section_dgp = dgp_from_json(j.at("cross_section_dgp"));
  const std::string est = j.at("estimator").get<std::string>();
  if (est == "glm") {
    p.estimator = Estimator::GlmGaussianIdentity;
  } else if (est == "fe") {
    p.estimator = Estimator::FixedEffectsWithin;
  } else {
    throw std::invalid_argument("preset estimator must be 'glm' or 'fe', got '" + est + "'");
  }
  if (j.contains("columns")) p.columns = j.at("columns").get<std::vector<std::string>>();
  const auto& pattern = j.at("pattern");
  p.pattern.alpha = pattern.value("alpha", 0.05);
  for (const auto& v : pattern.at("variables")) {
    VariableExpectation e;
    e.name = v.at("name").get<std::string>();
    e.sign = sign_from_string(v.value("sign", "any"));
    e.significant = v.at("significant").get<bool>();
    if (std::find(p.columns.begin(), p.columns.end(), e.name) == p.columns.end()) {
      throw std::invalid_argument("pattern variable '" + e.name + "' is not a preset column");
    }
    p.pattern.variables.push_back(std::move(e));
  }
  p.pass_threshold = j.value("pass_threshold", 0.8);
  p.panel.validate();
  return p;
}

Preset load_preset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open preset '" + path.string() + "'");
  try {
    return preset_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed preset '" + path.string() + "': " + e.what());
  }
}

std::filesystem::path find_preset(std::string_view name_or_path,
                                  const std::vector<std::filesystem::path>& extra_dirs) {
  namespace fs = std::filesystem;
  const fs::path direct{std::string(name_or_path)};
  if (direct.has_extension() && fs::is_regular_file(direct)) return direct;

  std::vector<fs::path> dirs = extra_dirs;
  if (const char* env = std::getenv("FORBEARANCE_PRESET_DIR"); env && *env) dirs.emplace_back(env);
  std::error_code ec;
  const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) dirs.push_back(exe.parent_path() / "presets");
  if (std::string_view(FORBEARANCE_PRESET_DIR).size() > 0) dirs.emplace_back(FORBEARANCE_PRESET_DIR);

  const std::string file = std::string(name_or_path) + ".json";
  for (const auto& d : dirs) {
    const fs::path candidate = d / file;
    if (fs::is_regular_file(candidate)) return candidate;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name_or_path) + "'");
}

RegressionResult fit_preset(const Preset& preset, const std::vector<FirmObservation>& rows) {
  if (preset.estimator == Estimator::FixedEffectsWithin) {
    return fit_fixed_effects(rows, preset.columns);
  }
  const DesignMatrix x = design_from_observations(rows, preset.columns, true);
  return fit_glm(x, response_from_observations(rows));
}

ReplicationSummary replicate(const Preset& preset, std::uint64_t base_seed, std::size_t n) {
  // Each seed writes only its own slot, so the summary is independent of
  // scheduling.
  std::vector<PatternReport> reports(n);
  std::vector<std::string> errors(n);
  const auto run_one = [&](std::size_t k) {
    try {
      const auto rows = gen_panel(preset.spec_for(base_seed + k));
      reports[k] = check_pattern(fit_preset(preset, rows), preset.pattern);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) run_one(k);
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k].empty()) {
      throw std::runtime_error("replication with seed " + std::to_string(base_seed + k) +
                               " failed: " + errors[k]);
    }
  }

  ReplicationSummary s;
  s.preset = preset.name;
  s.replications = n;
  for (const auto& v : preset.pattern.variables) s.variable_passes.emplace_back(v.name, 0);
  for (const auto& r : reports) {
    if (r.pass) ++s.passes;
    for (std::size_t v = 0; v < r.checks.size(); ++v) {
      if (r.checks[v].pass()) ++s.variable_passes[v].second;
    }
  }
  return s;
}

}  // namespace forbearance
