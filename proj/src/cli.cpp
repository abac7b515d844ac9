#include "forbearance/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "forbearance/dynamics.hpp"
#include "forbearance/econometrics.hpp"
#include "forbearance/game.hpp"
#include "forbearance/paneldata.hpp"
#include "forbearance/presets.hpp"

namespace forbearance::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string format_complex(const std::complex<double>& z) {
  if (z.imag() == 0.0) return format_number(z.real());
  std::string s = z.real() == 0.0 ? "" : format_number(z.real());
  s += (z.imag() < 0.0 ? "-" : (s.empty() ? "" : "+"));
  s += format_number(std::abs(z.imag())) + "i";
  return s;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    throw CLI::ValidationError(std::string(kSeedEnv), "must be an unsigned 64-bit integer");
  }
  return 1;
}

const CLI::Validator kUnitOpen =
    CLI::Validator(
        [](std::string& s) -> std::string {
          double v = 0.0;
          try {
            v = std::stod(s);
          } catch (...) {
            return "not a number: " + s;
          }
          if (!(v >= 0.0 && v < 1.0)) return "must lie in [0, 1): " + s;
          return {};
        },
        "in [0, 1)");

Vec2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--start", "expected X,Y");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--start", "expected X,Y numbers, got '" + text + "'");
  }
}

// ---------------------------------------------------------------------------

struct GameArgs {
  double pi_c = 0, pi_d = 0, pi_p = 0, pi_n = 0;
  std::optional<double> pi_m;
  double delta = 0.9;
  int horizon = 30;
  std::string strategy_i = "grim", strategy_j = "grim";
  std::string out;
};

int cmd_game(const GameArgs& a, std::ostream& out) {
  GameConfig cfg;
  cfg.payoffs = StagePayoffs::make(a.pi_c, a.pi_d, a.pi_p, a.pi_n, a.pi_m.value_or(a.pi_c));
  cfg.delta = a.delta;
  cfg.horizon = a.horizon;
  cfg.strategy_i = parse_strategy(a.strategy_i);
  cfg.strategy_j = parse_strategy(a.strategy_j);
  cfg.validate();

  const double dstar = critical_discount(cfg.payoffs);
  const bool ok = is_sustainable(cfg.payoffs, cfg.delta);
  out << "sustainable: " << (ok ? "true" : "false") << ", delta*: " << format_number(dstar)
      << "\n";
  const GameOutcome outcome = simulate_repeated_game(cfg);
  out << "strategies: " << to_string(cfg.strategy_i) << " vs " << to_string(cfg.strategy_j)
      << ", delta: " << format_number(cfg.delta) << ", horizon: " << cfg.horizon << "\n";
  out << "period action_i action_j payoff_i payoff_j\n";
  for (std::size_t t = 0; t < outcome.actions.size(); ++t) {
    out << t << " " << to_string(outcome.actions[t].first) << " "
        << to_string(outcome.actions[t].second) << " "
        << format_number(outcome.per_period[t].first) << " "
        << format_number(outcome.per_period[t].second) << "\n";
  }
  out << "discounted_i: " << format_number(outcome.discounted_i)
      << ", discounted_j: " << format_number(outcome.discounted_j) << "\n";
  if (cfg.payoffs.pi_monopoly != cfg.payoffs.pi_nash) {
    out << "collusion index (cooperative payoff): "
        << format_number(collusion_index(cfg.payoffs.pi_coop, cfg.payoffs)) << "\n";
  }
  if (!a.out.empty()) {
    write_text_file(a.out, to_json(cfg, outcome).dump(2) + "\n");
    out << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StabilityArgs {
  double a = 0.4, b = 0.2, age = 1.0, sigma = 1.2, phi = 0.4;
  std::string svg, csv;
  int nx = 20, ny = 20;
  std::vector<std::string> starts;
  std::vector<double> levels;
  double cd_alpha = 0.5;
  double cd_tfp = 1.0;
  double t_end = 50.0, dt = 0.01;
};

int cmd_stability(const StabilityArgs& a, std::ostream& out) {
  DynamicsParams p;
  p.a = a.a;
  p.b = a.b;
  p.growth = {a.age, a.sigma, a.phi};
  const LinearSystem2x2 sys = build_system(p);
  const EigenPair eigs = eigenvalues_2x2(sys.matrix);
  const StabilityClass cls = classify_stability(eigs);
  out << "eigenvalues: " << format_complex(eigs.first) << ", " << format_complex(eigs.second)
      << "; class: " << to_string(cls) << "\n";
  out << "jacobian: [[" << format_number(sys.matrix[0][0]) << ", "
      << format_number(sys.matrix[0][1]) << "], [" << format_number(sys.matrix[1][0]) << ", "
      << format_number(sys.matrix[1][1]) << "]]\n";
  std::optional<Vec2> eq;
  try {
    eq = equilibrium_point(sys);
    out << "equilibrium: " << format_number((*eq)[0]) << ", " << format_number((*eq)[1]) << "\n";
  } catch (const SingularSystemError&) {
    out << "equilibrium: none (singular system)\n";
  }

  if (a.svg.empty() && a.csv.empty()) return kExitOk;

  GridSpec grid;
  if (eq) {
    grid = default_grid(sys);
  } else {
    grid = {-1.0, 1.0, -1.0, 1.0};
  }
  grid.nx = a.nx;
  grid.ny = a.ny;
  std::vector<Vec2> starts;
  for (const auto& s : a.starts) starts.push_back(parse_point(s));
  if (a.starts.empty()) {
    starts = {{grid.x_lo, grid.y_lo}, {grid.x_hi, grid.y_lo}, {grid.x_lo, grid.y_hi},
              {grid.x_hi, grid.y_hi}};
  }
  PhasePortraitOptions opts;
  opts.t_end = a.t_end;
  opts.dt = a.dt;
  opts.production.tfp = a.cd_tfp;
  opts.production.alpha = a.cd_alpha;
  opts.production.omega = 1.0 - a.cd_alpha;
  opts.output_levels = a.levels;
  const PhasePortrait portrait = phase_portrait_export(sys, grid, starts, opts);
  if (!a.svg.empty()) {
    write_text_file(a.svg, portrait.svg);
    out << "wrote " << a.svg << "\n";
  }
  if (!a.csv.empty()) {
    write_text_file(a.csv, portrait.csv);
    out << "wrote " << a.csv << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PanelArgs {
  std::string preset = "sme";
  std::string preset_dir;
  std::optional<int> firms, periods;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_sd, fe_sd, phi_shock_sd;
  bool reverse_phi = false;
  std::string out;
};

std::vector<std::filesystem::path> dirs_from(const std::string& d) {
  if (d.empty()) return {};
  return {std::filesystem::path(d)};
}

int cmd_panel(const PanelArgs& a, std::ostream& out) {
  const Preset preset = load_preset(find_preset(a.preset, dirs_from(a.preset_dir)));
  Preset adjusted = preset;
  if (a.firms) adjusted.panel.n_firms = *a.firms;
  if (a.periods) adjusted.panel.n_periods = *a.periods;
  PanelSpec spec = adjusted.spec_for(a.seed.value_or(default_seed()));
  if (a.noise_sd) spec.dgp.noise_sd = *a.noise_sd;
  if (a.fe_sd) spec.fixed_effect_sd = *a.fe_sd;
  if (a.phi_shock_sd) spec.regressors.phi_shock_sd = *a.phi_shock_sd;
  spec.reverse_phi = spec.reverse_phi || a.reverse_phi;
  const auto rows = gen_panel(spec);
  if (a.out.empty()) {
    write_observations(out, rows);
  } else {
    write_observations(rows, a.out);
    out << "wrote " << rows.size() << " rows (" << spec.n_firms << " firms x " << spec.n_periods
        << " periods, seed " << spec.seed << ") to " << a.out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string estimator = "glm";
  std::vector<std::string> columns{"endowment", "age", "export_intensity", "phi"};
  bool reverse_phi = false;
  std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  auto rows = read_observations(std::filesystem::path(a.input));
  for (const auto& c : a.columns) {
    if (std::find(kRegressorNames.begin(), kRegressorNames.end(), c) == kRegressorNames.end()) {
      throw CLI::ValidationError("--columns", "unknown column '" + c + "'");
    }
  }
  if (a.reverse_phi) {
    for (auto& r : rows) r.phi = 1.0 - r.phi;
  }
  RegressionResult res;
  if (a.estimator == "fe") {
    res = fit_fixed_effects(rows, a.columns);
  } else {
    const DesignMatrix x = design_from_observations(rows, a.columns, true);
    res = fit_glm(x, response_from_observations(rows));
  }
  out << format_table(res);
  for (const auto& d : res.dropped_columns) {
    out << "dropped: " << d << " (no within-firm variation)\n";
  }
  for (const auto& n : res.notes) {
    if (n.find("dropped") == std::string::npos) out << "note: " << n << "\n";
  }
  if (!a.out.empty()) {
    write_text_file(a.out, to_json(res).dump(2) + "\n");
    out << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReplicateArgs {
  std::string preset;
  std::string preset_dir;
  std::size_t seeds = 100;
  std::optional<std::uint64_t> seed;
  std::string out;
};

std::string sign_label(ExpectedSign s) {
  switch (s) {
    case ExpectedSign::Positive: return "+";
    case ExpectedSign::Negative: return "-";
    case ExpectedSign::Any: return "any";
  }
  return "?";
}

int cmd_replicate(const ReplicateArgs& a, std::ostream& out) {
  const Preset preset = load_preset(find_preset(a.preset, dirs_from(a.preset_dir)));
  const std::uint64_t base = a.seed.value_or(default_seed());
  const ReplicationSummary s = replicate(preset, base, a.seeds);

  out << "preset: " << preset.name << " (" << to_string(preset.estimator) << ", "
      << preset.panel.n_firms << " firms x " << preset.panel.n_periods << " periods)\n";
  out << "seeds: " << base << ".." << (base + a.seeds - 1) << "\n";
  out << "pattern:";
  for (const auto& v : preset.pattern.variables) {
    out << " " << v.name << "(" << sign_label(v.sign) << ", "
        << (v.significant ? "sig" : "insig") << ")";
  }
  out << "\n";
  for (const auto& [name, passes] : s.variable_passes) {
    out << "  " << name << ": " << format_number(static_cast<double>(passes) / s.replications)
        << "\n";
  }
  const bool ok = s.fraction() >= preset.pass_threshold;
  out << "pass fraction: " << format_number(s.fraction()) << " (" << s.passes << "/"
      << s.replications << "), threshold " << format_number(preset.pass_threshold) << ": "
      << (ok ? "PASS" : "FAIL") << "\n";
  if (!a.out.empty()) {
    nlohmann::json j = {{"preset", preset.name},
                        {"base_seed", base},
                        {"replications", s.replications},
                        {"passes", s.passes},
                        {"pass_fraction", s.fraction()},
                        {"threshold", preset.pass_threshold},
                        {"pass", ok}};
    for (const auto& [name, passes] : s.variable_passes) j["variable_passes"][name] = passes;
    write_text_file(a.out, j.dump(2) + "\n");
    out << "wrote " << a.out << "\n";
  }
  return ok ? kExitOk : kExitDomain;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repeated Bertrand duopoly, growth dynamics and firm-panel econometrics lab",
               "forbearance"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GameArgs game;
  auto* g = app.add_subcommand("game", "Repeated Bertrand game with grim-trigger punishment");
  g->add_option("--pi-c", game.pi_c, "Per-period cooperative payoff")->required();
  g->add_option("--pi-d", game.pi_d, "One-shot deviation payoff")->required();
  g->add_option("--pi-p", game.pi_p, "Per-period punishment payoff")->capture_default_str();
  g->add_option("--pi-n", game.pi_n, "Static Nash payoff")->capture_default_str();
  g->add_option("--pi-m", game.pi_m, "Joint-monopoly payoff (default: --pi-c)");
  g->add_option("--delta", game.delta, "Discount factor in [0, 1)")
      ->check(kUnitOpen)
      ->capture_default_str();
  g->add_option("--horizon", game.horizon, "Number of periods")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--strategy-i", game.strategy_i, "grim | cooperate | defect")
      ->check(CLI::IsMember({"grim", "grim-trigger", "cooperate", "always-cooperate", "defect",
                             "always-defect"}))
      ->capture_default_str();
  g->add_option("--strategy-j", game.strategy_j, "grim | cooperate | defect")
      ->check(CLI::IsMember({"grim", "grim-trigger", "cooperate", "always-cooperate", "defect",
                             "always-defect"}))
      ->capture_default_str();
  g->add_option("--out", game.out, "Write the outcome as JSON");

  StabilityArgs stab;
  auto* s = app.add_subcommand("stability", "Eigenvalues, class and phase portrait of the growth system");
  s->add_option("--a", stab.a, "Decay rate of x")->capture_default_str();
  s->add_option("--b", stab.b, "Coupling of y into x")->capture_default_str();
  s->add_option("--age", stab.age, "Firm age A")->capture_default_str();
  s->add_option("--sigma", stab.sigma, "Export intensity")->capture_default_str();
  s->add_option("--phi", stab.phi, "Information index in [0, 1]")->capture_default_str();
  s->add_option("--svg", stab.svg, "Write the phase portrait SVG here");
  s->add_option("--csv", stab.csv, "Write the raw vector field (x,y,dx,dy) here");
  s->add_option("--nx", stab.nx, "Grid columns")->check(CLI::Range(2, 1000))->capture_default_str();
  s->add_option("--ny", stab.ny, "Grid rows")->check(CLI::Range(2, 1000))->capture_default_str();
  s->add_option("--start", stab.starts, "Trajectory start X,Y (repeatable; default: grid corners)");
  s->add_option("--level", stab.levels, "Cobb-Douglas output level to overlay (repeatable)");
  s->add_option("--cd-alpha", stab.cd_alpha, "Cobb-Douglas exponent on x (omega = 1 - alpha)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s->add_option("--cd-tfp", stab.cd_tfp, "Cobb-Douglas scale")->capture_default_str();
  s->add_option("--t-end", stab.t_end, "Trajectory horizon")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--dt", stab.dt, "RK4 step")->check(CLI::PositiveNumber)->capture_default_str();

  PanelArgs panel;
  auto* p = app.add_subcommand("panel", "Generate a synthetic firm panel CSV");
  p->add_option("--preset", panel.preset, "Preset name or JSON path")->capture_default_str();
  p->add_option("--preset-dir", panel.preset_dir, "Extra directory searched for presets");
  p->add_option("--firms", panel.firms, "Number of firms (default: preset)")
      ->check(CLI::PositiveNumber);
  p->add_option("--periods", panel.periods, "Number of periods (default: preset)")
      ->check(CLI::PositiveNumber);
  p->add_option("--seed", panel.seed,
                std::string("Random seed (default: $") + kSeedEnv + " or 1)");
  p->add_option("--noise-sd", panel.noise_sd, "Override the DGP noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  p->add_option("--fe-sd", panel.fe_sd, "Override the firm fixed-effect standard deviation")
      ->check(CLI::NonNegativeNumber);
  p->add_option("--phi-shock-sd", panel.phi_shock_sd, "Override within-firm phi shock sd")
      ->check(CLI::NonNegativeNumber);
  p->add_flag("--reverse-phi", panel.reverse_phi, "Write phi reverse-scored (1 - phi)");
  p->add_option("--out", panel.out, "Output CSV path (default: stdout)");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit GLM or fixed effects to an observation CSV");
  f->add_option("input,--input", fit.input, "Observation CSV")->required();
  f->add_option("--estimator", fit.estimator, "glm | fe")
      ->check(CLI::IsMember({"glm", "fe"}))
      ->capture_default_str();
  f->add_option("--columns", fit.columns, "Regressor columns")->delimiter(',')->capture_default_str();
  f->add_flag("--reverse-phi", fit.reverse_phi, "Replace phi by 1 - phi before fitting");
  f->add_option("--out", fit.out, "Write the result as JSON");

  ReplicateArgs rep;
  auto* r = app.add_subcommand("replicate", "Generate, fit and pattern-check across seeds");
  r->add_option("--preset", rep.preset, "Preset name or JSON path")->required();
  r->add_option("--preset-dir", rep.preset_dir, "Extra directory searched for presets");
  r->add_option("--seeds", rep.seeds, "Number of replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  r->add_option("--seed", rep.seed, std::string("First seed (default: $") + kSeedEnv + " or 1)");
  r->add_option("--out", rep.out, "Write a JSON summary");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*g) return cmd_game(game, out);
    if (*s) return cmd_stability(stab, out);
    if (*p) return cmd_panel(panel, out);
    if (*f) return cmd_fit(fit, out);
    if (*r) return cmd_replicate(rep, out);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace forbearance::cli
