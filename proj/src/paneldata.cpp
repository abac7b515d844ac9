#include "forbearance/paneldata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "checks.hpp"
#include "forbearance/rng.hpp"

namespace forbearance {

using detail::require;
using detail::require_finite;

namespace {

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// Stream lanes inside a firm's key.
constexpr std::uint64_t kRegressorLane = 0;
constexpr std::uint64_t kFixedEffectLane = 1;
constexpr std::uint64_t kNoiseLane = 2;

}  // namespace

void PhiProxies::validate() const {
  for (double v : {digital_adoption, strategic_awareness, advice_seeking, data_capability}) {
    require_finite("phi proxy", v);
    require(unit_interval(v), "phi proxy scores must lie in [0, 1]");
  }
}

double phi_index(const PhiProxies& p, const PhiWeights& weights) {
  p.validate();
  double sum = 0.0;
  for (double w : weights) {
    require_finite("phi weight", w);
    require(w >= 0.0, "phi weights must be non-negative");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "phi weights must sum to 1");
  const double v = weights[0] * p.digital_adoption + weights[1] * p.strategic_awareness +
                   weights[2] * p.advice_seeking + weights[3] * p.data_capability;
  return std::clamp(v, 0.0, 1.0);
}

void DgpCoefficients::validate() const {
  for (double v : {intercept, endowment, age, export_intensity, phi, noise_sd}) {
    require_finite("dgp coefficient", v);
  }
  require(noise_sd >= 0.0, "noise_sd must be >= 0");
}

void RegressorProcess::validate() const {
  for (double v : {endowment_log_mean, endowment_log_sd, endowment_scale, export_beta_a,
                   export_beta_b, phi_beta_a, phi_beta_b, persistence, endowment_shock_sd,
                   export_shock_sd, phi_shock_sd}) {
    require_finite("regressor parameter", v);
  }
  require(endowment_log_sd >= 0.0, "endowment_log_sd must be >= 0");
  require(endowment_scale > 0.0, "endowment_scale must be > 0");
  require(age_min >= 0 && age_min <= age_max, "age range must satisfy 0 <= min <= max");
  require(export_beta_a > 0.0 && export_beta_b > 0.0, "export Beta shapes must be > 0");
  require(phi_beta_a > 0.0 && phi_beta_b > 0.0, "phi Beta shapes must be > 0");
  require(persistence >= 0.0 && persistence < 1.0, "persistence must lie in [0, 1)");
  require(endowment_shock_sd >= 0.0 && export_shock_sd >= 0.0 && phi_shock_sd >= 0.0,
          "shock standard deviations must be >= 0");
}

void PanelSpec::validate() const {
  require(n_firms >= 1, "n_firms must be >= 1");
  require(n_periods >= 1, "n_periods must be >= 1");
  require_finite("fixed_effect_sd", fixed_effect_sd);
  require(fixed_effect_sd >= 0.0, "fixed_effect_sd must be >= 0");
  dgp.validate();
  regressors.validate();
}

void FirmObservation::validate() const {
  require(!firm_id.empty(), "firm_id must be non-empty");
  for (double v : {growth, endowment, age, export_intensity, phi}) require_finite("field", v);
  require(age >= 0.0, "age must be >= 0");
  require(unit_interval(export_intensity), "export_intensity must lie in [0, 1]");
  require(unit_interval(phi), "phi must lie in [0, 1]");
}

double observation_value(const FirmObservation& row, std::string_view column) {
  if (column == "growth") return row.growth;
  if (column == "endowment") return row.endowment;
  if (column == "age") return row.age;
  if (column == "export_intensity") return row.export_intensity;
  if (column == "phi") return row.phi;
  throw std::invalid_argument("unknown column '" + std::string(column) + "'");
}

std::string firm_label(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "F%04d", index + 1);
  return buf;
}

std::vector<double> draw_fixed_effects(const PanelSpec& spec) {
  spec.validate();
  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(spec.n_firms));
  for (int i = 0; i < spec.n_firms; ++i) {
    auto eng = make_stream(spec.seed, static_cast<std::uint64_t>(i), kFixedEffectLane);
    std::normal_distribution<double> z(0.0, 1.0);
    alphas.push_back(spec.fixed_effect_sd * z(eng));
  }
  return alphas;
}

std::vector<FirmObservation> gen_panel(const PanelSpec& spec) {
  spec.validate();
  const auto& rp = spec.regressors;
  const std::vector<double> alphas = draw_fixed_effects(spec);

  std::vector<FirmObservation> rows;
  std::vector<double> noise;
  rows.reserve(static_cast<std::size_t>(spec.n_firms) * static_cast<std::size_t>(spec.n_periods));
  noise.reserve(rows.capacity());

  for (int i = 0; i < spec.n_firms; ++i) {
    auto eng = make_stream(spec.seed, static_cast<std::uint64_t>(i), kRegressorLane);
    auto noise_eng = make_stream(spec.seed, static_cast<std::uint64_t>(i), kNoiseLane);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<int> age_dist(rp.age_min, rp.age_max);

    const double endow0 =
        rp.endowment_scale * std::exp(rp.endowment_log_mean + rp.endowment_log_sd * z(eng));
    const int age0 = age_dist(eng);
    const double export0 = draw_beta(eng, rp.export_beta_a, rp.export_beta_b);
    const double phi0 = draw_beta(eng, rp.phi_beta_a, rp.phi_beta_b);

    double endow = endow0;
    double exp_share = export0;
    double phi = phi0;
    for (int t = 0; t < spec.n_periods; ++t) {
      if (t > 0) {
        endow = endow0 + rp.persistence * (endow - endow0) + rp.endowment_shock_sd * z(eng);
        exp_share = std::clamp(
            export0 + rp.persistence * (exp_share - export0) + rp.export_shock_sd * z(eng), 0.0,
            1.0);
        phi = std::clamp(phi0 + rp.persistence * (phi - phi0) + rp.phi_shock_sd * z(eng), 0.0,
                         1.0);
      }
      FirmObservation row;
      row.firm_id = firm_label(i);
      row.period = t;
      row.endowment = endow;
      row.age = static_cast<double>(age0 + t);
      row.export_intensity = exp_share;
      row.phi = phi;
      rows.push_back(std::move(row));
      noise.push_back(spec.dgp.noise_sd * z(noise_eng));
    }
  }

  if (rp.standardize_endowment && rows.size() >= 2) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.endowment;
    mean /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.endowment - mean) * (r.endowment - mean);
    const double sd = std::sqrt(ss / static_cast<double>(rows.size() - 1));
    if (sd > 0.0) {
      for (auto& r : rows) r.endowment = (r.endowment - mean) / sd;
    }
  }

  const auto& b = spec.dgp;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = rows[k];
    const double alpha = alphas[k / static_cast<std::size_t>(spec.n_periods)];
    r.growth = alpha + b.intercept + b.endowment * r.endowment + b.age * r.age +
               b.export_intensity * r.export_intensity + b.phi * r.phi + noise[k];
    if (spec.reverse_phi) r.phi = 1.0 - r.phi;
  }
  return rows;
}

std::vector<FirmObservation> gen_cross_section(const PanelSpec& spec) {
  require(spec.n_periods == 1, "a cross-section requires n_periods == 1");
  return gen_panel(spec);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr std::array<std::string_view, 7> kFields{
    "firm_id", "period", "growth", "endowment", "age", "export_intensity", "phi"};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, std::string_view field, const std::string& why) {
  throw CsvError("line " + std::to_string(line) + ", field '" + std::string(field) + "': " + why,
                 line, std::string(field));
}

double parse_double(std::string_view text, std::size_t line, std::string_view field) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    fail(line, field, "malformed number '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) fail(line, field, "non-finite value");
  return v;
}

int parse_int(std::string_view text, std::size_t line, std::string_view field) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    fail(line, field, "malformed integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void write_observations(std::ostream& os, const std::vector<FirmObservation>& rows) {
  os << kObservationHeader << '\n';
  for (const auto& r : rows) {
    os << r.firm_id << ',' << r.period << ',' << format_double(r.growth) << ','
       << format_double(r.endowment) << ',' << format_double(r.age) << ','
       << format_double(r.export_intensity) << ',' << format_double(r.phi) << '\n';
  }
}

std::string observations_to_csv(const std::vector<FirmObservation>& rows) {
  std::ostringstream os;
  write_observations(os, rows);
  return os.str();
}

void write_observations(const std::vector<FirmObservation>& rows,
                        const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_observations(os, rows);
  if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<FirmObservation> read_observations(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw CsvError("missing header line", 1, "header");
  ++line_no;
  if (trim(line) != kObservationHeader) {
    throw CsvError("unexpected header '" + std::string(trim(line)) + "'; expected '" +
                       std::string(kObservationHeader) + "'",
                   1, "header");
  }
  std::vector<FirmObservation> rows;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto cells = split(text);
    if (cells.size() != kFields.size()) {
      fail(line_no, cells.size() < kFields.size() ? kFields[cells.size()] : "phi",
           "expected " + std::to_string(kFields.size()) + " fields, found " +
               std::to_string(cells.size()));
    }
    FirmObservation r;
    r.firm_id = std::string(trim(cells[0]));
    if (r.firm_id.empty()) fail(line_no, kFields[0], "empty identifier");
    r.period = parse_int(trim(cells[1]), line_no, kFields[1]);
    r.growth = parse_double(trim(cells[2]), line_no, kFields[2]);
    r.endowment = parse_double(trim(cells[3]), line_no, kFields[3]);
    r.age = parse_double(trim(cells[4]), line_no, kFields[4]);
    r.export_intensity = parse_double(trim(cells[5]), line_no, kFields[5]);
    r.phi = parse_double(trim(cells[6]), line_no, kFields[6]);
    if (r.age < 0.0) fail(line_no, "age", "must be >= 0");
    if (!unit_interval(r.export_intensity)) {
      fail(line_no, "export_intensity", "out of range [0, 1]");
    }
    if (!unit_interval(r.phi)) fail(line_no, "phi", "out of range [0, 1]");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FirmObservation> read_observations(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return read_observations(is);
}

}  // namespace forbearance
