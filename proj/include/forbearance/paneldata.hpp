#ifndef FORBEARANCE_PANELDATA_HPP
#define FORBEARANCE_PANELDATA_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Synthetic firm cross-sections and firm-year panels, the phi information
// index, and the observation CSV format
//
//   firm_id,period,growth,endowment,age,export_intensity,phi

namespace forbearance {

struct PhiProxies {
  double digital_adoption = 0.0;
  double strategic_awareness = 0.0;
  double advice_seeking = 0.0;
  double data_capability = 0.0;

  void validate() const;
};

using PhiWeights = std::array<double, 4>;

inline constexpr PhiWeights kEqualPhiWeights{0.25, 0.25, 0.25, 0.25};

/// Weighted mean of the four proxy scores; 1 means perfect information.
double phi_index(const PhiProxies& p, const PhiWeights& weights = kEqualPhiWeights);

/// growth = intercept + endowment x + age A + export sigma + phi phi + N(0, noise_sd^2)
struct DgpCoefficients {
  double intercept = 0.0;
  double endowment = 0.0;
  double age = 0.0;
  double export_intensity = 0.0;
  double phi = 0.0;
  double noise_sd = 0.0;

  void validate() const;
};

/// How regressors are drawn and how they evolve within a firm.
struct RegressorProcess {
  double endowment_log_mean = 0.0;  // endowment = scale * LogNormal(mean, sd)
  double endowment_log_sd = 1.0;
  double endowment_scale = 1.0;
  bool standardize_endowment = true;  // z-score the endowment column after drawing
  int age_min = 1;                    // age at the first period ~ U{age_min..age_max}
  int age_max = 50;
  double export_beta_a = 2.0;
  double export_beta_b = 5.0;
  double phi_beta_a = 5.0;
  double phi_beta_b = 2.0;
  // Within-firm AR(1) around the firm's first-period draw.
  double persistence = 0.9;
  double endowment_shock_sd = 0.1;
  double export_shock_sd = 0.01;
  double phi_shock_sd = 0.01;

  void validate() const;
};

struct PanelSpec {
  int n_firms = 50;
  int n_periods = 5;
  DgpCoefficients dgp;
  double fixed_effect_sd = 0.0;
  std::uint64_t seed = 1;
  RegressorProcess regressors;
  /// Write phi as 1 - phi (higher = more asymmetry) after growth is computed.
  bool reverse_phi = false;

  void validate() const;
};

struct FirmObservation {
  std::string firm_id;
  int period = 0;
  double growth = 0.0;
  double endowment = 0.0;
  double age = 0.0;
  double export_intensity = 0.0;
  double phi = 0.0;

  void validate() const;
  bool operator==(const FirmObservation&) const = default;
};

/// Regressor columns addressable by name in fits and patterns.
inline constexpr std::array<std::string_view, 4> kRegressorNames{"endowment", "age",
                                                                 "export_intensity", "phi"};

/// Value of a named regressor or "growth"; throws std::invalid_argument otherwise.
double observation_value(const FirmObservation& row, std::string_view column);

std::string firm_label(int index);

/// One row per firm; requires spec.n_periods == 1.
std::vector<FirmObservation> gen_cross_section(const PanelSpec& spec);

/// Firm-major rows (firm 0 periods 0..T-1, firm 1, ...). Per-firm draws come
/// from independent counter-keyed streams.
std::vector<FirmObservation> gen_panel(const PanelSpec& spec);

/// Draws the firm-level fixed effects alpha_i that gen_panel uses.
std::vector<double> draw_fixed_effects(const PanelSpec& spec);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

inline constexpr std::string_view kObservationHeader =
    "firm_id,period,growth,endowment,age,export_intensity,phi";

void write_observations(std::ostream& os, const std::vector<FirmObservation>& rows);
void write_observations(const std::vector<FirmObservation>& rows,
                        const std::filesystem::path& path);
std::string observations_to_csv(const std::vector<FirmObservation>& rows);

std::vector<FirmObservation> read_observations(std::istream& is);
std::vector<FirmObservation> read_observations(const std::filesystem::path& path);

}  // namespace forbearance

#endif  // FORBEARANCE_PANELDATA_HPP
