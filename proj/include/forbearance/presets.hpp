#ifndef FORBEARANCE_PRESETS_HPP
#define FORBEARANCE_PRESETS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forbearance/econometrics.hpp"
#include "forbearance/paneldata.hpp"

// Calibration presets: a data-generating process, the estimator used to
// recover it, and the sign/significance pattern a replication must show.

namespace forbearance {

struct Preset {
  std::string name;
  std::string description;
  PanelSpec panel;
  /// Used instead of panel.dgp when a single-period cross-section is requested.
  std::optional<DgpCoefficients> cross_section_dgp;
  Estimator estimator = Estimator::GlmGaussianIdentity;
  std::vector<std::string> columns{"endowment", "age", "export_intensity", "phi"};
  PatternExpectation pattern;
  double pass_threshold = 0.8;

  /// Panel spec for the given seed; picks cross_section_dgp when n_periods == 1.
  PanelSpec spec_for(std::uint64_t seed) const;
};

Preset preset_from_json(const nlohmann::json& j);
Preset load_preset(const std::filesystem::path& path);

/// Resolves a preset name or path. Names are looked up as <dir>/<name>.json in
/// `extra_dirs`, $FORBEARANCE_PRESET_DIR, the executable's presets/ directory
/// and the source tree's presets/ directory, in that order.
std::filesystem::path find_preset(std::string_view name_or_path,
                                  const std::vector<std::filesystem::path>& extra_dirs = {});

struct ReplicationSummary {
  std::string preset;
  std::size_t replications = 0;
  std::size_t passes = 0;
  std::vector<std::pair<std::string, std::size_t>> variable_passes;
  double fraction() const {
    return replications == 0 ? 0.0 : static_cast<double>(passes) / static_cast<double>(replications);
  }
};

/// Generates, fits and checks the preset pattern for seeds base_seed .. base_seed + n - 1.
ReplicationSummary replicate(const Preset& preset, std::uint64_t base_seed, std::size_t n);

RegressionResult fit_preset(const Preset& preset, const std::vector<FirmObservation>& rows);

}  // namespace forbearance

#endif  // FORBEARANCE_PRESETS_HPP
