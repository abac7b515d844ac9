#ifndef FORBEARANCE_DYNAMICS_HPP
#define FORBEARANCE_DYNAMICS_HPP

#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forbearance/econ_model.hpp"

// Planar affine growth dynamics
//
//   x' = -a x + b y
//   y' = A sigma^(1 - phi) - y
//
// with eigenvalue-based stability classification, fixed-step RK4
// integration and phase-portrait export.

namespace forbearance {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using EigenPair = std::pair<std::complex<double>, std::complex<double>>;

struct DynamicsParams {
  double a = 0.4;  // decay of x
  double b = 0.2;  // coupling of y into x
  GrowthParams growth{1.0, 1.2, 0.4};

  void validate() const;
};

/// state' = matrix * state + forcing.
struct LinearSystem2x2 {
  Mat2 matrix{};
  Vec2 forcing{};

  Vec2 rhs(const Vec2& state) const;
  void validate() const;
};

enum class StabilityClass {
  StableNode,
  UnstableNode,
  SaddlePath,
  StableSpiral,
  UnstableSpiral,
  Center,
  Degenerate,
};

std::string_view to_string(StabilityClass c);

struct StabilityReport {
  EigenPair eigenvalues;
  StabilityClass stability = StabilityClass::Degenerate;
  Vec2 equilibrium{};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> states;
};

struct GridSpec {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  int nx = 20;
  int ny = 20;

  void validate() const;
};

struct Arrow {
  Vec2 position{};
  Vec2 velocity{};
};

struct VectorFieldGrid {
  GridSpec grid;
  std::vector<Arrow> arrows;  // row-major: y index outer, x index inner
};

class SingularSystemError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

LinearSystem2x2 build_system(const DynamicsParams& p);

/// Roots of lambda^2 - tr lambda + det, sorted by real part then imaginary part.
EigenPair eigenvalues_2x2(const Mat2& m);

StabilityClass classify_stability(const EigenPair& eigs);

/// Solves matrix * v + forcing = 0. Throws SingularSystemError when det == 0.
Vec2 equilibrium_point(const LinearSystem2x2& sys);

StabilityReport analyze_stability(const LinearSystem2x2& sys);

/// Classical RK4 with fixed step dt; the final step is shortened so the last
/// sample lands exactly on t_end. Throws DivergenceError on non-finite state.
Trajectory integrate_trajectory(const LinearSystem2x2& sys, const Vec2& start, double t_end,
                                double dt);

VectorFieldGrid vector_field(const LinearSystem2x2& sys, const GridSpec& grid);

/// Default grid: 20 x 20 over [0, 2 x*] x [0, 2 y*]; falls back to [-1, 1]
/// along any axis whose equilibrium coordinate is zero.
GridSpec default_grid(const LinearSystem2x2& sys);

struct PhasePortraitOptions {
  double width = 640.0;
  double height = 640.0;
  double margin = 48.0;
  double t_end = 50.0;
  double dt = 0.01;
  /// Cobb-Douglas level sets A x^alpha y^omega = level drawn over the grid.
  ProductionParams production{};
  std::vector<double> output_levels;
};

struct PhasePortrait {
  std::string svg;
  std::string csv;  // header x,y,dx,dy
};

PhasePortrait phase_portrait_export(const LinearSystem2x2& sys, const GridSpec& grid,
                                    std::span<const Vec2> sample_starts,
                                    const PhasePortraitOptions& options = {});

/// Writes `content` to `path`; throws std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace forbearance

#endif  // FORBEARANCE_DYNAMICS_HPP
