#include "forbearance/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "checks.hpp"

namespace forbearance {

using detail::require;
using detail::require_finite;

void DynamicsParams::validate() const {
  require_finite("a", a);
  require_finite("b", b);
  growth.validate();
}

Vec2 LinearSystem2x2::rhs(const Vec2& s) const {
  return {matrix[0][0] * s[0] + matrix[0][1] * s[1] + forcing[0],
          matrix[1][0] * s[0] + matrix[1][1] * s[1] + forcing[1]};
}

void LinearSystem2x2::validate() const {
  for (const auto& row : matrix) {
    for (double v : row) require_finite("matrix entry", v);
  }
  require_finite("forcing[0]", forcing[0]);
  require_finite("forcing[1]", forcing[1]);
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableNode: return "StableNode";
    case StabilityClass::UnstableNode: return "UnstableNode";
    case StabilityClass::SaddlePath: return "SaddlePath";
    case StabilityClass::StableSpiral: return "StableSpiral";
    case StabilityClass::UnstableSpiral: return "UnstableSpiral";
    case StabilityClass::Center: return "Center";
    case StabilityClass::Degenerate: return "Degenerate";
  }
  return "?";
}

void GridSpec::validate() const {
  require_finite("x_lo", x_lo);
  require_finite("x_hi", x_hi);
  require_finite("y_lo", y_lo);
  require_finite("y_hi", y_hi);
  require(x_lo < x_hi && y_lo < y_hi, "grid ranges must be non-empty");
  require(nx >= 2 && ny >= 2, "grid counts must be >= 2");
}

LinearSystem2x2 build_system(const DynamicsParams& p) {
  p.validate();
  LinearSystem2x2 sys;
  sys.matrix = {{{-p.a, p.b}, {0.0, -1.0}}};
  sys.forcing = {0.0, growth_rate(p.growth)};
  return sys;
}

EigenPair eigenvalues_2x2(const Mat2& m) {
  const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
  for (double v : {a, b, c, d}) require_finite("matrix entry", v);
  const double tr = a + d;
  const double det = a * d - b * c;
  // (a - d)^2 + 4bc equals tr^2 - 4 det without the cancellation.
  const double disc = (a - d) * (a - d) + 4.0 * b * c;
  std::complex<double> l1, l2;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = 0.5 * (tr + std::copysign(root, tr));
    if (q != 0.0) {
      l1 = q;
      l2 = det / q;
    } else {
      l1 = 0.5 * root;
      l2 = -0.5 * root;
    }
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    l1 = {0.5 * tr, -im};
    l2 = {0.5 * tr, im};
  }
  const auto less = [](const std::complex<double>& x, const std::complex<double>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  if (less(l2, l1)) std::swap(l1, l2);
  return {l1, l2};
}

StabilityClass classify_stability(const EigenPair& eigs) {
  const auto& [l1, l2] = eigs;
  const double scale = std::max({std::abs(l1), std::abs(l2), 1e-300});
  const double tol = 1e-9 * scale;
  const bool complex_pair = std::abs(l1.imag()) > tol || std::abs(l2.imag()) > tol;
  if (complex_pair) {
    const double re = 0.5 * (l1.real() + l2.real());
    if (std::abs(re) <= tol) return StabilityClass::Center;
    return re < 0.0 ? StabilityClass::StableSpiral : StabilityClass::UnstableSpiral;
  }
  const double r1 = l1.real();
  const double r2 = l2.real();
  if (std::abs(r1) <= tol || std::abs(r2) <= tol) return StabilityClass::Degenerate;
  if (std::abs(r1 - r2) <= tol) return StabilityClass::Degenerate;
  if (r1 < 0.0 && r2 < 0.0) return StabilityClass::StableNode;
  if (r1 > 0.0 && r2 > 0.0) return StabilityClass::UnstableNode;
  return StabilityClass::SaddlePath;
}

Vec2 equilibrium_point(const LinearSystem2x2& sys) {
  sys.validate();
  const auto& m = sys.matrix;
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (det == 0.0) throw SingularSystemError("system matrix is singular; no unique equilibrium");
  // Cramer's rule on matrix * v = -forcing.
  const double f0 = -sys.forcing[0];
  const double f1 = -sys.forcing[1];
  return {(f0 * m[1][1] - m[0][1] * f1) / det, (m[0][0] * f1 - f0 * m[1][0]) / det};
}

StabilityReport analyze_stability(const LinearSystem2x2& sys) {
  StabilityReport report;
  report.eigenvalues = eigenvalues_2x2(sys.matrix);
  report.stability = classify_stability(report.eigenvalues);
  report.equilibrium = equilibrium_point(sys);
  return report;
}

namespace {

Vec2 axpy(const Vec2& x, double h, const Vec2& k) { return {x[0] + h * k[0], x[1] + h * k[1]}; }

Vec2 rk4_step(const LinearSystem2x2& sys, const Vec2& s, double h) {
  const Vec2 k1 = sys.rhs(s);
  const Vec2 k2 = sys.rhs(axpy(s, 0.5 * h, k1));
  const Vec2 k3 = sys.rhs(axpy(s, 0.5 * h, k2));
  const Vec2 k4 = sys.rhs(axpy(s, h, k3));
  return {s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

}  // namespace

Trajectory integrate_trajectory(const LinearSystem2x2& sys, const Vec2& start, double t_end,
                                double dt) {
  sys.validate();
  require_finite("t_end", t_end);
  require_finite("dt", dt);
  require(dt > 0.0, "dt must be > 0");
  require(t_end >= dt, "t_end must be >= dt");
  require_finite("start[0]", start[0]);
  require_finite("start[1]", start[1]);

  // Steps are counted, not accumulated, so times stay exact multiples of dt.
  const auto full_steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  Trajectory traj;
  traj.times.reserve(full_steps + 2);
  traj.states.reserve(full_steps + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(start);
  Vec2 s = start;
  const auto push = [&](double t) {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
      throw DivergenceError("trajectory diverged", t);
    }
    traj.times.push_back(t);
    traj.states.push_back(s);
  };
  for (std::size_t k = 1; k <= full_steps; ++k) {
    s = rk4_step(sys, s, dt);
    push(static_cast<double>(k) * dt);
  }
  const double t_last = static_cast<double>(full_steps) * dt;
  const double rest = t_end - t_last;
  if (rest > 1e-12 * t_end) {
    s = rk4_step(sys, s, rest);
    push(t_end);
  }
  return traj;
}

VectorFieldGrid vector_field(const LinearSystem2x2& sys, const GridSpec& grid) {
  sys.validate();
  grid.validate();
  VectorFieldGrid field;
  field.grid = grid;
  field.arrows.reserve(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y_lo + (grid.y_hi - grid.y_lo) * iy / (grid.ny - 1);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x_lo + (grid.x_hi - grid.x_lo) * ix / (grid.nx - 1);
      const Vec2 pos{x, y};
      field.arrows.push_back({pos, sys.rhs(pos)});
    }
  }
  return field;
}

GridSpec default_grid(const LinearSystem2x2& sys) {
  const Vec2 eq = equilibrium_point(sys);
  GridSpec g;
  const auto range = [](double center, double& lo, double& hi) {
    if (center == 0.0) {
      lo = -1.0;
      hi = 1.0;
    } else {
      lo = std::min(0.0, 2.0 * center);
      hi = std::max(0.0, 2.0 * center);
    }
  };
  range(eq[0], g.x_lo, g.x_hi);
  range(eq[1], g.y_lo, g.y_hi);
  return g;
}

// ---------------------------------------------------------------------------
// SVG / CSV emission

namespace {

std::string num(double v, const char* format = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  // Avoid "-0.000".
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

struct Frame {
  GridSpec grid;
  double width, height, margin;

  double px(double x) const {
    return margin + (x - grid.x_lo) / (grid.x_hi - grid.x_lo) * (width - 2.0 * margin);
  }
  double py(double y) const {
    return height - margin - (y - grid.y_lo) / (grid.y_hi - grid.y_lo) * (height - 2.0 * margin);
  }
  bool inside(const Vec2& p) const {
    return p[0] >= grid.x_lo && p[0] <= grid.x_hi && p[1] >= grid.y_lo && p[1] <= grid.y_hi;
  }
};

void emit_polyline(std::string& out, const std::vector<Vec2>& pts, const Frame& f,
                   const char* css_class) {
  if (pts.size() < 2) return;
  out += "  <polyline class=\"";
  out += css_class;
  out += "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(f.px(pts[i][0])) + "," + num(f.py(pts[i][1]));
  }
  out += "\"/>\n";
}

void emit_level_set(std::string& out, const ProductionParams& prod, double level,
                    const Frame& f) {
  // A x^alpha y^omega = level, solved for y along x (x and y play W and Z).
  if (level <= 0.0 || prod.tfp <= 0.0) return;
  if (prod.omega == 0.0) {
    const double x = std::pow(level / prod.tfp, 1.0 / prod.alpha);
    if (x < f.grid.x_lo || x > f.grid.x_hi) return;
    emit_polyline(out, {{x, f.grid.y_lo}, {x, f.grid.y_hi}}, f, "level");
    return;
  }
  constexpr int kSamples = 200;
  std::vector<Vec2> segment;
  for (int k = 0; k <= kSamples; ++k) {
    const double x = f.grid.x_lo + (f.grid.x_hi - f.grid.x_lo) * k / kSamples;
    bool keep = false;
    Vec2 p{x, 0.0};
    if (x > 0.0) {
      p[1] = std::pow(level / (prod.tfp * std::pow(x, prod.alpha)), 1.0 / prod.omega);
      keep = std::isfinite(p[1]) && f.inside(p);
    }
    if (keep) {
      segment.push_back(p);
    } else {
      emit_polyline(out, segment, f, "level");
      segment.clear();
    }
  }
  emit_polyline(out, segment, f, "level");
}

}  // namespace

PhasePortrait phase_portrait_export(const LinearSystem2x2& sys, const GridSpec& grid,
                                    std::span<const Vec2> sample_starts,
                                    const PhasePortraitOptions& options) {
  const VectorFieldGrid field = vector_field(sys, grid);
  require(options.width > 2.0 * options.margin && options.height > 2.0 * options.margin,
          "canvas too small for margin");
  const Frame frame{grid, options.width, options.height, options.margin};

  PhasePortrait out;

  out.csv = "x,y,dx,dy\n";
  for (const Arrow& a : field.arrows) {
    out.csv += num(a.position[0], "%.17g") + "," + num(a.position[1], "%.17g") + "," +
               num(a.velocity[0], "%.17g") + "," + num(a.velocity[1], "%.17g") + "\n";
  }

  const double cell = std::min((options.width - 2.0 * options.margin) / (grid.nx - 1),
                               (options.height - 2.0 * options.margin) / (grid.ny - 1));
  // Arrows are drawn in pixel space so their direction matches the plot axes.
  const double sx = (options.width - 2.0 * options.margin) / (grid.x_hi - grid.x_lo);
  const double sy = (options.height - 2.0 * options.margin) / (grid.y_hi - grid.y_lo);
  double longest = 0.0;
  for (const Arrow& a : field.arrows) {
    longest = std::max(longest, std::hypot(a.velocity[0] * sx, a.velocity[1] * sy));
  }
  const double scale = longest > 0.0 ? 0.8 * cell / longest : 0.0;

  std::string& svg = out.svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(options.width, "%.0f") + "\" height=\"" + num(options.height, "%.0f") +
         "\" viewBox=\"0 0 " + num(options.width, "%.0f") + " " + num(options.height, "%.0f") +
         "\">\n";
  svg += "  <style>\n"
         "    .arrow { stroke: #3b5b92; stroke-width: 1; fill: none; }\n"
         "    .head { fill: #3b5b92; stroke: none; }\n"
         "    .traj { stroke: #c0392b; stroke-width: 1.5; fill: none; }\n"
         "    .level { stroke: #27ae60; stroke-width: 1; stroke-dasharray: 4 3; fill: none; }\n"
         "    .axis { stroke: #333333; stroke-width: 1; fill: none; }\n"
         "    .label { font-family: sans-serif; font-size: 12px; fill: #333333; }\n"
         "  </style>\n";
  svg += "  <defs><clipPath id=\"plot\"><rect x=\"" + num(options.margin) + "\" y=\"" +
         num(options.margin) + "\" width=\"" + num(options.width - 2.0 * options.margin) +
         "\" height=\"" + num(options.height - 2.0 * options.margin) +
         "\"/></clipPath></defs>\n";
  svg += "  <rect class=\"axis\" x=\"" + num(options.margin) + "\" y=\"" + num(options.margin) +
         "\" width=\"" + num(options.width - 2.0 * options.margin) + "\" height=\"" +
         num(options.height - 2.0 * options.margin) + "\"/>\n";
  svg += "  <text class=\"label\" x=\"" + num(options.width / 2.0) + "\" y=\"" +
         num(options.height - options.margin / 3.0) +
         "\" text-anchor=\"middle\">x (endowment)</text>\n";
  svg += "  <text class=\"label\" x=\"" + num(options.margin / 3.0) + "\" y=\"" +
         num(options.height / 2.0) + "\" transform=\"rotate(-90 " + num(options.margin / 3.0) +
         " " + num(options.height / 2.0) +
         ")\" text-anchor=\"middle\">y (growth)</text>\n";
  for (double v : {grid.x_lo, grid.x_hi}) {
    svg += "  <text class=\"label\" x=\"" + num(frame.px(v)) + "\" y=\"" +
           num(options.height - options.margin + 16.0) + "\" text-anchor=\"middle\">" +
           num(v, "%.4g") + "</text>\n";
  }
  for (double v : {grid.y_lo, grid.y_hi}) {
    svg += "  <text class=\"label\" x=\"" + num(options.margin - 6.0) + "\" y=\"" +
           num(frame.py(v) + 4.0) + "\" text-anchor=\"end\">" + num(v, "%.4g") + "</text>\n";
  }

  svg += "  <g id=\"field\">\n";
  for (const Arrow& a : field.arrows) {
    const double x0 = frame.px(a.position[0]);
    const double y0 = frame.py(a.position[1]);
    const double dx = a.velocity[0] * sx * scale;
    const double dy = -a.velocity[1] * sy * scale;
    const double len = std::hypot(dx, dy);
    if (len < 1e-9) continue;
    const double x1 = x0 + dx;
    const double y1 = y0 + dy;
    svg += "  <line class=\"arrow\" x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" +
           num(x1) + "\" y2=\"" + num(y1) + "\"/>\n";
    const double head = std::min(4.0, 0.4 * len);
    const double ux = dx / len, uy = dy / len;
    const double bx = x1 - head * ux, by = y1 - head * uy;
    svg += "  <polygon class=\"head\" points=\"" + num(x1) + "," + num(y1) + " " +
           num(bx - 0.5 * head * uy) + "," + num(by + 0.5 * head * ux) + " " +
           num(bx + 0.5 * head * uy) + "," + num(by - 0.5 * head * ux) + "\"/>\n";
  }
  svg += "  </g>\n";

  svg += "  <g id=\"levels\" clip-path=\"url(#plot)\">\n";
  for (double level : options.output_levels) emit_level_set(svg, options.production, level, frame);
  svg += "  </g>\n";

  svg += "  <g id=\"trajectories\" clip-path=\"url(#plot)\">\n";
  for (const Vec2& start : sample_starts) {
    const Trajectory traj = integrate_trajectory(sys, start, options.t_end, options.dt);
    std::vector<Vec2> pts;
    const std::size_t stride = std::max<std::size_t>(1, traj.states.size() / 400);
    for (std::size_t k = 0; k < traj.states.size(); k += stride) pts.push_back(traj.states[k]);
    if (pts.back() != traj.states.back()) pts.push_back(traj.states.back());
    emit_polyline(svg, pts, frame, "traj");
  }
  svg += "  </g>\n";

  try {
    const Vec2 eq = equilibrium_point(sys);
    if (frame.inside(eq)) {
      svg += "  <circle id=\"equilibrium\" cx=\"" + num(frame.px(eq[0])) + "\" cy=\"" +
             num(frame.py(eq[1])) + "\" r=\"4\" fill=\"#000000\"/>\n";
    }
  } catch (const SingularSystemError&) {
    // No isolated equilibrium to mark.
  }
  svg += "</svg>\n";
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace forbearance
