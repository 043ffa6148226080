#pragma once

// Box-constrained minimization of F(x) = sum_i L_i(x)^2 over quadratic
// response surfaces L_i.
//
// Seeds are the local minima of F on a uniform grid over the box; each seed is
// polished by projected gradient descent (Barzilai-Borwein trial step, Armijo
// backtracking). The best polished point wins; ties on F go to the
// lexicographically smallest point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "earforge/doe.hpp"
#include "earforge/errors.hpp"
#include "earforge/rsm.hpp"

namespace earforge {

struct Interval {
  double lower = -1.0;
  double upper = 1.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ObjectiveSpec {
  std::vector<QuadraticModel> models;
  std::vector<Interval> bounds;

  std::size_t dimension() const noexcept { return bounds.size(); }

  /// Bounds default to the factorial cube [-1, 1]^f.
  static ObjectiveSpec over_unit_box(std::vector<QuadraticModel> models) {
    if (models.empty()) throw ValidationError("objective needs at least one model");
    const std::size_t f = models.front().factor_count();
    return ObjectiveSpec{std::move(models), std::vector<Interval>(f)};
  }

  void validate() const {
    if (models.empty()) throw ValidationError("objective needs at least one model");
    if (bounds.empty()) throw ValidationError("objective has no bounds");
    for (const auto& b : bounds) {
      if (!(b.lower <= b.upper) || !std::isfinite(b.lower) || !std::isfinite(b.upper)) {
        throw ValidationError("objective bounds must be finite and non-empty");
      }
    }
    for (const auto& m : models) {
      m.validate();
      if (m.factor_count() != bounds.size()) {
        throw ValidationError("model '" + m.response + "' dimension does not match the bounds");
      }
    }
  }
};

struct ConvergenceReport {
  std::size_t grid_points = 0;
  std::size_t starts = 0;
  /// Descent iterations summed over all starts.
  std::size_t iterations = 0;
  /// Projected-gradient norm at the returned point.
  double gradient_norm = 0.0;
};

struct Optimum {
  std::vector<double> normalized;
  /// Filled when a factor space is supplied.
  std::vector<double> physical;
  double f = 0.0;
  std::vector<double> predicted;
  ConvergenceReport report;
};

struct MinimizeOptions {
  std::size_t grid_resolution = 21;
  std::size_t max_starts = 64;
  std::size_t max_iterations = 20000;
  double gradient_tolerance = 1e-12;
};

namespace detail {

inline double evaluate_f(const ObjectiveSpec& spec, std::span<const double> x) {
  double f = 0.0;
  for (const auto& m : spec.models) {
    const double l = predict(m, x);
    f += l * l;
  }
  return f;
}

inline std::vector<double> evaluate_gradient(const ObjectiveSpec& spec, std::span<const double> x) {
  std::vector<double> g(x.size(), 0.0);
  for (const auto& m : spec.models) {
    const double l = predict(m, x);
    const auto gl = gradient(m, x);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += 2.0 * l * gl[k];
  }
  return g;
}

inline void project_to_box(const ObjectiveSpec& spec, std::vector<double>& x) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], spec.bounds[k].lower, spec.bounds[k].upper);
}

inline double projected_gradient_norm(const ObjectiveSpec& spec, std::span<const double> x,
                                      std::span<const double> g) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double moved = std::clamp(x[k] - g[k], spec.bounds[k].lower, spec.bounds[k].upper);
    s += (x[k] - moved) * (x[k] - moved);
  }
  return std::sqrt(s);
}

inline void check_in_bounds(const ObjectiveSpec& spec, std::span<const double> x) {
  if (x.size() != spec.dimension()) {
    throw ValidationError("point has " + std::to_string(x.size()) + " coordinates, objective expects " +
                          std::to_string(spec.dimension()));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double slack = 1e-9 * (1.0 + std::abs(spec.bounds[k].upper - spec.bounds[k].lower));
    if (!(x[k] >= spec.bounds[k].lower - slack && x[k] <= spec.bounds[k].upper + slack)) {
      std::ostringstream os;
      os << "coordinate " << k << " = " << x[k] << " lies outside [" << spec.bounds[k].lower << ", "
         << spec.bounds[k].upper << "]";
      throw ValidationError(os.str());
    }
  }
}

[[noreturn]] inline void throw_non_finite(std::span<const double> x) {
  std::ostringstream os;
  os << "objective is not finite at (";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  throw NumericError(os.str());
}

/// Visits every node of the uniform `resolution`^d grid over the box in
/// lexicographic order (last coordinate fastest).
template <class Visit>
void for_each_grid_point(const ObjectiveSpec& spec, std::size_t resolution, Visit&& visit) {
  const std::size_t d = spec.dimension();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  std::size_t flat = 0;
  while (true) {
    for (std::size_t k = 0; k < d; ++k) {
      const double t = static_cast<double>(idx[k]) / static_cast<double>(resolution - 1);
      x[k] = idx[k] + 1 == resolution ? spec.bounds[k].upper
                                      : spec.bounds[k].lower + t * (spec.bounds[k].upper - spec.bounds[k].lower);
    }
    visit(flat++, std::as_const(idx), std::as_const(x));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (++idx[k] < resolution) break;
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

struct PolishResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

inline PolishResult polish(const ObjectiveSpec& spec, std::vector<double> x, const MinimizeOptions& options) {
  constexpr double armijo = 1e-4;
  project_to_box(spec, x);
  double f = evaluate_f(spec, x);
  if (!std::isfinite(f)) throw_non_finite(x);
  auto g = evaluate_gradient(spec, x);
  double step = 1.0;
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    if (projected_gradient_norm(spec, x, g) <= options.gradient_tolerance) break;

    double t = step;
    std::vector<double> next(x.size());
    double f_next = f;
    bool accepted = false;
    while (t > 1e-30) {
      for (std::size_t k = 0; k < x.size(); ++k) next[k] = x[k] - t * g[k];
      project_to_box(spec, next);
      f_next = evaluate_f(spec, next);
      if (!std::isfinite(f_next)) throw_non_finite(next);
      double decrease = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) decrease += g[k] * (x[k] - next[k]);
      if (f_next <= f - armijo * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || next == x) break;

    auto g_next = evaluate_gradient(spec, next);
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double s = next[k] - x[k];
      ss += s * s;
      sy += s * (g_next[k] - g[k]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(2.0 * t, 1e12);
    x = std::move(next);
    f = f_next;
    g = std::move(g_next);
  }
  return {x, f, it, projected_gradient_norm(spec, x, g)};
}

inline bool better(double fa, std::span<const double> a, double fb, std::span<const double> b) {
  const double tol = 1e-13 * std::max(1.0, std::max(std::abs(fa), std::abs(fb)));
  if (fa < fb - tol) return true;
  if (fb < fa - tol) return false;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

inline double objective_f(const ObjectiveSpec& spec, std::span<const double> x) {
  detail::check_in_bounds(spec, x);
  return detail::evaluate_f(spec, x);
}

/// sum_i 2 L_i grad(L_i).
inline std::vector<double> objective_gradient(const ObjectiveSpec& spec, std::span<const double> x) {
  detail::check_in_bounds(spec, x);
  return detail::evaluate_gradient(spec, x);
}

/// Exhaustive argmin over a uniform grid with `resolution` points per axis.
inline std::pair<std::vector<double>, double> grid_oracle(const ObjectiveSpec& spec, std::size_t resolution) {
  spec.validate();
  if (resolution < 3) throw ValidationError("grid oracle needs at least 3 points per axis");
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  detail::for_each_grid_point(spec, resolution, [&](std::size_t, const auto&, const std::vector<double>& x) {
    const double f = detail::evaluate_f(spec, x);
    if (best_x.empty() || f < best_f) {
      best_f = f;
      best_x = x;
    }
  });
  return {best_x, best_f};
}

inline Optimum minimize(const ObjectiveSpec& spec, const MinimizeOptions& options = {}) {
  spec.validate();
  if (options.grid_resolution < 2) throw ValidationError("seed grid needs at least 2 points per axis");
  const std::size_t d = spec.dimension();
  const std::size_t r = options.grid_resolution;

  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= r;
  std::vector<double> values(total);
  std::vector<std::vector<double>> points(total);
  detail::for_each_grid_point(spec, r, [&](std::size_t flat, const auto&, const std::vector<double>& x) {
    values[flat] = detail::evaluate_f(spec, x);
    if (!std::isfinite(values[flat])) detail::throw_non_finite(x);
    points[flat] = x;
  });

  // Seeds: grid nodes no worse than any of their (up to 3^d - 1) neighbours.
  std::vector<std::size_t> seeds;
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t k = d; k-- > 1;) stride[k - 1] = stride[k] * r;
  detail::for_each_grid_point(spec, r, [&](std::size_t flat, const std::vector<std::size_t>& idx, const auto&) {
    std::vector<int> offset(d, -1);
    while (true) {
      bool zero = true;
      bool inside = true;
      std::ptrdiff_t neighbour = static_cast<std::ptrdiff_t>(flat);
      for (std::size_t k = 0; k < d; ++k) {
        if (offset[k] != 0) zero = false;
        const auto pos = static_cast<std::ptrdiff_t>(idx[k]) + offset[k];
        if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(r)) inside = false;
        neighbour += offset[k] * static_cast<std::ptrdiff_t>(stride[k]);
      }
      if (!zero && inside && values[static_cast<std::size_t>(neighbour)] < values[flat]) return;
      std::size_t k = d;
      while (k > 0) {
        --k;
        if (++offset[k] <= 1) break;
        offset[k] = -1;
        if (k == 0) {
          seeds.push_back(flat);
          return;
        }
      }
    }
  });
  std::sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) {
    return detail::better(values[a], points[a], values[b], points[b]);
  });
  if (seeds.size() > options.max_starts) seeds.resize(options.max_starts);

  Optimum best;
  best.f = std::numeric_limits<double>::infinity();
  best.report.grid_points = total;
  best.report.starts = seeds.size();
  for (std::size_t s : seeds) {
    auto result = detail::polish(spec, points[s], options);
    best.report.iterations += result.iterations;
    if (best.normalized.empty() || detail::better(result.f, result.x, best.f, best.normalized)) {
      best.normalized = std::move(result.x);
      best.f = result.f;
      best.report.gradient_norm = result.gradient_norm;
    }
  }
  for (const auto& m : spec.models) best.predicted.push_back(predict(m, best.normalized));
  return best;
}

/// Same as above, also reporting the optimum in physical units.
inline Optimum minimize(const ObjectiveSpec& spec, const FactorSpace& space, const MinimizeOptions& options = {}) {
  Optimum opt = minimize(spec, options);
  opt.physical = to_physical(space, opt.normalized);
  return opt;
}

}  // namespace earforge
