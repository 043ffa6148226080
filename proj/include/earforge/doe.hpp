#pragma once

// Box-Wilson central composite designs in normalized factor units.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "earforge/errors.hpp"

namespace earforge {

inline constexpr double kDefaultStarDistance = 1.287;

struct Factor {
  std::string name;
  double center = 0.0;
  double half_range = 1.0;

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct FactorSpace {
  std::vector<Factor> factors;
  double alpha = kDefaultStarDistance;

  std::size_t size() const noexcept { return factors.size(); }

  void validate() const {
    if (factors.empty()) throw ValidationError("factor space is empty");
    for (const auto& f : factors) {
      if (!(f.half_range > 0.0) || !std::isfinite(f.center)) {
        throw ValidationError("factor '" + f.name + "' needs a finite center and a positive half range");
      }
    }
    if (!(alpha >= 1.0)) throw ValidationError("star distance alpha must be >= 1");
  }

  /// D in [115.5, 118.5] mm, A1 and A2 in [-1.5, 1.5] mm, alpha 1.287.
  static FactorSpace blank_default() {
    return FactorSpace{{{"D", 117.0, 1.5}, {"A1", 0.0, 1.5}, {"A2", 0.0, 1.5}}, kDefaultStarDistance};
  }

  friend bool operator==(const FactorSpace&, const FactorSpace&) = default;
};

enum class PointRole { factorial, center, star };

inline std::string_view to_string(PointRole role) {
  switch (role) {
    case PointRole::factorial: return "factorial";
    case PointRole::center: return "center";
    case PointRole::star: return "star";
  }
  return "unknown";
}

inline PointRole point_role_from_string(std::string_view s) {
  if (s == "factorial") return PointRole::factorial;
  if (s == "center") return PointRole::center;
  if (s == "star") return PointRole::star;
  throw ValidationError("unknown design point role '" + std::string(s) + "'");
}

struct DesignPoint {
  PointRole role = PointRole::center;
  std::vector<double> coords;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

struct DesignMatrix {
  std::size_t factor_count = 0;
  std::vector<DesignPoint> points;

  std::size_t size() const noexcept { return points.size(); }

  friend bool operator==(const DesignMatrix&, const DesignMatrix&) = default;
};

/// Full 2^f factorial block (last factor alternating fastest, low level first),
/// one center point, then a (-alpha, +alpha) star pair per factor.
inline DesignMatrix ccd_design(const FactorSpace& space) {
  space.validate();
  const std::size_t f = space.size();
  if (f < 2 || f > 6) throw ValidationError("central composite design supports 2..6 factors");

  DesignMatrix design;
  design.factor_count = f;
  const std::size_t corners = std::size_t{1} << f;
  for (std::size_t i = 0; i < corners; ++i) {
    DesignPoint p{PointRole::factorial, std::vector<double>(f)};
    for (std::size_t k = 0; k < f; ++k) {
      const bool high = (i >> (f - 1 - k)) & 1U;
      p.coords[k] = high ? 1.0 : -1.0;
    }
    design.points.push_back(std::move(p));
  }
  design.points.push_back({PointRole::center, std::vector<double>(f, 0.0)});
  for (std::size_t k = 0; k < f; ++k) {
    for (double sign : {-1.0, 1.0}) {
      DesignPoint p{PointRole::star, std::vector<double>(f, 0.0)};
      p.coords[k] = sign * space.alpha;
      design.points.push_back(std::move(p));
    }
  }
  return design;
}

inline std::vector<double> to_physical(const FactorSpace& space, std::span<const double> normalized) {
  if (normalized.size() != space.size()) {
    throw ValidationError("expected " + std::to_string(space.size()) + " normalized coordinates, got " +
                          std::to_string(normalized.size()));
  }
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = space.factors[i].center + normalized[i] * space.factors[i].half_range;
  }
  return out;
}

inline std::vector<double> to_normalized(const FactorSpace& space, std::span<const double> physical) {
  if (physical.size() != space.size()) {
    throw ValidationError("expected " + std::to_string(space.size()) + " physical coordinates, got " +
                          std::to_string(physical.size()));
  }
  std::vector<double> out(physical.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& f = space.factors[i];
    if (!(f.half_range > 0.0)) throw ValidationError("factor '" + f.name + "' has non-positive half range");
    out[i] = (physical[i] - f.center) / f.half_range;
  }
  return out;
}

}  // namespace earforge
