#pragma once

// Blank contours, cup-rim profiles and the scalar defect metrics built on them.
//
// Angles are radians measured from the rolling direction. Full-turn series are
// stored on a uniform grid anchored at theta = 0; the modal analysis only ever
// looks at the first quarter [0, pi/2] because blank and defects are symmetric
// about theta = 0 and theta = pi/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "earforge/errors.hpp"

namespace earforge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Samples per full contour. 36 of them land in the first quarter.
inline constexpr std::size_t kDefaultContourPoints = 144;
/// Nodes of the quarter-turn modal model (35 equal elements).
inline constexpr std::size_t kQuarterNodes = 36;

struct PolarSample {
  double theta;
  double value;

  friend bool operator==(const PolarSample&, const PolarSample&) = default;
};

/// DCT blank description: nominal diameter plus two- and four-lobe amplitudes, mm.
struct BlankSpec {
  double diameter = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  double radius(double theta) const {
    return 0.5 * diameter + a1 * std::cos(2.0 * theta) + a2 * std::cos(4.0 * theta);
  }

  /// Smallest radius over a full turn and the angle in [0, pi/2] where it occurs.
  ///
  /// With u = cos(2 theta) the radius is the parabola D/2 + A1 u + A2 (2u^2 - 1)
  /// on u in [-1, 1], so the minimum is at an endpoint or at the vertex.
  std::pair<double, double> min_radius() const {
    auto at = [this](double u) { return 0.5 * diameter + a1 * u + a2 * (2.0 * u * u - 1.0); };
    double best_u = 1.0;
    double best = at(1.0);
    if (at(-1.0) < best) {
      best_u = -1.0;
      best = at(-1.0);
    }
    if (a2 > 0.0) {
      const double vertex = -a1 / (4.0 * a2);
      if (vertex > -1.0 && vertex < 1.0 && at(vertex) < best) {
        best_u = vertex;
        best = at(vertex);
      }
    }
    return {best, 0.5 * std::acos(best_u)};
  }

  void validate() const {
    if (!std::isfinite(diameter) || !std::isfinite(a1) || !std::isfinite(a2)) {
      throw ValidationError("blank parameters must be finite");
    }
    if (diameter <= 0.0) {
      throw InvalidBlankError("blank diameter must be positive, got " + std::to_string(diameter), 0.0);
    }
    const auto [r, theta] = min_radius();
    if (r <= 0.0) {
      std::ostringstream os;
      os << "invalid blank (D=" << diameter << ", A1=" << a1 << ", A2=" << a2
         << "): radius " << r << " mm at theta=" << theta << " rad is not positive";
      throw InvalidBlankError(os.str(), theta);
    }
  }

  friend bool operator==(const BlankSpec&, const BlankSpec&) = default;
};

/// Finished cup: flat bottom of diameter `cup_diameter`, wall of height `cup_height`, mm.
struct CupSpec {
  double cup_diameter = 0.0;
  double cup_height = 0.0;

  void validate() const {
    if (!(cup_diameter > 0.0) || !(cup_height >= 0.0) || !std::isfinite(cup_diameter + cup_height)) {
      throw ValidationError("cup diameter must be positive and height non-negative");
    }
  }
};

namespace detail {

inline double uniform_theta(std::size_t k, std::size_t n) {
  return kTwoPi * static_cast<double>(k) / static_cast<double>(n);
}

inline void check_uniform_grid(std::span<const PolarSample> samples, const char* what) {
  const std::size_t n = samples.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = uniform_theta(k, n);
    if (!std::isfinite(samples[k].theta) || std::abs(samples[k].theta - expected) > 1e-9) {
      std::ostringstream os;
      os << what << ": sample " << k << " has theta " << samples[k].theta
         << ", expected uniform grid value " << expected;
      throw ValidationError(os.str());
    }
    if (!std::isfinite(samples[k].value)) {
      throw ValidationError(std::string(what) + ": non-finite value at sample " + std::to_string(k));
    }
  }
}

}  // namespace detail

/// Values sampled on the uniform full-turn grid theta_k = 2 pi k / n.
class UniformPolarSeries {
 public:
  const std::vector<PolarSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double spacing() const noexcept { return kTwoPi / static_cast<double>(samples_.size()); }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.value);
    return out;
  }

  /// Periodic linear interpolation. Exact at sample angles.
  double value_at(double theta) const {
    const double n = static_cast<double>(samples_.size());
    double pos = std::fmod(theta / kTwoPi, 1.0) * n;
    if (pos < 0.0) pos += n;
    auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    i %= samples_.size();
    const std::size_t j = (i + 1) % samples_.size();
    return samples_[i].value + frac * (samples_[j].value - samples_[i].value);
  }

  friend bool operator==(const UniformPolarSeries&, const UniformPolarSeries&) = default;

 protected:
  UniformPolarSeries() = default;
  explicit UniformPolarSeries(std::vector<PolarSample> samples) : samples_(std::move(samples)) {}

  std::vector<PolarSample> samples_;
};

/// Blank outline, value = radius in mm.
class ClosedContour : public UniformPolarSeries {
 public:
  static ClosedContour from_samples(std::vector<PolarSample> samples) {
    const std::size_t n = samples.size();
    if (n < 8 || n % 4 != 0) {
      throw ValidationError("closed contour needs at least 8 samples and a multiple of 4, got " +
                            std::to_string(n));
    }
    detail::check_uniform_grid(samples, "closed contour");
    for (const auto& s : samples) {
      if (s.value <= 0.0) {
        throw InvalidBlankError("closed contour has non-positive radius at theta=" + std::to_string(s.theta),
                                s.theta);
      }
    }
    return ClosedContour(std::move(samples));
  }

 private:
  using UniformPolarSeries::UniformPolarSeries;
};

/// Cup-rim height around the circumference, value = height in mm.
class ContourProfile : public UniformPolarSeries {
 public:
  static ContourProfile from_samples(std::vector<PolarSample> samples) {
    if (samples.size() < 8) {
      throw InsufficientDataError("profile needs at least 8 samples, got " + std::to_string(samples.size()));
    }
    detail::check_uniform_grid(samples, "contour profile");
    return ContourProfile(std::move(samples));
  }

  static ContourProfile from_heights(std::span<const double> heights) {
    std::vector<PolarSample> samples;
    samples.reserve(heights.size());
    for (std::size_t k = 0; k < heights.size(); ++k) {
      samples.push_back({detail::uniform_theta(k, heights.size()), heights[k]});
    }
    return from_samples(std::move(samples));
  }

 private:
  using UniformPolarSeries::UniformPolarSeries;
};

/// Per-node clearance between a rim profile and the target height, mm.
struct DeviationVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  void validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw ValidationError("deviation vector entry " + std::to_string(i) + " is not finite");
      }
    }
  }

  friend bool operator==(const DeviationVector&, const DeviationVector&) = default;
};

inline ClosedContour blank_contour(const BlankSpec& spec, std::size_t n_points = kDefaultContourPoints) {
  spec.validate();
  if (n_points < 8 || n_points % 4 != 0) {
    throw ValidationError("n_points must be >= 8 and a multiple of 4, got " + std::to_string(n_points));
  }
  std::vector<PolarSample> samples;
  samples.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double theta = detail::uniform_theta(k, n_points);
    samples.push_back({theta, spec.radius(theta)});
  }
  return ClosedContour::from_samples(std::move(samples));
}

/// Blank diameter giving the same sheet area as the finished cup (constant
/// thickness): pi D0^2 / 4 = pi d^2 / 4 + pi d h.
inline double initial_blank_diameter(const CupSpec& cup) {
  cup.validate();
  const double d = cup.cup_diameter;
  return std::sqrt(d * d + 4.0 * d * cup.cup_height);
}

/// Peak-to-peak rim height.
inline double ear_amplitude(const ContourProfile& profile) {
  const auto& s = profile.samples();
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end(), [](const PolarSample& a, const PolarSample& b) {
    return a.value < b.value;
  });
  return hi->value - lo->value;
}

/// Quarter-turn deviation (height - target) at `n_nodes` equally spaced nodes
/// over [0, pi/2]. Uses exact decimation when the grid allows it, periodic
/// linear interpolation otherwise.
inline DeviationVector deviation_vector(const ContourProfile& profile, double target_height,
                                        std::size_t n_nodes = kQuarterNodes) {
  if (!(target_height > 0.0)) throw ValidationError("target height must be positive");
  if (n_nodes < 2) throw ValidationError("deviation vector needs at least 2 nodes");

  const std::size_t n = profile.size();
  const std::size_t elements = n_nodes - 1;
  DeviationVector out;
  out.values.reserve(n_nodes);
  if (n % 4 == 0 && (n / 4) % elements == 0) {
    const std::size_t stride = (n / 4) / elements;
    for (std::size_t k = 0; k < n_nodes; ++k) {
      out.values.push_back(profile.samples()[k * stride].value - target_height);
    }
  } else {
    for (std::size_t k = 0; k < n_nodes; ++k) {
      const double theta = 0.5 * kPi * static_cast<double>(k) / static_cast<double>(elements);
      out.values.push_back(profile.value_at(theta) - target_height);
    }
  }
  return out;
}

}  // namespace earforge
