#pragma once

// Process plants turn a blank into a rim-height profile. The analytic surrogate
// stands in for a drawing simulation; IngestPlant reads profiles produced
// elsewhere (FE exports, CMM point clouds).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "earforge/csv.hpp"
#include "earforge/doe.hpp"
#include "earforge/errors.hpp"
#include "earforge/geometry.hpp"
#include "earforge/modal.hpp"
#include "earforge/rsm.hpp"

namespace earforge {

/// Lankford coefficients at 0, 45 and 90 degrees to the rolling direction.
struct MaterialAnisotropy {
  double r0 = 2.09;
  double r45 = 1.56;
  double r90 = 2.72;

  /// Planar anisotropy (r0 - 2 r45 + r90) / 2.
  double delta_r() const noexcept { return 0.5 * (r0 - 2.0 * r45 + r90); }

  void validate() const {
    if (!(r0 > 0.0) || !(r45 > 0.0) || !(r90 > 0.0)) throw ValidationError("Lankford coefficients must be positive");
  }

  /// DC05 deep-drawing steel, delta_r = 0.845.
  static MaterialAnisotropy dc05() { return {}; }
  static MaterialAnisotropy isotropic(double r = 2.0) { return {r, r, r}; }

  friend bool operator==(const MaterialAnisotropy&, const MaterialAnisotropy&) = default;
};

/// Constants of the analytic rim model
///
///   h(t) = H0 + k_d dD + k_q dD^2 + g2 A1 cos2t + (g4 A2 + c_ear dr) cos4t
///          + kappa4_6 A2 cos6t + c8 cos8t,        dD = D - ref_diameter.
///
/// Defaults reproduce the DC05 reference cup: 34.69 mm mean height and a
/// 1.72 mm ear amplitude for the circular 116.63 mm blank, and a four-lobe
/// blank correction A2 = -0.807 mm that cancels the cos4t ears.
struct SurrogateParams {
  double ref_diameter = 116.63;
  double base_height = 34.69;
  double k_d = 0.886;
  double k_q = 0.03;
  double g2 = 1.0;
  double g4 = 0.86 / 0.807;
  double c_ear = 0.86 / 0.845;
  double kappa4_6 = -9.34e-4;
  double c8 = -0.05;

  void validate() const {
    if (!(ref_diameter > 0.0) || !(base_height > 0.0)) {
      throw ValidationError("surrogate reference diameter and base height must be positive");
    }
    for (double v : {k_d, k_q, g2, g4, c_ear, kappa4_6, c8}) {
      if (!std::isfinite(v)) throw ValidationError("surrogate constants must be finite");
    }
  }

  /// Six-lobe coupling fitted to the star-point spread of the reference
  /// L4 responses (0.14 per mm) instead of the optimum-run value.
  static SurrogateParams star_spread_calibration() {
    SurrogateParams p;
    p.kappa4_6 = 0.14;
    return p;
  }

  friend bool operator==(const SurrogateParams&, const SurrogateParams&) = default;
};

inline ContourProfile simulate(const BlankSpec& blank, const MaterialAnisotropy& material,
                               const SurrogateParams& params, std::size_t n_points = kDefaultContourPoints) {
  blank.validate();
  material.validate();
  params.validate();
  if (n_points < 8 || n_points % 4 != 0) {
    throw ValidationError("n_points must be >= 8 and a multiple of 4, got " + std::to_string(n_points));
  }
  const double dd = blank.diameter - params.ref_diameter;
  const double mean = params.base_height + params.k_d * dd + params.k_q * dd * dd;
  const double lobe2 = params.g2 * blank.a1;
  const double lobe4 = params.g4 * blank.a2 + params.c_ear * material.delta_r();
  const double lobe6 = params.kappa4_6 * blank.a2;
  const double lobe8 = params.c8;

  std::vector<double> heights(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = detail::uniform_theta(k, n_points);
    heights[k] = mean + lobe2 * std::cos(2.0 * t) + lobe4 * std::cos(4.0 * t) + lobe6 * std::cos(6.0 * t) +
                 lobe8 * std::cos(8.0 * t);
  }
  return ContourProfile::from_heights(heights);
}

namespace detail {

/// Sorts by angle, rejects duplicates and resamples onto the uniform grid with
/// periodic linear interpolation. Exact where a grid angle matches a sample.
inline ContourProfile resample_uniform(std::vector<PolarSample> samples, std::size_t n_points) {
  if (samples.size() < 8) {
    throw InsufficientDataError("need at least 8 rim points, got " + std::to_string(samples.size()));
  }
  for (auto& s : samples) {
    if (!std::isfinite(s.theta) || !std::isfinite(s.value)) throw ValidationError("rim data contains non-finite values");
    s.theta = std::fmod(s.theta, kTwoPi);
    if (s.theta < 0.0) s.theta += kTwoPi;
    if (s.theta >= kTwoPi) s.theta = 0.0;
  }
  std::sort(samples.begin(), samples.end(), [](const PolarSample& a, const PolarSample& b) { return a.theta < b.theta; });

  std::vector<double> duplicates;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PolarSample& a = samples[i];
    const PolarSample& b = samples[(i + 1) % samples.size()];
    const double gap = i + 1 < samples.size() ? b.theta - a.theta : b.theta + kTwoPi - a.theta;
    if (gap <= 1e-12) duplicates.push_back(a.theta);
  }
  if (!duplicates.empty()) {
    std::ostringstream os;
    os << "ambiguous rim data, duplicate angles:";
    for (double t : duplicates) os << ' ' << t;
    throw AmbiguityError(os.str(), std::move(duplicates));
  }

  std::vector<double> heights(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = uniform_theta(k, n_points);
    const auto hi = std::lower_bound(samples.begin(), samples.end(), t,
                                     [](const PolarSample& s, double v) { return s.theta < v; });
    if (hi != samples.end() && hi->theta == t) {
      heights[k] = hi->value;
      continue;
    }
    const PolarSample& after = hi == samples.end() ? samples.front() : *hi;
    const PolarSample& before = hi == samples.begin() ? samples.back() : *(hi - 1);
    double t0 = before.theta;
    double t1 = after.theta;
    double tt = t;
    if (t1 <= t0) t1 += kTwoPi;
    if (tt < t0) tt += kTwoPi;
    heights[k] = before.value + (tt - t0) / (t1 - t0) * (after.value - before.value);
  }
  return ContourProfile::from_heights(heights);
}

}  // namespace detail

/// Reads a contour CSV (`theta_rad,value_mm`) or a rim point cloud
/// (`x_mm,y_mm,z_mm`) and returns it on the uniform `n_points` grid.
/// Point clouds are unrolled about the vertical axis through their XY centroid;
/// height is the raw z.
inline ContourProfile ingest_profile(const std::filesystem::path& path,
                                     std::size_t n_points = kDefaultContourPoints) {
  if (n_points < 8 || n_points % 4 != 0) {
    throw ValidationError("n_points must be >= 8 and a multiple of 4, got " + std::to_string(n_points));
  }
  const std::string header = csv::header_of(path);
  if (header == csv::kContourHeader) return detail::resample_uniform(csv::read_polar_samples(path), n_points);
  if (header != csv::kPointCloudHeader) {
    throw ValidationError("'" + path.string() + "': unrecognised header '" + header + "'");
  }
  const auto cloud = csv::read_point_cloud(path);
  if (cloud.size() < 8) {
    throw InsufficientDataError("'" + path.string() + "' has " + std::to_string(cloud.size()) +
                                " points, need at least 8");
  }
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : cloud) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(cloud.size());
  cy /= static_cast<double>(cloud.size());
  std::vector<PolarSample> samples;
  samples.reserve(cloud.size());
  for (const auto& p : cloud) samples.push_back({std::atan2(p.y - cy, p.x - cx), p.z});
  return detail::resample_uniform(std::move(samples), n_points);
}

struct Provenance {
  enum class Kind { surrogate, ingested };
  Kind kind = Kind::surrogate;
  std::filesystem::path path;

  std::string label() const { return kind == Kind::surrogate ? "surrogate" : "ingested(" + path.string() + ")"; }
};

struct PlantRun {
  BlankSpec blank;
  MaterialAnisotropy material;
  ContourProfile profile;
  Provenance provenance;
};

class Plant {
 public:
  virtual ~Plant() = default;
  /// `run_id` names the run ("run_01", "optimum", ...); file-backed plants read `<run_id>.csv`.
  virtual PlantRun run(const BlankSpec& blank, std::string_view run_id) const = 0;
};

class SurrogatePlant final : public Plant {
 public:
  SurrogatePlant(MaterialAnisotropy material, SurrogateParams params, std::size_t n_points = kDefaultContourPoints)
      : material_(material), params_(params), n_points_(n_points) {}

  PlantRun run(const BlankSpec& blank, std::string_view) const override {
    return {blank, material_, simulate(blank, material_, params_, n_points_), {}};
  }

 private:
  MaterialAnisotropy material_;
  SurrogateParams params_;
  std::size_t n_points_;
};

/// "run_01" for design row 1.
inline std::string run_id(std::size_t run_number) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%02zu", run_number);
  return buf;
}

/// Reads `<run_id>.csv` from a directory.
class IngestPlant final : public Plant {
 public:
  IngestPlant(std::filesystem::path directory, MaterialAnisotropy material,
              std::size_t n_points = kDefaultContourPoints)
      : directory_(std::move(directory)), material_(material), n_points_(n_points) {}

  PlantRun run(const BlankSpec& blank, std::string_view id) const override {
    const auto path = directory_ / (std::string(id) + ".csv");
    if (!std::filesystem::exists(path)) throw ValidationError("missing external result '" + path.string() + "'");
    return {blank, material_, ingest_profile(path, n_points_), {Provenance::Kind::ingested, path}};
  }

 private:
  std::filesystem::path directory_;
  MaterialAnisotropy material_;
  std::size_t n_points_;
};

struct Decomposition {
  double target_height = 35.0;
  std::size_t n_modes = kDefaultModeCount;
};

struct DesignRuns {
  ResponseTable responses;
  std::vector<PlantRun> runs;
  std::vector<ModalCoordinates> coordinates;
};

inline std::vector<std::string> mode_names(std::size_t n_modes) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n_modes; ++i) names.push_back("L" + std::to_string(i));
  return names;
}

inline BlankSpec blank_from_physical(std::span<const double> physical) {
  if (physical.size() != 3) throw ValidationError("blank factor space must be (D, A1, A2)");
  return {physical[0], physical[1], physical[2]};
}

/// Runs every design point through the plant and decomposes the rim, keeping
/// design order.
inline DesignRuns run_design_detailed(const DesignMatrix& design, const FactorSpace& space, const Plant& plant,
                                      const ModalBasis& basis, const Decomposition& settings) {
  if (design.factor_count != 3 || space.size() != 3) {
    throw ValidationError("plant runs need a 3-factor (D, A1, A2) design");
  }
  DesignRuns out;
  out.responses.names = mode_names(settings.n_modes);
  for (std::size_t r = 0; r < design.size(); ++r) {
    const BlankSpec blank = blank_from_physical(to_physical(space, design.points[r].coords));
    PlantRun run = plant.run(blank, run_id(r + 1));
    ModalCoordinates coords = decompose(run.profile, settings.target_height, basis, settings.n_modes);
    out.responses.rows.push_back(coords.lambda);
    out.runs.push_back(std::move(run));
    out.coordinates.push_back(std::move(coords));
  }
  return out;
}

inline ResponseTable run_design(const DesignMatrix& design, const FactorSpace& space,
                                const MaterialAnisotropy& material, const SurrogateParams& params,
                                const Decomposition& settings = {}) {
  const ModalBasis basis = build_modal_basis(kQuarterNodes, std::max<std::size_t>(settings.n_modes, 2));
  return run_design_detailed(design, space, SurrogatePlant(material, params), basis, settings).responses;
}

}  // namespace earforge
