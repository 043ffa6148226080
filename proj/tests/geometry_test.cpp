#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "earforge/geometry.hpp"
#include "support.hpp"

using namespace earforge;

namespace {

ContourProfile profile_of(std::size_t n, double (*h)(double)) {
  std::vector<double> heights(n);
  for (std::size_t k = 0; k < n; ++k) heights[k] = h(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  return ContourProfile::from_heights(heights);
}

}  // namespace

TEST(BlankContour, CircleHasConstantRadius) {
  const auto c = blank_contour({117.0, 0.0, 0.0}, 16);
  ASSERT_EQ(c.size(), 16u);
  for (const auto& s : c.samples()) EXPECT_DOUBLE_EQ(s.value, 58.5);
}

TEST(BlankContour, TwoLobeAmplitudeAtAxes) {
  const BlankSpec b{117.0, 1.5, 0.0};
  const auto c = blank_contour(b, 16);
  EXPECT_NEAR(c.samples()[0].value, 60.0, 1e-12);
  EXPECT_NEAR(c.samples()[4].value, 57.0, 1e-12);  // theta = pi/2
}

TEST(BlankContour, NegativeRadiusIsRejectedWithAngle) {
  try {
    blank_contour({4.0, 0.0, 2.5}, 16);
    FAIL() << "expected InvalidBlankError";
  } catch (const InvalidBlankError& e) {
    EXPECT_NEAR(e.theta(), kPi / 4.0, 1e-12);
    EXPECT_NE(std::string(e.what()).find("-0.5"), std::string::npos);
  }
}

TEST(BlankContour, RejectsBadPointCounts) {
  EXPECT_THROW(blank_contour({117.0, 0.0, 0.0}, 4), ValidationError);
  EXPECT_THROW(blank_contour({117.0, 0.0, 0.0}, 18), ValidationError);
  EXPECT_THROW(blank_contour({-1.0, 0.0, 0.0}, 16), InvalidBlankError);
}

TEST(BlankContour, MinimumRadiusFindsInteriorVertex) {
  // Radius 10 + 1 cos2t + 2 cos4t dips below its axis values between them.
  const BlankSpec b{20.0, 1.0, 2.0};
  const auto [r, theta] = b.min_radius();
  double brute = 1e9;
  for (int i = 0; i <= 200000; ++i) brute = std::min(brute, b.radius(kPi * i / 200000.0));
  EXPECT_NEAR(r, brute, 1e-9);
  EXPECT_NEAR(b.radius(theta), r, 1e-12);
}

TEST(BlankContour, MirrorSymmetricAtSamples) {
  fixtures::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BlankSpec b{rng.uniform(100.0, 130.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const std::size_t n = 8 * (1 + static_cast<std::size_t>(rng.uniform(0.0, 20.0)));
    const auto c = blank_contour(b, n);
    const auto& s = c.samples();
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(s[k].value, s[(n - k) % n].value, 1e-12);          // theta -> -theta
      EXPECT_NEAR(s[k].value, s[(n / 2 + n - k) % n].value, 1e-12);  // theta -> pi - theta
    }
  }
}

TEST(InitialBlankDiameter, ReferenceCup) {
  const double d0 = initial_blank_diameter({66.03, 35.0});
  EXPECT_NEAR(d0, 116.63, 0.05);
  // Independent check: d0 is the positive root of D^2 - (d^2 + 4 d h) by bisection.
  double lo = 0.0;
  double hi = 500.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid - (66.03 * 66.03 + 4.0 * 66.03 * 35.0) < 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(d0, lo, 1e-9);
}

TEST(InitialBlankDiameter, DirectFormula) {
  EXPECT_NEAR(initial_blank_diameter({10.0, 10.0}), 22.3607, 1e-4);
}

TEST(InitialBlankDiameter, ZeroWallIsTheBottom) {
  EXPECT_DOUBLE_EQ(initial_blank_diameter({50.0, 0.0}), 50.0);
  EXPECT_THROW(initial_blank_diameter({50.0, -1.0}), ValidationError);
  EXPECT_THROW(initial_blank_diameter({0.0, 10.0}), ValidationError);
}

TEST(InitialBlankDiameter, MonotoneInBothDimensions) {
  fixtures::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double d = rng.uniform(1.0, 200.0);
    const double h = rng.uniform(1.0, 100.0);
    const double base = initial_blank_diameter({d, h});
    EXPECT_LT(base, initial_blank_diameter({d * 1.01, h}));
    EXPECT_LT(base, initial_blank_diameter({d, h * 1.01}));
  }
}

TEST(EarAmplitude, FlatRimIsZero) {
  EXPECT_EQ(ear_amplitude(profile_of(144, [](double) { return 35.0; })), 0.0);
}

TEST(EarAmplitude, FourLobeCosine) {
  const auto p = profile_of(144, [](double t) { return 35.0 + 0.86 * std::cos(4.0 * t); });
  EXPECT_NEAR(ear_amplitude(p), 1.72, 1e-12);
}

TEST(EarAmplitude, ShiftInvariantAndScalesAboutMean) {
  fixtures::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = rng.vector(64, 30.0, 40.0);
    const double amp = ear_amplitude(ContourProfile::from_heights(h));
    double mean = 0.0;
    for (double v : h) mean += v / 64.0;
    std::vector<double> shifted = h;
    std::vector<double> scaled = h;
    const double c = rng.uniform(-5.0, 5.0);
    const double s = rng.uniform(0.1, 3.0);
    for (std::size_t k = 0; k < h.size(); ++k) {
      shifted[k] += c;
      scaled[k] = mean + s * (h[k] - mean);
    }
    EXPECT_NEAR(ear_amplitude(ContourProfile::from_heights(shifted)), amp, 1e-9);
    EXPECT_NEAR(ear_amplitude(ContourProfile::from_heights(scaled)), s * amp, 1e-9);
  }
}

TEST(DeviationVector, FlatRimOnTarget) {
  const auto v = deviation_vector(profile_of(144, [](double) { return 35.0; }), 35.0);
  ASSERT_EQ(v.size(), 36u);
  for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(DeviationVector, PureSizeDefect) {
  const auto v = deviation_vector(profile_of(144, [](double) { return 34.0; }), 35.0);
  for (double x : v.values) EXPECT_DOUBLE_EQ(x, -1.0);
}

TEST(DeviationVector, FourLobeExactOnDecimatingGrid) {
  // 1400 samples put every quarter node on a sample.
  const auto v = deviation_vector(profile_of(1400, [](double t) { return 35.0 + std::cos(4.0 * t); }), 35.0);
  for (std::size_t k = 0; k < 36; ++k) {
    EXPECT_NEAR(v.values[k], std::cos(4.0 * (kPi / 2.0) * static_cast<double>(k) / 35.0), 1e-12) << k;
  }
}

TEST(DeviationVector, FourLobeWithinInterpolationBoundOnDefaultGrid) {
  // Linear interpolation error <= (dt^2 / 8) max|h''| = (2 pi / 144)^2 / 8 * 16.
  const double bound = std::pow(kTwoPi / 144.0, 2) / 8.0 * 16.0;
  const auto v = deviation_vector(profile_of(144, [](double t) { return 35.0 + std::cos(4.0 * t); }), 35.0);
  for (std::size_t k = 0; k < 36; ++k) {
    EXPECT_NEAR(v.values[k], std::cos(4.0 * (kPi / 2.0) * static_cast<double>(k) / 35.0), bound) << k;
  }
  EXPECT_LT(bound, 4e-3);
}

TEST(DeviationVector, EntriesStayInsideSourceRange) {
  fixtures::Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = rng.vector(144, 33.0, 37.0);
    const auto p = ContourProfile::from_heights(h);
    const auto v = deviation_vector(p, 35.0);
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    for (double x : v.values) {
      EXPECT_GE(x, *lo - 35.0 - 1e-12);
      EXPECT_LE(x, *hi - 35.0 + 1e-12);
    }
  }
}

TEST(ContourProfile, RejectsNonUniformAndShortInput) {
  std::vector<PolarSample> s;
  for (int k = 0; k < 8; ++k) s.push_back({kTwoPi * k / 8.0, 35.0});
  EXPECT_NO_THROW(ContourProfile::from_samples(s));
  s[3].theta += 0.01;
  EXPECT_THROW(ContourProfile::from_samples(s), ValidationError);
  s.resize(5);
  EXPECT_THROW(ContourProfile::from_samples(s), InsufficientDataError);
  EXPECT_THROW(deviation_vector(profile_of(16, [](double) { return 1.0; }), 0.0), ValidationError);
}

TEST(ContourProfile, PeriodicInterpolationWrapsAround) {
  const auto p = ContourProfile::from_heights(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_NEAR(p.value_at(kTwoPi * 7.5 / 8.0), 3.5, 1e-12);  // halfway between 7 and 0
  EXPECT_NEAR(p.value_at(-kTwoPi / 16.0), 3.5, 1e-12);
}
