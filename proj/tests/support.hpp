#pragma once

// Test-only oracles and helpers. Nothing here calls into the library's solvers.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "earforge/csv.hpp"
#include "earforge/doe.hpp"
#include "earforge/rsm.hpp"

namespace earforge::fixtures {

using Matrix = std::vector<std::vector<double>>;

/// Dense solve with partial pivoting. Throws on a zero pivot.
inline std::vector<double> gauss_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-300) throw std::runtime_error("oracle: singular system");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Weighted least squares through the normal equations (X^T W X) b = X^T W y.
/// `columns[k]` is the k-th regressor sampled at every row; empty weights mean W = I.
inline std::vector<double> normal_equations(const Matrix& columns, const std::vector<double>& y,
                                            const std::vector<double>& weights = {}) {
  const std::size_t p = columns.size();
  Matrix ata(p, std::vector<double>(p, 0.0));
  std::vector<double> aty(p, 0.0);
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double w = weights.empty() ? 1.0 : weights[r];
    for (std::size_t i = 0; i < p; ++i) {
      aty[i] += w * columns[i][r] * y[r];
      for (std::size_t j = 0; j < p; ++j) ata[i][j] += w * columns[i][r] * columns[j][r];
    }
  }
  return gauss_solve(ata, aty);
}

/// Quadratic regressors written out longhand for three factors, in the
/// library's term order: 1, x1, x2, x3, x1x2, x1x3, x2x3, x1^2, x2^2, x3^2.
inline std::vector<double> quadratic_row3(const std::vector<double>& x) {
  return {1.0, x[0], x[1], x[2], x[0] * x[1], x[0] * x[2], x[1] * x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2]};
}

inline std::vector<double> quadratic_oracle_fit(const std::vector<std::vector<double>>& points,
                                                const std::vector<double>& y) {
  Matrix columns(10, std::vector<double>(points.size()));
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto row = quadratic_row3(points[r]);
    for (std::size_t k = 0; k < 10; ++k) columns[k][r] = row[k];
  }
  return normal_equations(columns, y);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

/// Random quadratic in `factors` variables with coefficients in [-scale, scale].
inline QuadraticModel random_model(Rng& rng, std::size_t factors, const std::string& response, double scale = 1.0) {
  QuadraticModel m;
  m.response = response;
  m.factor_names = default_factor_names(factors);
  m.coefficients = rng.vector(quadratic_term_count(factors), -scale, scale);
  return m;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "earforge-test-XXXXXX").string();
    if (::mkdtemp(templ.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = templ;
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Design points and L1..L5 columns of the reference 15-run experiment.
struct ReferenceRuns {
  std::vector<std::vector<double>> physical;
  std::vector<std::vector<double>> responses;
};

inline ReferenceRuns load_reference_runs() {
  const auto lines = csv::read_lines(std::filesystem::path(EARFORGE_TEST_DATA) / "reference_runs.csv");
  ReferenceRuns out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = csv::split(lines[i]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(csv::parse_number(cells[c], "reference_runs.csv"));
    out.physical.emplace_back(row.begin(), row.begin() + 3);
    out.responses.emplace_back(row.begin() + 3, row.end());
  }
  return out;
}

inline ResponseTable reference_table() {
  const auto runs = load_reference_runs();
  ResponseTable t;
  t.names = {"L1", "L2", "L3", "L4", "L5"};
  t.rows = runs.responses;
  return t;
}

/// Coded design matching the reference runs row for row (star levels to 0.005 mm).
inline DesignMatrix reference_design() { return ccd_design(FactorSpace::blank_default()); }

}  // namespace earforge::fixtures
