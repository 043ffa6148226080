#pragma once

// Second-degree response surfaces in normalized factor units:
//
//   y = a0 + sum a_i x_i + sum_{i<j} a_ij x_i x_j + sum a_ii x_i^2
//
// Terms are ordered constant, linear, interactions (i<j, lexicographic), pure
// quadratics, so three factors give [1, X1, X2, X3, X1X2, X1X3, X2X3, X1^2, X2^2, X3^2].

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "earforge/doe.hpp"
#include "earforge/errors.hpp"

namespace earforge {

enum class TermKind { constant, linear, interaction, quadratic };

struct Term {
  TermKind kind = TermKind::constant;
  std::size_t i = 0;
  std::size_t j = 0;
};

inline std::size_t quadratic_term_count(std::size_t factors) {
  return 1 + factors + factors * (factors - 1) / 2 + factors;
}

inline std::vector<Term> quadratic_terms(std::size_t factors) {
  std::vector<Term> terms;
  terms.reserve(quadratic_term_count(factors));
  terms.push_back({TermKind::constant, 0, 0});
  for (std::size_t i = 0; i < factors; ++i) terms.push_back({TermKind::linear, i, i});
  for (std::size_t i = 0; i < factors; ++i)
    for (std::size_t j = i + 1; j < factors; ++j) terms.push_back({TermKind::interaction, i, j});
  for (std::size_t i = 0; i < factors; ++i) terms.push_back({TermKind::quadratic, i, i});
  return terms;
}

inline std::string term_name(const Term& t, std::span<const std::string> factor_names) {
  switch (t.kind) {
    case TermKind::constant: return "1";
    case TermKind::linear: return factor_names[t.i];
    case TermKind::interaction: return factor_names[t.i] + "*" + factor_names[t.j];
    case TermKind::quadratic: return factor_names[t.i] + "^2";
  }
  return "?";
}

inline double term_value(const Term& t, std::span<const double> x) {
  switch (t.kind) {
    case TermKind::constant: return 1.0;
    case TermKind::linear: return x[t.i];
    case TermKind::interaction: return x[t.i] * x[t.j];
    case TermKind::quadratic: return x[t.i] * x[t.i];
  }
  return 0.0;
}

inline std::vector<std::string> default_factor_names(std::size_t factors) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < factors; ++i) names.push_back("X" + std::to_string(i + 1));
  return names;
}

struct FitDiagnostics {
  double residual_rms = 0.0;
  double max_abs_residual = 0.0;

  friend bool operator==(const FitDiagnostics&, const FitDiagnostics&) = default;
};

struct QuadraticModel {
  std::string response;
  std::vector<std::string> factor_names;
  /// One coefficient per quadratic_terms(factor_count()) entry.
  std::vector<double> coefficients;
  FitDiagnostics diagnostics;

  std::size_t factor_count() const noexcept { return factor_names.size(); }

  std::vector<std::string> term_names() const {
    std::vector<std::string> out;
    for (const auto& t : quadratic_terms(factor_count())) out.push_back(term_name(t, factor_names));
    return out;
  }

  double coefficient(std::string_view term) const {
    const auto names = term_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == term) return coefficients[k];
    }
    throw ValidationError("model '" + response + "' has no term '" + std::string(term) + "'");
  }

  void validate() const {
    if (coefficients.size() != quadratic_term_count(factor_count())) {
      throw ValidationError("model '" + response + "' has " + std::to_string(coefficients.size()) +
                            " coefficients, expected " + std::to_string(quadratic_term_count(factor_count())));
    }
    if (diagnostics.residual_rms < 0.0 || diagnostics.max_abs_residual < 0.0) {
      throw ValidationError("model '" + response + "' has negative fit diagnostics");
    }
  }

  friend bool operator==(const QuadraticModel&, const QuadraticModel&) = default;
};

/// Observed responses, one row per design point in design order.
struct ResponseTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::size_t k) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(k));
    return out;
  }

  void validate(std::size_t expected_rows) const {
    if (rows.size() != expected_rows) {
      throw ValidationError("response table has " + std::to_string(rows.size()) + " rows, design has " +
                            std::to_string(expected_rows) + " points");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != names.size()) {
        throw ValidationError("response row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                              " values, expected " + std::to_string(names.size()));
      }
      for (double v : rows[r]) {
        if (!std::isfinite(v)) throw ValidationError("response row " + std::to_string(r + 1) + " has a missing value");
      }
    }
  }
};

inline double predict(const QuadraticModel& model, std::span<const double> x) {
  if (x.size() != model.factor_count()) {
    throw ValidationError("point has " + std::to_string(x.size()) + " coordinates, model expects " +
                          std::to_string(model.factor_count()));
  }
  const auto terms = quadratic_terms(model.factor_count());
  double y = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) y += model.coefficients[k] * term_value(terms[k], x);
  return y;
}

/// Analytic gradient with respect to the normalized factors.
inline std::vector<double> gradient(const QuadraticModel& model, std::span<const double> x) {
  const auto terms = quadratic_terms(model.factor_count());
  std::vector<double> g(model.factor_count(), 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    const double a = model.coefficients[k];
    switch (t.kind) {
      case TermKind::constant: break;
      case TermKind::linear: g[t.i] += a; break;
      case TermKind::interaction:
        g[t.i] += a * x[t.j];
        g[t.j] += a * x[t.i];
        break;
      case TermKind::quadratic: g[t.i] += 2.0 * a * x[t.i]; break;
    }
  }
  return g;
}

/// Ordinary least squares through a column-pivoted Householder QR.
inline QuadraticModel fit_quadratic(const DesignMatrix& design, std::span<const double> y, std::string response,
                                    std::vector<std::string> factor_names = {}) {
  const std::size_t f = design.factor_count;
  if (factor_names.empty()) factor_names = default_factor_names(f);
  if (factor_names.size() != f) throw ValidationError("factor name count does not match the design");
  const auto terms = quadratic_terms(f);
  const std::size_t p = terms.size();
  const std::size_t n = design.size();
  if (n < p) {
    throw ValidationError("quadratic model in " + std::to_string(f) + " factors needs at least " + std::to_string(p) +
                          " design points, got " + std::to_string(n));
  }
  if (y.size() != n) throw ValidationError("response count does not match design size");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (design.points[r].coords.size() != f) throw ValidationError("design point has wrong dimension");
    for (std::size_t k = 0; k < p; ++k) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = term_value(terms[k], design.points[r].coords);
    }
    if (!std::isfinite(y[r])) throw ValidationError("response '" + response + "' has a non-finite value");
    rhs(static_cast<Eigen::Index>(r)) = y[r];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (static_cast<std::size_t>(qr.rank()) < p) {
    std::vector<std::string> dependent;
    std::string list;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < static_cast<Eigen::Index>(p); ++k) {
      dependent.push_back(term_name(terms[static_cast<std::size_t>(perm(k))], factor_names));
      list += (list.empty() ? "" : ", ") + dependent.back();
    }
    throw SingularDesignError("singular design for quadratic model (rank " + std::to_string(qr.rank()) + " of " +
                                  std::to_string(p) + "); dependent columns: " + list,
                              std::move(dependent));
  }
  const Eigen::VectorXd beta = qr.solve(rhs);

  QuadraticModel model;
  model.response = std::move(response);
  model.factor_names = std::move(factor_names);
  model.coefficients.assign(beta.data(), beta.data() + beta.size());

  double sum_sq = 0.0;
  double max_abs = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double e = y[r] - predict(model, design.points[r].coords);
    sum_sq += e * e;
    max_abs = std::max(max_abs, std::abs(e));
  }
  model.diagnostics = {std::sqrt(sum_sq / static_cast<double>(n)), max_abs};
  return model;
}

inline std::vector<QuadraticModel> fit_quadratic(const DesignMatrix& design, const ResponseTable& responses,
                                                 const std::vector<std::string>& factor_names = {}) {
  responses.validate(design.size());
  std::vector<QuadraticModel> models;
  for (std::size_t k = 0; k < responses.names.size(); ++k) {
    models.push_back(fit_quadratic(design, responses.column(k), responses.names[k], factor_names));
  }
  return models;
}

struct Influence {
  std::string term;
  TermKind kind = TermKind::linear;
  double magnitude = 0.0;
};

/// Non-constant terms by descending |coefficient|; ties keep term order.
inline std::vector<Influence> rank_influence(const QuadraticModel& model) {
  model.validate();
  const auto terms = quadratic_terms(model.factor_count());
  std::vector<Influence> out;
  for (std::size_t k = 1; k < terms.size(); ++k) {
    out.push_back({term_name(terms[k], model.factor_names), terms[k].kind, std::abs(model.coefficients[k])});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Influence& a, const Influence& b) { return a.magnitude > b.magnitude; });
  return out;
}

/// Factor whose linear term dominates the model.
inline std::string dominant_linear_factor(const QuadraticModel& model) {
  for (const auto& inf : rank_influence(model)) {
    if (inf.kind == TermKind::linear) return inf.term;
  }
  throw ValidationError("model has no linear terms");
}

}  // namespace earforge
