#pragma once

// Modal description of rim form defects.
//
// The quarter-turn rim is modelled as a free-free chain of equal elements with
// one transverse degree of freedom per node: lumped mass M (half mass at the
// two end nodes) and second-difference stiffness K. The eigenvectors of
// (K - w^2 M) Q = 0 are the sampled cosines cos((k-1) pi x / l), so mode 1 is
// the rigid "size" mode, mode 2 the two-lobe, mode 3 the four-lobe shape, etc.
// Modes are M-orthogonal; coordinates are taken with the M inner product.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "earforge/errors.hpp"
#include "earforge/geometry.hpp"

namespace earforge {

inline constexpr std::size_t kDefaultModeCount = 5;

struct ModalBasis {
  std::size_t n_nodes = 0;
  /// Unit infinity-norm amplitude vectors, ascending pulsation.
  std::vector<std::vector<double>> modes;
  /// Natural pulsations, rad/s, for a unit-length, unit-stiffness chain.
  std::vector<double> pulsations;
  /// Diagonal of the lumped mass matrix.
  std::vector<double> mass;

  std::size_t mode_count() const noexcept { return modes.size(); }

  double mass_inner(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_nodes; ++j) s += a[j] * mass[j] * b[j];
    return s;
  }
};

struct ModalCoordinates {
  /// L1, L2, ... in mm.
  std::vector<double> lambda;
  /// ||V - sum lambda_i Q_i||_inf / ||V||_inf, 0 for a zero V.
  double residue = 0.0;

  friend bool operator==(const ModalCoordinates&, const ModalCoordinates&) = default;
};

namespace detail {

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Closed-form mode shape cos((k-1) pi j / (n_nodes-1)), k counted from 1.
inline std::vector<double> analytic_mode(std::size_t k, std::size_t n_nodes = kQuarterNodes) {
  if (k < 1) throw ValidationError("mode index starts at 1");
  if (n_nodes < 2) throw ValidationError("analytic mode needs at least 2 nodes");
  std::vector<double> out(n_nodes);
  const double wave = static_cast<double>(k - 1) * kPi / static_cast<double>(n_nodes - 1);
  for (std::size_t j = 0; j < n_nodes; ++j) out[j] = std::cos(wave * static_cast<double>(j));
  return out;
}

inline ModalBasis build_modal_basis(std::size_t n_nodes = kQuarterNodes, std::size_t n_modes = kDefaultModeCount) {
  if (n_modes < 2 || n_modes > n_nodes) {
    throw ValidationError("need 2 <= n_modes <= n_nodes, got n_modes=" + std::to_string(n_modes) +
                          ", n_nodes=" + std::to_string(n_nodes));
  }
  const auto n = static_cast<Eigen::Index>(n_nodes);
  const double h = 1.0 / static_cast<double>(n_nodes - 1);

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    stiffness(e, e) += 1.0 / h;
    stiffness(e + 1, e + 1) += 1.0 / h;
    stiffness(e, e + 1) -= 1.0 / h;
    stiffness(e + 1, e) -= 1.0 / h;
    mass(e, e) += 0.5 * h;
    mass(e + 1, e + 1) += 0.5 * h;
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness, mass);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "generalized eigensolver failed for " << n_nodes << " nodes (Eigen status "
       << static_cast<int>(solver.info()) << ", QR iteration limit "
       << Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations << " sweeps per eigenvalue)";
    throw NumericError(os.str());
  }

  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  // Anything at rounding level is the rigid-body null space.
  const double null_tol = static_cast<double>(n_nodes) * std::numeric_limits<double>::epsilon() * scale;

  ModalBasis basis;
  basis.n_nodes = n_nodes;
  basis.mass.resize(n_nodes);
  for (Eigen::Index j = 0; j < n; ++j) basis.mass[static_cast<std::size_t>(j)] = mass(j, j);

  for (std::size_t m = 0; m < n_modes; ++m) {
    const auto col = static_cast<Eigen::Index>(m);
    const double w2 = eigenvalues(col);
    basis.pulsations.push_back(w2 <= null_tol ? 0.0 : std::sqrt(w2));

    std::vector<double> shape(n_nodes);
    for (Eigen::Index j = 0; j < n; ++j) shape[static_cast<std::size_t>(j)] = solver.eigenvectors()(j, col);
    const double norm = detail::inf_norm(shape);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericError("eigenvector " + std::to_string(m + 1) + " is degenerate");
    }
    // Sign convention: first non-negligible entry (node 0 for cosines) positive.
    double sign = 1.0;
    for (double x : shape) {
      if (std::abs(x) > 1e-8 * norm) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (double& x : shape) x *= sign / norm;
    basis.modes.push_back(std::move(shape));
  }
  return basis;
}

inline ModalCoordinates project(const DeviationVector& v, const ModalBasis& basis,
                                std::size_t n_modes = kDefaultModeCount) {
  if (v.size() != basis.n_nodes) {
    throw ValidationError("deviation vector has " + std::to_string(v.size()) + " nodes, basis expects " +
                          std::to_string(basis.n_nodes));
  }
  if (n_modes > basis.mode_count()) {
    throw ValidationError("requested " + std::to_string(n_modes) + " modes, basis holds " +
                          std::to_string(basis.mode_count()));
  }
  v.validate();

  ModalCoordinates out;
  std::vector<double> remainder = v.values;
  for (std::size_t i = 0; i < n_modes; ++i) {
    const auto& q = basis.modes[i];
    const double lambda = basis.mass_inner(q, v.values) / basis.mass_inner(q, q);
    out.lambda.push_back(lambda);
    for (std::size_t j = 0; j < remainder.size(); ++j) remainder[j] -= lambda * q[j];
  }
  const double vnorm = detail::inf_norm(v.values);
  out.residue = vnorm > 0.0 ? detail::inf_norm(remainder) / vnorm : 0.0;
  return out;
}

inline DeviationVector reconstruct(const ModalCoordinates& coords, const ModalBasis& basis) {
  if (coords.lambda.size() > basis.mode_count()) {
    throw ValidationError("more coordinates than basis modes");
  }
  DeviationVector out{std::vector<double>(basis.n_nodes, 0.0)};
  for (std::size_t i = 0; i < coords.lambda.size(); ++i) {
    for (std::size_t j = 0; j < basis.n_nodes; ++j) out.values[j] += coords.lambda[i] * basis.modes[i][j];
  }
  return out;
}

/// Profile -> quarter deviation -> modal coordinates.
inline ModalCoordinates decompose(const ContourProfile& profile, double target_height, const ModalBasis& basis,
                                  std::size_t n_modes = kDefaultModeCount) {
  return project(deviation_vector(profile, target_height, basis.n_nodes), basis, n_modes);
}

}  // namespace earforge
