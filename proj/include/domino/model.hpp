#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace domino {

using StateVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Asymmetric bistable node: dx/dt = -(x - 1)(x^2 - nu), 0 < nu < 1.
class NodeParams {
 public:
  explicit NodeParams(double nu);

  double nu() const noexcept { return nu_; }

  /// Quiescent attractor, -sqrt(nu).
  double x_quiescent() const noexcept { return -sqrt_nu_; }
  /// Separating saddle, +sqrt(nu).
  double x_saddle() const noexcept { return sqrt_nu_; }
  /// Active attractor, always 1.
  double x_active() const noexcept { return 1.0; }

 private:
  double nu_;
  double sqrt_nu_;
};

// Single-node polynomials. f = -V'.
inline double node_drift(double x, double nu) noexcept { return -(x - 1.0) * (x * x - nu); }
inline double node_drift_slope(double x, double nu) noexcept { return -3.0 * x * x + 2.0 * x + nu; }

double potential_1d(double x, const NodeParams& params) noexcept;
double potential_1d_slope(double x, const NodeParams& params) noexcept;
double potential_1d_curvature(double x, const NodeParams& params) noexcept;

/// Directed diffusive coupling: node i receives beta * sum_{j in N_i} (x_j - x_i)
/// plus additive noise of amplitude alpha.
class Network {
 public:
  Network(std::vector<std::vector<int>> in_neighbours, double beta, double alpha);

  /// Bidirectionally coupled pair.
  static Network pair(double beta, double alpha);
  /// Unidirectional chain: node i listens to node i+1, the last node is uncoupled.
  static Network chain(std::size_t n_nodes, double beta, double alpha);

  std::size_t n_nodes() const noexcept { return in_neighbours_.size(); }
  const std::vector<std::vector<int>>& in_neighbours() const noexcept { return in_neighbours_; }
  double beta() const noexcept { return beta_; }
  double alpha() const noexcept { return alpha_; }
  /// True iff j in N_i <=> i in N_j; gates the potential-based operations.
  bool symmetric() const noexcept { return symmetric_; }

  Network with_beta(double beta) const;
  Network with_alpha(double alpha) const;

 private:
  std::vector<std::vector<int>> in_neighbours_;
  double beta_;
  double alpha_;
  bool symmetric_;
};

StateVector drift(const StateVector& x, const NodeParams& params, const Network& net);

/// Jacobian of the drift; defined for every network.
Matrix drift_jacobian(const StateVector& x, const NodeParams& params, const Network& net);

/// sum_i V(x_i) + (beta/4) sum_i sum_{j in N_i} (x_j - x_i)^2. Symmetric networks only.
double coupled_potential(const StateVector& x, const NodeParams& params, const Network& net);
StateVector gradient(const StateVector& x, const NodeParams& params, const Network& net);
Matrix hessian(const StateVector& x, const NodeParams& params, const Network& net);

/// The state with every node at the same value.
StateVector synchronized(std::size_t n_nodes, double value);

}  // namespace domino
