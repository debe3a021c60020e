#include "domino/model.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "domino/error.hpp"

namespace domino {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AsymmetricNetwork: return "AsymmetricNetwork";
    case ErrorKind::IntegrationFault: return "IntegrationFault";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::BoundaryNotBracketed: return "BoundaryNotBracketed";
    case ErrorKind::EmptyConditional: return "EmptyConditional";
    case ErrorKind::NotAGate: return "NotAGate";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::MissingEquilibrium: return "MissingEquilibrium";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

NodeParams::NodeParams(double nu) : nu_(nu), sqrt_nu_(std::sqrt(nu)) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "nu must lie in (0, 1), got " + std::to_string(nu));
  }
}

double potential_1d(double x, const NodeParams& params) noexcept {
  const double nu = params.nu();
  const double x2 = x * x;
  return 0.25 * x2 * x2 - x2 * x / 3.0 + nu * (x - 0.5 * x2);
}

double potential_1d_slope(double x, const NodeParams& params) noexcept {
  return -node_drift(x, params.nu());
}

double potential_1d_curvature(double x, const NodeParams& params) noexcept {
  return 3.0 * x * x - 2.0 * x - params.nu();
}

Network::Network(std::vector<std::vector<int>> in_neighbours, double beta, double alpha)
    : in_neighbours_(std::move(in_neighbours)), beta_(beta), alpha_(alpha), symmetric_(true) {
  const auto n = static_cast<int>(in_neighbours_.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "network needs at least one node");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be finite and >= 0");
  }

  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j : in_neighbours_[i]) {
      if (j < 0 || j >= n) {
        throw Error(ErrorKind::InvalidArgument,
                    "neighbour index " + std::to_string(j) + " of node " + std::to_string(i) +
                        " out of range");
      }
      if (j == i) throw Error(ErrorKind::InvalidArgument, "self-loop at node " + std::to_string(i));
      if (!edges.emplace(i, j).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate neighbour " + std::to_string(j) +
                                                    " of node " + std::to_string(i));
      }
    }
  }
  for (const auto& [i, j] : edges) {
    if (!edges.contains({j, i})) {
      symmetric_ = false;
      break;
    }
  }
}

Network Network::pair(double beta, double alpha) { return Network({{1}, {0}}, beta, alpha); }

Network Network::chain(std::size_t n_nodes, double beta, double alpha) {
  std::vector<std::vector<int>> nbrs(n_nodes);
  for (std::size_t i = 0; i + 1 < n_nodes; ++i) nbrs[i] = {static_cast<int>(i + 1)};
  return Network(std::move(nbrs), beta, alpha);
}

Network Network::with_beta(double beta) const { return Network(in_neighbours_, beta, alpha_); }
Network Network::with_alpha(double alpha) const { return Network(in_neighbours_, beta_, alpha); }

namespace {

void check_dimension(const StateVector& x, const Network& net) {
  if (static_cast<std::size_t>(x.size()) != net.n_nodes()) {
    throw Error(ErrorKind::DimensionMismatch, "state has " + std::to_string(x.size()) +
                                                  " entries, network has " +
                                                  std::to_string(net.n_nodes()) + " nodes");
  }
}

void require_symmetric(const Network& net) {
  if (!net.symmetric()) {
    throw Error(ErrorKind::AsymmetricNetwork,
                "coupled potential is only defined for symmetric coupling");
  }
}

}  // namespace

StateVector drift(const StateVector& x, const NodeParams& params, const Network& net) {
  check_dimension(x, net);
  const auto n = static_cast<Eigen::Index>(net.n_nodes());
  StateVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double coupling = 0.0;
    for (int j : net.in_neighbours()[i]) coupling += x[j] - x[i];
    out[i] = node_drift(x[i], params.nu()) + net.beta() * coupling;
  }
  return out;
}

Matrix drift_jacobian(const StateVector& x, const NodeParams& params, const Network& net) {
  check_dimension(x, net);
  const auto n = static_cast<Eigen::Index>(net.n_nodes());
  Matrix jac = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& nbrs = net.in_neighbours()[i];
    jac(i, i) = node_drift_slope(x[i], params.nu()) - net.beta() * static_cast<double>(nbrs.size());
    for (int j : nbrs) jac(i, j) += net.beta();
  }
  return jac;
}

double coupled_potential(const StateVector& x, const NodeParams& params, const Network& net) {
  require_symmetric(net);
  check_dimension(x, net);
  double nodes = 0.0;
  double springs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    nodes += potential_1d(x[i], params);
    for (int j : net.in_neighbours()[i]) {
      const double d = x[j] - x[i];
      springs += d * d;
    }
  }
  return nodes + 0.25 * net.beta() * springs;
}

StateVector gradient(const StateVector& x, const NodeParams& params, const Network& net) {
  require_symmetric(net);
  return -drift(x, params, net);
}

Matrix hessian(const StateVector& x, const NodeParams& params, const Network& net) {
  require_symmetric(net);
  return -drift_jacobian(x, params, net);
}

StateVector synchronized(std::size_t n_nodes, double value) {
  return StateVector::Constant(static_cast<Eigen::Index>(n_nodes), value);
}

}  // namespace domino
