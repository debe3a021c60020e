#include "domino/kramers.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "domino/error.hpp"

namespace domino {

double kramers_1d(const NodeParams& params, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be > 0");
  const double q = params.x_quiescent();
  const double s = params.x_saddle();
  const double curvature = std::sqrt(potential_1d_curvature(q, params) *
                                     std::fabs(potential_1d_curvature(s, params)));
  const double barrier = potential_1d(s, params) - potential_1d(q, params);
  return 2.0 * std::numbers::pi / curvature * std::exp(2.0 / (alpha * alpha) * barrier);
}

KramersEstimate eyring_kramers(const Equilibrium& well, const Equilibrium& gate,
                               const NodeParams& params, const Network& net, double alpha) {
  if (!net.symmetric()) {
    throw Error(ErrorKind::AsymmetricNetwork, "Eyring-Kramers needs a gradient system");
  }
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be > 0");

  const Eigen::SelfAdjointEigenSolver<Matrix> at_well(hessian(well.x, params, net));
  const Eigen::SelfAdjointEigenSolver<Matrix> at_gate(hessian(gate.x, params, net));
  const auto& mu_well = at_well.eigenvalues();
  const auto& mu_gate = at_gate.eigenvalues();  // ascending
  if (!(mu_well.minCoeff() > 0.0)) {
    throw Error(ErrorKind::NotAGate, "well is not a minimum of the potential");
  }
  const auto negatives = (mu_gate.array() < 0.0).count();
  if (negatives != 1 || !(mu_gate.size() < 2 || mu_gate[1] > 0.0)) {
    throw Error(ErrorKind::NotAGate, "gate has " + std::to_string(negatives) +
                                         " negative curvature directions, expected 1");
  }

  KramersEstimate est;
  est.well = well;
  est.gate = gate;
  est.barrier = coupled_potential(gate.x, params, net) - coupled_potential(well.x, params, net);
  if (!(est.barrier > 0.0)) throw Error(ErrorKind::NotAGate, "barrier is not positive");

  // Ratio of determinants as a product of eigenvalue ratios keeps it well scaled.
  double ratio = 1.0;
  for (Eigen::Index k = 0; k < mu_gate.size(); ++k) ratio *= std::fabs(mu_gate[k]) / mu_well[k];
  est.prefactor = 2.0 * std::numbers::pi / std::fabs(mu_gate[0]) * std::sqrt(ratio);
  est.T = est.prefactor * std::exp(2.0 / (alpha * alpha) * est.barrier);
  return est;
}

double gate_adjusted(const KramersEstimate& estimate, int gate_count) {
  if (gate_count < 1) throw Error(ErrorKind::InvalidArgument, "gate count must be >= 1");
  return estimate.T / gate_count;
}

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Weak: return "weak";
    case Regime::Intermediate: return "intermediate";
    case Regime::Strong: return "strong";
  }
  return "unknown";
}

Regime parse_regime(const std::string& name) {
  if (name == "weak") return Regime::Weak;
  if (name == "intermediate") return Regime::Intermediate;
  if (name == "strong") return Regime::Strong;
  throw Error(ErrorKind::InvalidArgument, "unknown regime '" + name + "'");
}

RegimeBoundaries pair_boundaries(const NodeParams& params) {
  return {saddle_node_root(params, true), beta2_pitchfork(params), std::nullopt};
}

Regime pair_regime(const NodeParams& params, double beta) {
  const RegimeBoundaries b = pair_boundaries(params);
  if (beta >= 0.0 && beta < b.beta1) return Regime::Weak;
  if (beta > b.beta1 && beta < b.beta2) return Regime::Intermediate;
  if (beta > b.beta2) return Regime::Strong;
  throw Error(ErrorKind::WrongRegime, "beta = " + std::to_string(beta) + " sits on a boundary");
}

RegimeEstimate regime_T20(Regime regime, const NodeParams& params, double beta, double alpha) {
  const RegimeBoundaries bounds = pair_boundaries(params);
  if (pair_regime(params, beta) != regime) {
    throw Error(ErrorKind::WrongRegime, "beta = " + std::to_string(beta) + " is not in the " +
                                            to_string(regime) + " regime");
  }
  const Network net = Network::pair(beta, alpha);

  RegimeEstimate out;
  out.regime = regime;
  out.beta = beta;
  out.alpha = alpha;
  auto leg = [&](const std::string& well, const std::string& gate, int gate_count) {
    KramersEstimate est = eyring_kramers(labelled_equilibrium(params, net, well),
                                         labelled_equilibrium(params, net, gate), params, net, alpha);
    est.well_label = well;
    est.gate_label = gate;
    est.gate_count = gate_count;
    out.legs.push_back(std::move(est));
  };
  switch (regime) {
    case Regime::Weak:
      leg("QQ", "QS", 2);
      leg("QA", "SA", 1);
      break;
    case Regime::Intermediate:
      leg("QQ", "QS", 2);
      break;
    case Regime::Strong:
      leg("QQ", "SS", 1);
      break;
  }
  for (const auto& l : out.legs) out.T20 += l.adjusted();

  for (const auto& [name, b] : {std::pair{"beta1", bounds.beta1}, std::pair{"beta2", bounds.beta2}}) {
    if (std::fabs(beta - b) < 0.1 * b) {
      out.validity = std::string("non-uniform: within 10% of ") + name;
      for (auto& l : out.legs) l.validity = out.validity;
    }
  }
  return out;
}

}  // namespace domino
