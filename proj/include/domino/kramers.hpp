#pragma once

#include <string>
#include <vector>

#include "domino/equilibria.hpp"
#include "domino/model.hpp"

namespace domino {

/// Single-node asymptotic mean escape time from x_Q over x_S:
///   2 pi / sqrt(V''(x_Q) |V''(x_S)|) * exp((2 / alpha^2) (V(x_S) - V(x_Q))).
/// Throws ErrorKind::InvalidArgument for alpha <= 0.
double kramers_1d(const NodeParams& params, double alpha);

struct KramersEstimate {
  Equilibrium well;
  Equilibrium gate;
  std::string well_label;
  std::string gate_label;
  double barrier = 0.0;
  double prefactor = 0.0;
  /// Mean time over this one gate.
  double T = 0.0;
  /// Symmetric copies of the gate; the escape time is T / gate_count.
  int gate_count = 1;
  std::string validity = "ok";

  double adjusted() const { return T / gate_count; }
};

/// Eyring-Kramers time from a minimum `well` over an index-1 saddle `gate` of
/// the coupled potential, with prefactor
///   (2 pi / |lambda_-|) * sqrt(|det H(gate)| / det H(well)).
/// Throws ErrorKind::AsymmetricNetwork, or ErrorKind::NotAGate when the well is
/// not a minimum, the gate is not an index-1 saddle, or the barrier is not positive.
KramersEstimate eyring_kramers(const Equilibrium& well, const Equilibrium& gate,
                               const NodeParams& params, const Network& net, double alpha);

/// T / G. Throws ErrorKind::InvalidArgument for G < 1.
double gate_adjusted(const KramersEstimate& estimate, int gate_count);

enum class Regime { Weak, Intermediate, Strong };

const char* to_string(Regime regime) noexcept;
/// Throws ErrorKind::InvalidArgument for anything but weak, intermediate, strong.
Regime parse_regime(const std::string& name);

/// Coupling boundaries of the pair: the fold root of the corrected cubic and
/// the pitchfork formula.
RegimeBoundaries pair_boundaries(const NodeParams& params);

/// Regime containing beta for the pair; boundaries themselves belong to none
/// and throw ErrorKind::WrongRegime.
Regime pair_regime(const NodeParams& params, double beta);

struct RegimeEstimate {
  Regime regime = Regime::Weak;
  double beta = 0.0;
  double alpha = 0.0;
  /// Mean time until both nodes of the pair have escaped.
  double T20 = 0.0;
  /// Escape legs in order; T20 is the sum of their adjusted times.
  std::vector<KramersEstimate> legs;
  std::string validity = "ok";
};

/// Composes the pair's two-escape time from the regime's gates:
///   weak: x_QQ over x_QS (2 gates) to x_QA, then over x_SA (1 gate);
///   intermediate: x_QQ over x_QS (2 gates) straight to x_AA;
///   strong: x_QQ over x_SS (1 gate).
/// Throws ErrorKind::WrongRegime if beta is not strictly inside `regime`, and
/// ErrorKind::MissingEquilibrium if a needed branch no longer exists.
/// Within 10% of a boundary the result carries a non-uniformity warning.
RegimeEstimate regime_T20(Regime regime, const NodeParams& params, double beta, double alpha);

}  // namespace domino
