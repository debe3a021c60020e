#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domino/model.hpp"

namespace domino {

enum class StabilityKind { Sink, Source, Saddle };

const char* to_string(StabilityKind kind) noexcept;

struct Equilibrium {
  StateVector x;
  /// Drift-Jacobian eigenvalues, sorted by descending real part.
  std::vector<std::complex<double>> eigenvalues;
  StabilityKind kind = StabilityKind::Sink;
  /// Number of eigenvalues with positive real part.
  int unstable_dimension = 0;
  /// Some eigenvalue has |Re| below kZeroEigenvalue; kind is then fragile.
  bool near_degenerate = false;

  double leading_eigenvalue() const { return eigenvalues.front().real(); }
};

inline constexpr double kZeroEigenvalue = 1e-8;

Equilibrium classify(const StateVector& x, const NodeParams& params, const Network& net);

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;  // on the max-norm of the drift
};

/// Throws ErrorKind::NoConvergence or ErrorKind::SingularJacobian.
Equilibrium newton_equilibrium(const StateVector& x0, const NodeParams& params,
                               const Network& net, const NewtonOptions& options = {});

/// Node value for a label letter: Q, S or A.
double anchor_value(char letter, const NodeParams& params);
/// The uncoupled state named by a label such as "QSA".
StateVector anchor_state(const std::string& label, const NodeParams& params);

struct BranchPoint {
  double beta = 0.0;
  Equilibrium eq;
};

/// Equilibria continued in beta from one uncoupled state. `label` spells the
/// beta = 0 state node by node, e.g. "QS" for (x_Q, x_S).
struct Branch {
  std::string label;
  std::vector<BranchPoint> points;
  /// Last converged beta, set when the branch ended before the grid did.
  std::optional<double> end_beta;
};

struct ContinuationOptions {
  double min_step = 1e-6;
  /// Largest accepted change of a state (max-norm) in one sub-step.
  double max_jump = 0.05;
  /// Two heads closer than this (max-norm) are the same equilibrium.
  double coincidence = 1e-7;
  NewtonOptions newton;
};

/// Continues all 3^N uncoupled states over `beta_grid` (increasing, starting at 0).
/// A branch stops when the step falls below min_step, or when it has sat on
/// another branch for two grid points in a row (the one that moved less is kept).
std::vector<Branch> continue_branches(const NodeParams& params, const Network& net,
                                      std::span<const double> beta_grid,
                                      const ContinuationOptions& options = {});

/// The equilibrium on branch `label` at the network's own beta.
/// Throws ErrorKind::MissingEquilibrium if that branch ended earlier.
Equilibrium labelled_equilibrium(const NodeParams& params, const Network& net,
                                 const std::string& label,
                                 const ContinuationOptions& options = {});

/// Distinct equilibria at one beta, found by continuing from beta = 0.
std::vector<Equilibrium> equilibria_at(const NodeParams& params, const Network& net, double beta,
                                       const ContinuationOptions& options = {});

/// Counts of distinct equilibria; "split" ones have unequal node values.
struct Census {
  std::size_t total = 0;
  std::size_t split = 0;
  std::size_t split_sinks = 0;
  friend bool operator==(const Census&, const Census&) = default;
};

Census census(std::span<const Equilibrium> equilibria);

/// Fold condition for the symmetric pair. `printed` carries the constant term
/// nu(nu - 1); `corrected` carries nu(1 - nu), whose root matches the fold.
struct SaddleNodeResidual {
  double printed = 0.0;
  double corrected = 0.0;
};

SaddleNodeResidual saddle_node_residual(double beta, const NodeParams& params);

/// Smallest root in (0, 1] of one variant, by a sign scan and bisection.
/// Throws ErrorKind::BoundaryNotBracketed if there is none.
double saddle_node_root(const NodeParams& params, bool corrected = true);

/// Pitchfork of x_SS for the pair: (sqrt(nu) - 4 nu + 3 nu^1.5) / (1 - 3 sqrt(nu)).
/// Throws ErrorKind::DegenerateDenominator at nu = 1/9.
double beta2_pitchfork(const NodeParams& params);

struct BetaRange {
  double min = 0.0;
  double max = 0.5;
  std::size_t points = 501;
};

/// beta1: first change of the census. For the pair beta2 is where the last
/// split equilibria vanish and beta3 is absent. Otherwise beta2 is where the
/// split sinks vanish and beta3 where all split equilibria do. A system whose
/// split sinks vanish at beta1 is treated like the pair.
struct RegimeBoundaries {
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::optional<double> beta3;
};

/// Throws ErrorKind::BoundaryNotBracketed when a boundary lies outside
/// [range.min, range.max], and ErrorKind::InvalidArgument on a bad range.
RegimeBoundaries detect_boundaries(const NodeParams& params, const Network& net,
                                   const BetaRange& range,
                                   const ContinuationOptions& options = {});

}  // namespace domino
