#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "domino/escape.hpp"
#include "domino/model.hpp"

namespace domino {

struct SimulationConfig {
  double dt = 0.01;
  double t_max = 1.0e5;
  double xi = 0.5;
  std::uint64_t master_seed = 0;
  std::size_t n_samples = 1;
  bool record_paths = false;
  /// Steps between stored trajectory points when record_paths is set.
  std::size_t path_stride = 100;
  /// Standard normals summed per node per step. A run at (dt, m) and a run at
  /// (dt / m, 1) with the same seed are driven by the same Brownian path,
  /// which is what step-size convergence checks need.
  std::size_t noise_substeps = 1;

  /// Throws ErrorKind::InvalidArgument on a non-positive dt or t_max, zero
  /// counts, or xi outside (sqrt(nu), 1).
  void validate(const NodeParams& params) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
};

/// One realization started from the all-quiescent state.
struct SampleResult {
  std::size_t sample_index = 0;
  EscapeRecord record;
  /// Set when integration hit a non-finite state; unescaped nodes are then censored.
  std::optional<std::string> fault;
  std::optional<Trajectory> path;
};

struct Ensemble {
  std::vector<SampleResult> samples;  // ordered by sample_index
  std::size_t n_censored = 0;
  std::size_t n_faulted = 0;
};

/// One stochastic Heun step with additive noise, dW ~ N(0, dt) per node:
///   x* = x + F(x) dt + alpha dW,   x' = x + (F(x) + F(x*)) dt / 2 + alpha dW.
/// Throws IntegrationFault if the result is not finite.
StateVector heun_step(const StateVector& x, const NodeParams& params, const Network& net,
                      double dt, const StateVector& dW, double t = 0.0);

/// Integrates from x_i(0) = -sqrt(nu) until every node crossed xi or t_max.
/// The noise stream is a pure function of (master_seed, sample_index).
SampleResult run_sample(const NodeParams& params, const Network& net,
                        const SimulationConfig& config, std::size_t sample_index);

/// Maps run_sample over 0..n_samples-1. `threads` only affects wall-clock time;
/// 0 picks the hardware concurrency.
Ensemble monte_carlo(const NodeParams& params, const Network& net,
                     const SimulationConfig& config, unsigned threads = 0);

}  // namespace domino
