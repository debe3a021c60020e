#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "domino/config.hpp"
#include "domino/equilibria.hpp"
#include "domino/escape.hpp"
#include "domino/kramers.hpp"
#include "domino/sde.hpp"
#include "domino/stats.hpp"

namespace domino {

/// 17 significant digits, so every double reads back bit for bit.
std::string format_double(double value);

/// One row per sample: sample_index, censored, tau_1..tau_N, sequence, gap_1..gap_N.
/// Gaps past the last escape are left empty.
void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble);

struct StoredEnsemble {
  std::vector<std::size_t> sample_index;
  std::vector<EscapeRecord> records;
};

/// Inverse of write_ensemble_csv. Throws ErrorKind::InvalidArgument on a malformed file.
StoredEnsemble read_ensemble_csv(std::istream& in);

/// sequence, count, probability, then gap<k>_mean, gap<k>_sd, gap<k>_cv per gap.
void write_sequence_table_csv(std::ostream& out, const SequenceStats& stats);

/// Counts, node marginals and per-sequence gap summaries as JSON.
std::string summary_json(std::span<const EscapeRecord> records, std::size_t bins,
                         std::size_t n_faulted = 0);

/// sample_index, t, x1..xN for every stored path point.
void write_paths_csv(std::ostream& out, std::span<const SampleResult> samples);

/// branch, beta, x1..xN, kind, leading_eigenvalue, unstable_dimension, near_degenerate.
void write_branches_csv(std::ostream& out, std::span<const Branch> branches);

std::string boundaries_json(const RegimeBoundaries& numeric, const NodeParams& params,
                            const Network& net);

std::string estimate_json(const KramersEstimate& estimate);
std::string regime_json(const RegimeEstimate& estimate);

/// x1, x2, V over the square grid. Pair-shaped symmetric networks only.
void write_potential_grid_csv(std::ostream& out, const NodeParams& params, const Network& net,
                              const GridSpec& grid);
/// x1..xN, kind, unstable_dimension for overlay markers.
void write_equilibria_csv(std::ostream& out, std::span<const Equilibrium> equilibria);

}  // namespace domino
