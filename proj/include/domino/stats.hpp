#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "domino/escape.hpp"
#include "domino/sde.hpp"

namespace domino {

/// Sample moments; stddev uses the n - 1 denominator. cv is stddev / mean and
/// is NaN for fewer than two values.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double cv = 0.0;
};

Moments moments(std::span<const double> values);

struct SequenceRow {
  std::vector<int> sequence;
  std::size_t count = 0;
  double probability = 0.0;
  /// gaps[k] summarizes tau^{k+1|k} over the samples that realized `sequence`.
  std::vector<Moments> gaps;
};

struct SequenceStats {
  std::size_t n_samples = 0;
  std::size_t n_censored = 0;
  double censored_fraction = 0.0;
  /// Descending lexicographic order, so (3, 2, 1) comes first.
  std::vector<SequenceRow> rows;

  /// Throws ErrorKind::EmptyConditional if `sequence` was never realized.
  const SequenceRow& row(std::span<const int> sequence) const;
};

inline constexpr std::array<double, 7> kSummaryQuantiles{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

struct DistributionSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::array<double, kSummaryQuantiles.size()> quantiles{};
  Histogram histogram;
};

/// Throws ErrorKind::InvalidArgument for zero bins. An empty input gives an
/// all-zero summary with NaN moments.
DistributionSummary summarize(std::span<const double> values, std::size_t bins = 50);

std::vector<EscapeRecord> records(const Ensemble& ensemble);

/// Throws ErrorKind::InvalidArgument on an empty ensemble or mixed node counts.
SequenceStats sequence_table(std::span<const EscapeRecord> ensemble);

/// Unconditional tau of each node over the uncensored samples.
std::vector<DistributionSummary> node_marginals(std::span<const EscapeRecord> ensemble,
                                                std::size_t bins = 50);

/// Per-gap samples for the records that realized `sequence`; out[k] holds tau^{k+1|k}.
/// Throws ErrorKind::EmptyConditional when none did.
std::vector<std::vector<double>> conditional_gaps(std::span<const EscapeRecord> ensemble,
                                                  std::span<const int> sequence);

struct ExponentialityReport {
  Moments moments;
  /// Half-width of the band 1 +- 3/sqrt(n) an exponential sample's CV falls in.
  double cv_band = 0.0;
  /// Least-squares slope of log survival vs value over the upper half.
  double tail_slope = 0.0;
  /// -1 / tail_slope, divided by the sample mean; close to 1 for an exponential.
  double tail_ratio = 0.0;
  bool cv_consistent = false;
};

/// Throws ErrorKind::InvalidArgument below 1000 samples.
ExponentialityReport exponentiality_check(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KsResult ks_one_sample(std::span<const double> values, const std::function<double(double)>& cdf);

}  // namespace domino
