#include "domino/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "domino/error.hpp"

namespace domino {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Linear interpolation between order statistics (the "type 7" rule).
double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::size_t check_nodes(std::span<const EscapeRecord> ensemble) {
  if (ensemble.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  const std::size_t n = ensemble.front().n_nodes();
  for (const auto& rec : ensemble) {
    if (rec.n_nodes() != n) throw Error(ErrorKind::DimensionMismatch, "mixed node counts");
  }
  return n;
}

}  // namespace

Moments moments(std::span<const double> values) {
  Moments m;
  m.n = values.size();
  if (m.n == 0) {
    m.mean = m.stddev = m.cv = kNaN;
    return m;
  }
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
  if (m.n < 2) {
    m.stddev = m.cv = kNaN;
    return m;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
  m.cv = m.stddev / m.mean;
  return m;
}

const SequenceRow& SequenceStats::row(std::span<const int> sequence) const {
  for (const auto& r : rows) {
    if (std::equal(r.sequence.begin(), r.sequence.end(), sequence.begin(), sequence.end())) return r;
  }
  throw Error(ErrorKind::EmptyConditional,
              "sequence " + format_sequence(sequence) + " was never realized");
}

DistributionSummary summarize(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  DistributionSummary s;
  const Moments m = moments(values);
  s.n = m.n;
  s.mean = m.mean;
  s.stddev = m.stddev;
  s.histogram.counts.assign(bins, 0);
  if (values.empty()) {
    s.quantiles.fill(kNaN);
    s.histogram.edges.assign(bins + 1, 0.0);
    return s;
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t q = 0; q < kSummaryQuantiles.size(); ++q) {
    s.quantiles[q] = quantile_sorted(sorted, kSummaryQuantiles[q]);
  }

  double lo = sorted.front();
  double hi = sorted.back();
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  s.histogram.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) s.histogram.edges[b] = lo + width * static_cast<double>(b);
  s.histogram.edges.back() = hi;
  for (double v : sorted) {
    auto b = static_cast<std::size_t>(std::max(0.0, std::floor((v - lo) / width)));
    ++s.histogram.counts[std::min(b, bins - 1)];
  }
  return s;
}

std::vector<EscapeRecord> records(const Ensemble& ensemble) {
  std::vector<EscapeRecord> out;
  out.reserve(ensemble.samples.size());
  for (const auto& s : ensemble.samples) out.push_back(s.record);
  return out;
}

SequenceStats sequence_table(std::span<const EscapeRecord> ensemble) {
  check_nodes(ensemble);
  SequenceStats stats;
  stats.n_samples = ensemble.size();

  std::map<std::vector<int>, std::vector<std::size_t>, std::greater<>> groups;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (ensemble[i].censored()) {
      ++stats.n_censored;
      continue;
    }
    groups[ensemble[i].sequence].push_back(i);
  }
  const auto total = static_cast<double>(stats.n_samples);
  stats.censored_fraction = static_cast<double>(stats.n_censored) / total;

  for (const auto& [sequence, members] : groups) {
    SequenceRow row;
    row.sequence = sequence;
    row.count = members.size();
    row.probability = static_cast<double>(row.count) / total;
    std::vector<double> column(members.size());
    for (std::size_t k = 0; k < sequence.size(); ++k) {
      for (std::size_t j = 0; j < members.size(); ++j) column[j] = ensemble[members[j]].gaps[k];
      row.gaps.push_back(moments(column));
    }
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

std::vector<DistributionSummary> node_marginals(std::span<const EscapeRecord> ensemble,
                                                std::size_t bins) {
  const std::size_t n = check_nodes(ensemble);
  std::vector<std::vector<double>> taus(n);
  for (const auto& rec : ensemble) {
    if (rec.censored()) continue;
    for (std::size_t i = 0; i < n; ++i) taus[i].push_back(rec.tau_node[i]);
  }
  std::vector<DistributionSummary> out;
  for (const auto& t : taus) out.push_back(summarize(t, bins));
  return out;
}

std::vector<std::vector<double>> conditional_gaps(std::span<const EscapeRecord> ensemble,
                                                  std::span<const int> sequence) {
  std::vector<std::vector<double>> out(sequence.size());
  for (const auto& rec : ensemble) {
    if (rec.censored() || !std::equal(rec.sequence.begin(), rec.sequence.end(), sequence.begin(),
                                      sequence.end())) {
      continue;
    }
    for (std::size_t k = 0; k < sequence.size(); ++k) out[k].push_back(rec.gaps[k]);
  }
  if (out.empty() || out.front().empty()) {
    throw Error(ErrorKind::EmptyConditional,
                "sequence " + format_sequence(sequence) + " was never realized");
  }
  return out;
}

ExponentialityReport exponentiality_check(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 1000) {
    throw Error(ErrorKind::InvalidArgument,
                "exponentiality check needs >= 1000 samples, got " + std::to_string(n));
  }
  ExponentialityReport rep;
  rep.moments = moments(samples);
  rep.cv_band = 3.0 / std::sqrt(static_cast<double>(n));
  rep.cv_consistent = std::fabs(rep.moments.cv - 1.0) <= rep.cv_band;

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  // Survival at the k-th order statistic, (n - k) / (n + 1), never reaches zero.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t k = n / 2; k < n; ++k, ++m) {
    const double x = sorted[k];
    const double y = std::log(static_cast<double>(n - k) / static_cast<double>(n + 1));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto md = static_cast<double>(m);
  rep.tail_slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  rep.tail_ratio = -1.0 / rep.tail_slope / rep.moments.mean;
  return rep;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16 * std::fabs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Stephens' finite-size correction to the asymptotic distribution.
double ks_p_value(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "KS test needs data");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

KsResult ks_one_sample(std::span<const double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "KS test needs data");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

}  // namespace domino
