#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace domino {

/// First-passage outcome of one realization.
///
/// Node labels in `sequence` are 1-based, in escape order: {3, 2, 1} means
/// node 3 escaped first. Censored nodes (still below the threshold at t_max)
/// are reported with tau_node == t_max and escaped == false; they are absent
/// from sequence, tau_ordered and gaps.
struct EscapeRecord {
  std::vector<double> tau_node;
  std::vector<bool> escaped;
  std::vector<int> sequence;
  std::vector<double> tau_ordered;
  std::vector<double> gaps;

  bool censored() const;
  std::size_t n_nodes() const { return tau_node.size(); }
  friend bool operator==(const EscapeRecord&, const EscapeRecord&) = default;
};

/// Crossing times are snapped to multiples of this quantum (2^-24). With all
/// times below 2^28 every gap and every partial sum of gaps is exactly
/// representable, so sum(gaps) == max(tau) holds bit for bit.
inline constexpr double kTimeQuantum = 1.0 / 16777216.0;

double snap_time(double t) noexcept;

/// Linear interpolation of the time at which a node moving from `previous`
/// (at time t) to `current` (at t + dt) exceeds xi. Empty when current <= xi.
std::optional<double> crossing_time(double previous, double current, double t, double dt,
                                    double xi);

/// Latches each node's first crossing of the threshold.
class EscapeDetector {
 public:
  EscapeDetector(std::size_t n_nodes, double xi);

  /// Feed one accepted step from time t to t + dt. Returns how many nodes
  /// escaped during this step. Already-latched nodes are never updated.
  std::size_t observe(std::span<const double> previous, std::span<const double> current,
                      double t, double dt);

  bool all_escaped() const noexcept { return remaining_ == 0; }
  std::size_t remaining() const noexcept { return remaining_; }
  const std::vector<std::optional<double>>& times() const noexcept { return times_; }
  double xi() const noexcept { return xi_; }

 private:
  double xi_;
  std::vector<std::optional<double>> times_;
  std::size_t remaining_;
};

/// Orders latched times into a record. Exact ties go to the lowest node index.
EscapeRecord build_record(std::span<const std::optional<double>> latched, double t_max);

/// Display label, e.g. "(3, 2, 1)".
std::string format_sequence(std::span<const int> sequence);
/// Inverse of format_sequence; also accepts labels separated by spaces or dashes.
std::vector<int> parse_sequence(const std::string& text);

}  // namespace domino
