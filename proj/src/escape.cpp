#include "domino/escape.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string_view>

#include "domino/error.hpp"

namespace domino {

bool EscapeRecord::censored() const {
  return std::find(escaped.begin(), escaped.end(), false) != escaped.end();
}

double snap_time(double t) noexcept { return std::round(t / kTimeQuantum) * kTimeQuantum; }

std::optional<double> crossing_time(double previous, double current, double t, double dt,
                                    double xi) {
  if (!(current > xi)) return std::nullopt;
  double frac = 0.0;
  if (previous < xi) frac = (xi - previous) / (current - previous);
  return snap_time(t + std::clamp(frac, 0.0, 1.0) * dt);
}

EscapeDetector::EscapeDetector(std::size_t n_nodes, double xi)
    : xi_(xi), times_(n_nodes), remaining_(n_nodes) {}

std::size_t EscapeDetector::observe(std::span<const double> previous,
                                    std::span<const double> current, double t, double dt) {
  std::size_t latched = 0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i]) continue;
    if (auto tc = crossing_time(previous[i], current[i], t, dt, xi_)) {
      times_[i] = *tc;
      ++latched;
    }
  }
  remaining_ -= latched;
  return latched;
}

EscapeRecord build_record(std::span<const std::optional<double>> latched, double t_max) {
  const std::size_t n = latched.size();
  EscapeRecord rec;
  rec.tau_node.resize(n);
  rec.escaped.resize(n);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    rec.escaped[i] = latched[i].has_value();
    rec.tau_node[i] = latched[i] ? *latched[i] : t_max;
    if (latched[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rec.tau_node[a] < rec.tau_node[b];
  });

  double previous = 0.0;
  for (std::size_t i : order) {
    rec.sequence.push_back(static_cast<int>(i) + 1);
    rec.tau_ordered.push_back(rec.tau_node[i]);
    rec.gaps.push_back(rec.tau_node[i] - previous);
    previous = rec.tau_node[i];
  }
  return rec;
}

std::string format_sequence(std::span<const int> sequence) {
  std::string out = "(";
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(sequence[k]);
  }
  return out + ")";
}

std::vector<int> parse_sequence(const std::string& text) {
  std::vector<int> labels;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      labels.push_back(std::stoi(text.substr(i, j - i)));
      i = j;
    } else if (std::string_view("(), -").find(text[i]) != std::string_view::npos) {
      ++i;
    } else {
      throw Error(ErrorKind::InvalidArgument, "bad sequence label '" + text + "'");
    }
  }
  return labels;
}

}  // namespace domino
