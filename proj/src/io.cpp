#include "domino/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "domino/error.hpp"

namespace domino {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& field, std::size_t line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

json summary_object(const DistributionSummary& s) {
  json q = json::object();
  const char* names[] = {"q01", "q05", "q25", "q50", "q75", "q95", "q99"};
  for (std::size_t k = 0; k < kSummaryQuantiles.size(); ++k) q[names[k]] = s.quantiles[k];
  return {{"n", s.n},
          {"mean", s.mean},
          {"stddev", s.stddev},
          {"quantiles", q},
          {"histogram", {{"edges", s.histogram.edges}, {"counts", s.histogram.counts}}}};
}

json state_array(const StateVector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble) {
  const std::size_t n = ensemble.samples.empty() ? 0 : ensemble.samples.front().record.n_nodes();
  out << "sample_index,censored";
  for (std::size_t i = 1; i <= n; ++i) out << ",tau_" << i;
  out << ",sequence";
  for (std::size_t k = 1; k <= n; ++k) out << ",gap_" << k;
  out << '\n';
  for (const auto& s : ensemble.samples) {
    const EscapeRecord& r = s.record;
    out << s.sample_index << ',' << (r.censored() ? 1 : 0);
    for (double t : r.tau_node) out << ',' << format_double(t);
    out << ",\"" << format_sequence(r.sequence) << '"';
    for (std::size_t k = 0; k < n; ++k) {
      out << ',';
      if (k < r.gaps.size()) out << format_double(r.gaps[k]);
    }
    out << '\n';
  }
}

StoredEnsemble read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidArgument, "empty ensemble file");
  const auto header = split_csv(line);
  if (header.size() < 5 || header[0] != "sample_index" || header[1] != "censored" ||
      (header.size() - 3) % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "not an ensemble CSV header");
  }
  const std::size_t n = (header.size() - 3) / 2;
  if (header[2 + n] != "sequence") throw Error(ErrorKind::InvalidArgument, "not an ensemble CSV header");

  StoredEnsemble stored;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": expected " +
                                                  std::to_string(header.size()) + " fields");
    }
    stored.sample_index.push_back(static_cast<std::size_t>(parse_double(f[0], line_no)));
    EscapeRecord r;
    for (std::size_t i = 0; i < n; ++i) r.tau_node.push_back(parse_double(f[2 + i], line_no));
    r.sequence = parse_sequence(f[2 + n]);
    r.escaped.assign(n, false);
    for (int label : r.sequence) {
      if (label < 1 || static_cast<std::size_t>(label) > n) {
        throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": bad node label");
      }
      r.escaped[static_cast<std::size_t>(label - 1)] = true;
      r.tau_ordered.push_back(r.tau_node[static_cast<std::size_t>(label - 1)]);
    }
    for (std::size_t k = 0; k < r.sequence.size(); ++k) {
      r.gaps.push_back(parse_double(f[3 + n + k], line_no));
    }
    stored.records.push_back(std::move(r));
  }
  return stored;
}

void write_sequence_table_csv(std::ostream& out, const SequenceStats& stats) {
  const std::size_t n = stats.rows.empty() ? 0 : stats.rows.front().sequence.size();
  out << "sequence,count,probability";
  for (std::size_t k = 1; k <= n; ++k) {
    out << ",gap" << k << "_mean,gap" << k << "_sd,gap" << k << "_cv";
  }
  out << '\n';
  for (const auto& row : stats.rows) {
    out << '"' << format_sequence(row.sequence) << "\"," << row.count << ','
        << format_double(row.probability);
    for (const auto& m : row.gaps) {
      out << ',' << format_double(m.mean) << ',' << format_double(m.stddev) << ','
          << format_double(m.cv);
    }
    out << '\n';
  }
}

std::string summary_json(std::span<const EscapeRecord> records, std::size_t bins,
                         std::size_t n_faulted) {
  const SequenceStats table = sequence_table(records);
  json doc;
  doc["n_samples"] = table.n_samples;
  doc["n_censored"] = table.n_censored;
  doc["censored_fraction"] = table.censored_fraction;
  doc["n_faulted"] = n_faulted;

  json nodes = json::array();
  const auto marginals = node_marginals(records, bins);
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    json node = summary_object(marginals[i]);
    node["node"] = i + 1;
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);

  json sequences = json::array();
  for (const auto& row : table.rows) {
    const auto gaps = conditional_gaps(records, row.sequence);
    json entry = {{"sequence", format_sequence(row.sequence)},
                  {"count", row.count},
                  {"probability", row.probability}};
    json gap_list = json::array();
    for (std::size_t k = 0; k < gaps.size(); ++k) {
      json g = summary_object(summarize(gaps[k], bins));
      g["gap"] = std::to_string(k + 1) + "|" + std::to_string(k);
      g["cv"] = row.gaps[k].cv;
      gap_list.push_back(std::move(g));
    }
    entry["gaps"] = std::move(gap_list);
    sequences.push_back(std::move(entry));
  }
  doc["sequences"] = std::move(sequences);
  return doc.dump(2) + "\n";
}

void write_paths_csv(std::ostream& out, std::span<const SampleResult> samples) {
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.path && !s.path->states.empty()) n = static_cast<std::size_t>(s.path->states.front().size());
  }
  out << "sample_index,t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  out << '\n';
  for (const auto& s : samples) {
    if (!s.path) continue;
    for (std::size_t p = 0; p < s.path->times.size(); ++p) {
      out << s.sample_index << ',' << format_double(s.path->times[p]);
      for (double v : s.path->states[p]) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

void write_branches_csv(std::ostream& out, std::span<const Branch> branches) {
  const std::size_t n = branches.empty() ? 0 : branches.front().label.size();
  out << "branch,beta";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  out << ",kind,leading_eigenvalue,unstable_dimension,near_degenerate\n";
  for (const auto& br : branches) {
    for (const auto& pt : br.points) {
      out << br.label << ',' << format_double(pt.beta);
      for (double v : pt.eq.x) out << ',' << format_double(v);
      out << ',' << to_string(pt.eq.kind) << ',' << format_double(pt.eq.leading_eigenvalue())
          << ',' << pt.eq.unstable_dimension << ',' << (pt.eq.near_degenerate ? 1 : 0) << '\n';
    }
  }
}

std::string boundaries_json(const RegimeBoundaries& numeric, const NodeParams& params,
                            const Network& net) {
  json doc = {{"beta1", numeric.beta1}, {"beta2", numeric.beta2}};
  doc["beta3"] = numeric.beta3 ? json(*numeric.beta3) : json(nullptr);
  if (net.n_nodes() == 2 && net.symmetric()) {
    json formulas;
    formulas["fold_corrected_root"] = saddle_node_root(params, true);
    try {
      formulas["fold_printed_root"] = saddle_node_root(params, false);
    } catch (const Error&) {
      formulas["fold_printed_root"] = nullptr;
    }
    try {
      formulas["pitchfork"] = beta2_pitchfork(params);
    } catch (const Error&) {
      formulas["pitchfork"] = nullptr;
    }
    doc["pair_formulas"] = std::move(formulas);
  }
  return doc.dump(2) + "\n";
}

namespace {

json estimate_object(const KramersEstimate& e) {
  return {{"well", e.well_label},
          {"gate", e.gate_label},
          {"well_state", state_array(e.well.x)},
          {"gate_state", state_array(e.gate.x)},
          {"barrier", e.barrier},
          {"prefactor", e.prefactor},
          {"G", e.gate_count},
          {"T", e.T},
          {"T_adjusted", e.adjusted()},
          {"validity", e.validity}};
}

}  // namespace

std::string estimate_json(const KramersEstimate& estimate) {
  return estimate_object(estimate).dump(2) + "\n";
}

std::string regime_json(const RegimeEstimate& estimate) {
  json legs = json::array();
  for (const auto& l : estimate.legs) legs.push_back(estimate_object(l));
  const json doc = {{"regime", to_string(estimate.regime)},
                    {"beta", estimate.beta},
                    {"alpha", estimate.alpha},
                    {"T20", estimate.T20},
                    {"validity", estimate.validity},
                    {"legs", legs}};
  return doc.dump(2) + "\n";
}

void write_potential_grid_csv(std::ostream& out, const NodeParams& params, const Network& net,
                              const GridSpec& grid) {
  if (!net.symmetric()) {
    throw Error(ErrorKind::AsymmetricNetwork, "the potential grid needs symmetric coupling");
  }
  if (net.n_nodes() != 2) throw Error(ErrorKind::DimensionMismatch, "the potential grid is two-node only");
  if (grid.points == 0) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  auto axis = [&](std::size_t k) {
    if (grid.points == 1) return grid.x_min;
    return grid.x_min + (grid.x_max - grid.x_min) * static_cast<double>(k) /
                            static_cast<double>(grid.points - 1);
  };
  out << "x1,x2,V\n";
  StateVector x(2);
  for (std::size_t a = 0; a < grid.points; ++a) {
    for (std::size_t b = 0; b < grid.points; ++b) {
      x << axis(a), axis(b);
      out << format_double(x[0]) << ',' << format_double(x[1]) << ','
          << format_double(coupled_potential(x, params, net)) << '\n';
    }
  }
}

void write_equilibria_csv(std::ostream& out, std::span<const Equilibrium> equilibria) {
  const std::size_t n = equilibria.empty() ? 0 : static_cast<std::size_t>(equilibria.front().x.size());
  for (std::size_t i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "kind,unstable_dimension\n";
  for (const auto& eq : equilibria) {
    for (double v : eq.x) out << format_double(v) << ',';
    out << to_string(eq.kind) << ',' << eq.unstable_dimension << '\n';
  }
}

}  // namespace domino
