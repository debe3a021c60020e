#include "domino/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "domino/error.hpp"

namespace domino {

const char* to_string(StabilityKind kind) noexcept {
  switch (kind) {
    case StabilityKind::Sink: return "sink";
    case StabilityKind::Source: return "source";
    case StabilityKind::Saddle: return "saddle";
  }
  return "unknown";
}

Equilibrium classify(const StateVector& x, const NodeParams& params, const Network& net) {
  Equilibrium eq;
  eq.x = x;
  const Eigen::EigenSolver<Matrix> solver(drift_jacobian(x, params, net), false);
  const auto& values = solver.eigenvalues();
  eq.eigenvalues.assign(values.data(), values.data() + values.size());
  std::sort(eq.eigenvalues.begin(), eq.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
            });
  for (const auto& v : eq.eigenvalues) {
    if (v.real() > 0.0) ++eq.unstable_dimension;
    if (std::fabs(v.real()) < kZeroEigenvalue) eq.near_degenerate = true;
  }
  const auto n = static_cast<int>(eq.eigenvalues.size());
  eq.kind = eq.unstable_dimension == 0   ? StabilityKind::Sink
            : eq.unstable_dimension == n ? StabilityKind::Source
                                         : StabilityKind::Saddle;
  return eq;
}

namespace {

// Newton iteration without classification; continuation calls this per sub-step.
StateVector newton_root(const StateVector& x0, const NodeParams& params, const Network& net,
                        const NewtonOptions& options) {
  StateVector x = x0;
  for (int it = 0;; ++it) {
    const StateVector f = drift(x, params, net);
    if (!f.allFinite()) throw Error(ErrorKind::NoConvergence, "Newton iterate left the finite range");
    if (f.lpNorm<Eigen::Infinity>() < options.tolerance) return x;
    if (it == options.max_iterations) {
      throw Error(ErrorKind::NoConvergence,
                  "no root after " + std::to_string(options.max_iterations) + " iterations");
    }
    const Eigen::FullPivLU<Matrix> lu(drift_jacobian(x, params, net));
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularJacobian, "drift Jacobian is singular");
    x -= lu.solve(f);
  }
}

}  // namespace

Equilibrium newton_equilibrium(const StateVector& x0, const NodeParams& params,
                               const Network& net, const NewtonOptions& options) {
  return classify(newton_root(x0, params, net, options), params, net);
}

double anchor_value(char letter, const NodeParams& params) {
  switch (letter) {
    case 'Q': return params.x_quiescent();
    case 'S': return params.x_saddle();
    case 'A': return params.x_active();
  }
  throw Error(ErrorKind::InvalidArgument, std::string("unknown state letter '") + letter + "'");
}

StateVector anchor_state(const std::string& label, const NodeParams& params) {
  StateVector x(static_cast<Eigen::Index>(label.size()));
  for (std::size_t i = 0; i < label.size(); ++i) x[static_cast<Eigen::Index>(i)] = anchor_value(label[i], params);
  return x;
}

namespace {

std::vector<std::string> all_labels(std::size_t n) {
  std::vector<std::string> labels{""};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> next;
    for (const auto& prefix : labels) {
      for (char c : {'Q', 'S', 'A'}) next.push_back(prefix + c);
    }
    labels = std::move(next);
  }
  return labels;
}

struct Head {
  std::size_t branch = 0;
  double beta = 0.0;
  StateVector x;
  double beta_prev = 0.0;
  StateVector x_prev;
  bool alive = true;
};

double distance(const StateVector& a, const StateVector& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

StateVector predict(const Head& h, double beta) {
  StateVector guess = h.x;
  if (h.x_prev.size() > 0 && h.beta > h.beta_prev) {
    guess += (h.x - h.x_prev) * ((beta - h.beta) / (h.beta - h.beta_prev));
  }
  return guess;
}

// Newton at `beta` from `guess`; moves the head there if the root lies within
// `tolerance` of `reference`.
bool try_step(Head& h, double beta, const StateVector& guess, const StateVector& reference,
              double tolerance, const NodeParams& params, const Network& net,
              const ContinuationOptions& options) {
  try {
    StateVector x = newton_root(guess, params, net.with_beta(beta), options.newton);
    if (distance(x, reference) > tolerance) return false;
    h.x_prev = std::move(h.x);
    h.beta_prev = h.beta;
    h.x = std::move(x);
    h.beta = beta;
    return true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::SingularJacobian) throw;
    return false;
  }
}

// A smooth branch can pass a point where the Jacobian is singular because some
// other node's equation bifurcates there. Newton stalls next to it, so try a
// few longer steps along the secant before giving up. Past a fold there is
// nothing near the prediction and every leap fails.
double leap(Head& h, double target, const NodeParams& params, const Network& net,
            const ContinuationOptions& options) {
  for (double length : {10.0, 100.0, 1000.0}) {
    const double span = length * options.min_step;
    if (h.beta + span < target) {
      const double beta = h.beta + span;
      const StateVector guess = predict(h, beta);
      if (try_step(h, beta, guess, guess, 10.0 * span, params, net, options)) return span;
      continue;
    }
    // The singular point may sit on the target itself: converge beyond it,
    // interpolate back and polish with least-squares steps.
    Head ahead = h;
    const double beta = h.beta + span;
    const StateVector guess = predict(h, beta);
    if (!try_step(ahead, beta, guess, guess, 10.0 * span, params, net, options)) continue;
    const double w = (target - h.beta) / span;
    StateVector x = (1.0 - w) * h.x + w * ahead.x;
    const Network at = net.with_beta(target);
    for (int it = 0; it < 50; ++it) {
      const StateVector f = drift(x, params, at);
      if (f.lpNorm<Eigen::Infinity>() < options.newton.tolerance) break;
      x -= drift_jacobian(x, params, at).completeOrthogonalDecomposition().solve(f);
    }
    if (!(drift(x, params, at).lpNorm<Eigen::Infinity>() < options.newton.tolerance)) continue;
    if (distance(x, ahead.x) > 10.0 * span) continue;
    h.x_prev = std::move(h.x);
    h.beta_prev = h.beta;
    h.x = std::move(x);
    h.beta = target;
    return target - h.beta_prev;
  }
  return 0.0;
}

// Moves one head to `target` with secant prediction and step halving.
// On failure the head keeps its last converged state and is marked dead.
void advance(Head& h, double target, const NodeParams& params, const Network& net,
             const ContinuationOptions& options) {
  double step = target - h.beta;
  while (h.beta < target) {
    step = std::min(step, target - h.beta);
    const double beta = target - h.beta <= step ? target : h.beta + step;
    const StateVector from = h.x;
    if (try_step(h, beta, predict(h, beta), from, options.max_jump, params, net, options)) {
      step *= 2.0;
      continue;
    }
    step *= 0.5;
    if (step < options.min_step) {
      step = leap(h, target, params, net, options);
      if (step == 0.0) {
        h.alive = false;
        return;
      }
    }
  }
}

std::vector<Head> seed_heads(const NodeParams& params, const Network& net,
                             const ContinuationOptions& options) {
  const Network uncoupled = net.with_beta(0.0);
  std::vector<Head> heads;
  std::size_t b = 0;
  for (const auto& label : all_labels(net.n_nodes())) {
    Head h;
    h.branch = b++;
    h.x = newton_root(anchor_state(label, params), params, uncoupled, options.newton);
    heads.push_back(std::move(h));
  }
  return heads;
}

std::vector<Equilibrium> distinct(const std::vector<Head>& heads, double beta,
                                  const NodeParams& params, const Network& net,
                                  const ContinuationOptions& options) {
  const Network at = net.with_beta(beta);
  std::vector<Equilibrium> out;
  for (const auto& h : heads) {
    if (!h.alive) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return distance(e.x, h.x) < options.coincidence;
    });
    if (!seen) out.push_back(classify(h.x, params, at));
  }
  return out;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "beta grid must start at 0");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidArgument, "beta grid must increase");
  }
}

// Continues every head along the grid, recording each grid point via `visit`.
template <class Visit>
void sweep(std::vector<Head>& heads, std::span<const double> grid, const NodeParams& params,
           const Network& net, const ContinuationOptions& options, Visit&& visit) {
  const std::size_t n = heads.size();
  std::vector<char> pending(n * n, 0);
  std::vector<double> moved(n, 0.0);
  visit(std::size_t{0}, std::vector<std::size_t>{}, std::vector<std::size_t>{});
  for (std::size_t k = 1; k < grid.size(); ++k) {
    std::vector<std::size_t> ended;
    for (auto& h : heads) {
      if (!h.alive) continue;
      const StateVector before = h.x;
      advance(h, grid[k], params, net, options);
      if (!h.alive) {
        ended.push_back(h.branch);
        continue;
      }
      moved[h.branch] = distance(h.x, before);
    }

    // Two heads on one equilibrium at consecutive grid points: drop the mover.
    std::vector<char> now(n * n, 0);
    std::vector<std::size_t> merged;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n && heads[a].alive; ++b) {
        if (!heads[b].alive || distance(heads[a].x, heads[b].x) >= options.coincidence) continue;
        if (!pending[a * n + b]) {
          now[a * n + b] = 1;
          continue;
        }
        const std::size_t drop = moved[a] > moved[b] ? a : b;
        heads[drop].alive = false;
        merged.push_back(drop);
      }
    }
    pending = std::move(now);
    visit(k, ended, merged);
  }
}

}  // namespace

std::vector<Branch> continue_branches(const NodeParams& params, const Network& net,
                                      std::span<const double> beta_grid,
                                      const ContinuationOptions& options) {
  check_grid(beta_grid);
  std::vector<Head> heads = seed_heads(params, net, options);
  std::vector<Branch> branches;
  for (const auto& label : all_labels(net.n_nodes())) branches.push_back({label, {}, std::nullopt});

  auto record = [&](std::size_t k) {
    const Network at = net.with_beta(beta_grid[k]);
    for (const auto& h : heads) {
      if (h.alive) branches[h.branch].points.push_back({beta_grid[k], classify(h.x, params, at)});
    }
  };
  auto visit = [&](std::size_t k, const std::vector<std::size_t>& ended,
                   const std::vector<std::size_t>& merged) {
    for (std::size_t b : ended) {
      // Keep the last converged sub-step; it marks the fold tip.
      const Head& h = heads[b];
      auto& br = branches[b];
      if (br.points.empty() || h.beta > br.points.back().beta) {
        br.points.push_back({h.beta, classify(h.x, params, net.with_beta(h.beta))});
      }
      br.end_beta = br.points.back().beta;
    }
    for (std::size_t b : merged) {
      // Its previous grid point already sat on the survivor; drop that too.
      auto& br = branches[b];
      if (!br.points.empty()) br.points.pop_back();
      br.end_beta = br.points.empty() ? 0.0 : br.points.back().beta;
    }
    record(k);
  };
  sweep(heads, beta_grid, params, net, options, visit);
  return branches;
}

namespace {

std::vector<double> uniform_grid(double max, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = max * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.back() = max;
  return grid;
}

}  // namespace

Equilibrium labelled_equilibrium(const NodeParams& params, const Network& net,
                                 const std::string& label, const ContinuationOptions& options) {
  if (label.size() != net.n_nodes()) {
    throw Error(ErrorKind::DimensionMismatch, "label " + label + " does not match the network size");
  }
  anchor_state(label, params);
  const double beta = net.beta();
  const auto points = static_cast<std::size_t>(std::ceil(beta / 1e-3)) + 1;
  const auto grid = beta > 0.0 ? uniform_grid(beta, std::max<std::size_t>(points, 2))
                               : std::vector<double>{0.0};
  for (const auto& br : continue_branches(params, net, grid, options)) {
    if (br.label != label) continue;
    if (br.end_beta || br.points.empty() || br.points.back().beta != beta) break;
    return br.points.back().eq;
  }
  throw Error(ErrorKind::MissingEquilibrium,
              "x_" + label + " does not exist at beta = " + std::to_string(beta));
}

std::vector<Equilibrium> equilibria_at(const NodeParams& params, const Network& net, double beta,
                                       const ContinuationOptions& options) {
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be >= 0");
  std::vector<Head> heads = seed_heads(params, net, options);
  if (beta > 0.0) {
    const auto points = static_cast<std::size_t>(std::ceil(beta / 2e-3)) + 1;
    const auto grid = uniform_grid(beta, std::max<std::size_t>(points, 2));
    sweep(heads, grid, params, net, options,
          [](std::size_t, const std::vector<std::size_t>&, const std::vector<std::size_t>&) {});
  }
  return distinct(heads, beta, params, net, options);
}

Census census(std::span<const Equilibrium> equilibria) {
  Census c;
  for (const auto& eq : equilibria) {
    ++c.total;
    const double spread = eq.x.maxCoeff() - eq.x.minCoeff();
    if (spread <= 1e-6) continue;
    ++c.split;
    if (eq.kind == StabilityKind::Sink) ++c.split_sinks;
  }
  return c;
}

SaddleNodeResidual saddle_node_residual(double beta, const NodeParams& params) {
  const double nu = params.nu();
  const double c = nu + 1.0 / 3.0;
  const double body =
      ((-27.0 * beta + (27.0 * nu + 9.0)) * beta - 9.0 * c * c) * beta;
  return {body + nu * (nu - 1.0), body + nu * (1.0 - nu)};
}

double saddle_node_root(const NodeParams& params, bool corrected) {
  auto g = [&](double beta) {
    const auto r = saddle_node_residual(beta, params);
    return corrected ? r.corrected : r.printed;
  };
  constexpr int kScan = 10000;
  double lo = 0.0;
  double g_lo = g(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double hi = static_cast<double>(k) / kScan;
    const double g_hi = g(hi);
    if (g_hi == 0.0) return hi;
    if ((g_lo < 0.0) != (g_hi < 0.0)) {
      double a = lo, b = hi, ga = g_lo;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    g_lo = g_hi;
  }
  throw Error(ErrorKind::BoundaryNotBracketed,
              std::string(corrected ? "corrected" : "printed") + " fold cubic has no root in (0, 1]");
}

double beta2_pitchfork(const NodeParams& params) {
  const double nu = params.nu();
  const double s = std::sqrt(nu);
  const double denominator = 1.0 - 3.0 * s;
  if (std::fabs(denominator) < 1e-12) {
    throw Error(ErrorKind::DegenerateDenominator, "pitchfork formula is singular at nu = 1/9");
  }
  return (s - 4.0 * nu + 3.0 * nu * s) / denominator;
}

RegimeBoundaries detect_boundaries(const NodeParams& params, const Network& net,
                                   const BetaRange& range, const ContinuationOptions& options) {
  if (!(range.min >= 0.0) || !(range.max > range.min) || range.points < 2) {
    throw Error(ErrorKind::InvalidArgument, "beta range must satisfy 0 <= min < max with >= 2 points");
  }
  const auto grid = uniform_grid(range.max, std::max<std::size_t>(range.points, 2));

  std::vector<Head> heads = seed_heads(params, net, options);
  std::vector<std::vector<Head>> snapshots;
  std::vector<Census> counts;
  sweep(heads, grid, params, net, options,
        [&](std::size_t k, const std::vector<std::size_t>&, const std::vector<std::size_t>&) {
          snapshots.push_back(heads);
          counts.push_back(census(distinct(heads, grid[k], params, net, options)));
        });

  auto census_at = [&](std::size_t k, double beta) {
    std::vector<Head> moved = snapshots[k];
    for (auto& h : moved) {
      if (h.alive) advance(h, beta, params, net, options);
    }
    return census(distinct(moved, beta, params, net, options));
  };
  // Refines a change inside (grid[k-1], grid[k]].
  auto refine = [&](std::size_t k, auto&& changed) {
    double lo = grid[k - 1];
    double hi = grid[k];
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      (changed(census_at(k - 1, mid)) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto bracketed = [&](double beta, const char* name) {
    if (beta < range.min) {
      throw Error(ErrorKind::BoundaryNotBracketed, std::string(name) + " = " + std::to_string(beta) +
                                                       " lies below the beta range");
    }
    return beta;
  };

  const Census uncoupled = counts.front();
  std::size_t first = 0;
  for (std::size_t k = 1; k < counts.size() && !first; ++k) {
    if (!(counts[k] == uncoupled)) first = k;
  }
  if (!first) throw Error(ErrorKind::BoundaryNotBracketed, "census never changes in the beta range");
  const double beta1 =
      bracketed(refine(first, [&](const Census& c) { return !(c == uncoupled); }), "beta1");

  // Last grid index after which the count stays zero.
  auto vanish = [&](auto&& count, const char* name) {
    if (count(counts.back()) != 0) {
      throw Error(ErrorKind::BoundaryNotBracketed, std::string(name) + " lies above the beta range");
    }
    std::size_t k = counts.size() - 1;
    while (k > 0 && count(counts[k - 1]) == 0) --k;
    if (k == 0) throw Error(ErrorKind::BoundaryNotBracketed, std::string(name) + " not found");
    return bracketed(refine(k, [&](const Census& c) { return count(c) == 0; }), name);
  };
  const double sinks_gone = vanish([](const Census& c) { return c.split_sinks; }, "beta2");
  const double split_gone = vanish([](const Census& c) { return c.split; }, "beta3");

  if (std::fabs(sinks_gone - beta1) < 1e-6) return {beta1, split_gone, std::nullopt};
  return {beta1, sinks_gone, split_gone};
}

}  // namespace domino
