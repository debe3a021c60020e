#include "domino/sde.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "domino/error.hpp"
#include "domino/rng.hpp"

namespace domino {

namespace {

// In-neighbour lists flattened and sorted by source index. Both integration
// paths below sum couplings in exactly this order, which is what makes a
// lane-batched sample bit-identical to the same sample run alone.
struct Coupling {
  explicit Coupling(const Network& net) : beta(net.beta()) {
    offsets.push_back(0);
    for (auto nbrs : net.in_neighbours()) {
      std::sort(nbrs.begin(), nbrs.end());
      for (int j : nbrs) sources.push_back(static_cast<std::size_t>(j));
      offsets.push_back(sources.size());
    }
  }
  double beta;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> sources;
};

void drift_into(const double* x, double* out, std::size_t n, double nu,
                const Coupling& c) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    double coupling = 0.0;
    for (std::size_t k = c.offsets[i]; k < c.offsets[i + 1]; ++k) coupling += x[c.sources[k]] - x[i];
    out[i] = node_drift(x[i], nu) + c.beta * coupling;
  }
}

// Single-state Heun step. Returns false if any coordinate of `next` is not finite.
bool heun_into(const double* x, const double* dW, double* next, std::size_t n, double nu,
               double alpha, double dt, const Coupling& c, std::vector<double>& scratch) {
  scratch.resize(3 * n);
  double* f0 = scratch.data();
  double* predictor = f0 + n;
  double* f1 = predictor + n;
  drift_into(x, f0, n, nu, c);
  for (std::size_t i = 0; i < n; ++i) predictor[i] = x[i] + f0[i] * dt + alpha * dW[i];
  drift_into(predictor, f1, n, nu, c);
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = x[i] + 0.5 * (f0[i] + f1[i]) * dt + alpha * dW[i];
    finite = finite && std::isfinite(next[i]);
  }
  return finite;
}

// Wiener increment over one step. With m noise substeps it is assembled from m
// standard normals per node, drawn substep-major; a run at dt/m with one
// substep then sees exactly the same Brownian path.
class BrownianIncrement {
 public:
  explicit BrownianIncrement(const SimulationConfig& config)
      : substeps_(config.noise_substeps),
        scale_(std::sqrt(config.dt / static_cast<double>(config.noise_substeps))) {}

  template <class Out>
  void draw(SampleNoise& noise, Out& dW) const {
    const std::size_t n = std::size(dW);
    if (substeps_ == 1) {
      for (std::size_t i = 0; i < n; ++i) dW[i] = scale_ * noise();
      return;
    }
    for (std::size_t i = 0; i < n; ++i) dW[i] = 0.0;
    for (std::size_t s = 0; s < substeps_; ++s) {
      for (std::size_t i = 0; i < n; ++i) dW[i] += noise();
    }
    for (std::size_t i = 0; i < n; ++i) dW[i] *= scale_;
  }

 private:
  std::size_t substeps_;
  double scale_;
};

std::uint64_t step_limit(const SimulationConfig& config) {
  return static_cast<std::uint64_t>(std::ceil(config.t_max / config.dt));
}

// Integrates `Lanes` independent samples in lock-step, structure-of-arrays,
// so the per-step dependency chain of one sample overlaps with the others.
// A lane that finishes is immediately refilled with the next sample index.
template <std::size_t Nodes, std::size_t Lanes>
class LaneBatch {
 public:
  LaneBatch(const NodeParams& params, const Network& net, const SimulationConfig& config)
      : params_(params),
        config_(config),
        coupling_(net),
        alpha_(net.alpha()),
        max_steps_(step_limit(config)),
        noise_(Lanes, SampleNoise(config.master_seed, 0)) {}

  void run(std::size_t begin, std::size_t end, std::vector<SampleResult>& out) {
    next_index_ = begin;
    end_index_ = end;
    std::size_t active = 0;
    for (std::size_t l = 0; l < Lanes; ++l) active += load(l) ? 1 : 0;
    refresh_deadline();

    const BrownianIncrement increment(config_);
    std::array<double, Nodes> dW{};
    while (active > 0) {
      // Idle lanes keep drawing from a stale stream; their state is discarded.
      for (std::size_t l = 0; l < Lanes; ++l) {
        increment.draw(noise_[l], dW);
        for (std::size_t i = 0; i < Nodes; ++i) dW_[i][l] = dW[i];
      }
      step();
      ++clock_;

      // Common case: nobody crossed a watermark, nobody hit t_max.
      int flagged = 0;
      for (std::size_t i = 0; i < Nodes; ++i) {
        for (std::size_t l = 0; l < Lanes; ++l) flagged |= !(next_[i][l] <= watermark_[i][l]);
      }
      const bool attention = flagged != 0 || clock_ >= next_deadline_;
      if (!attention) {
        x_ = next_;
        continue;
      }

      for (std::size_t l = 0; l < Lanes; ++l) {
        if (!lanes_[l].active) continue;
        if (!advance(l)) {
          out[lanes_[l].index] = finish(l);
          if (!load(l)) --active;
        }
      }
      for (std::size_t l = 0; l < Lanes; ++l) {
        if (!lanes_[l].active) {
          for (std::size_t i = 0; i < Nodes; ++i) x_[i][l] = params_.x_quiescent();
        }
      }
      refresh_deadline();
    }
  }

 private:
  struct Lane {
    bool active = false;
    std::optional<EscapeDetector> detector;
    std::optional<std::string> fault;
    std::size_t index = 0;
    std::uint64_t start = 0;  // clock_ value when the sample was loaded
  };

  using Block = std::array<std::array<double, Lanes>, Nodes>;
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  bool load(std::size_t l) {
    Lane& lane = lanes_[l];
    for (std::size_t i = 0; i < Nodes; ++i) {
      x_[i][l] = params_.x_quiescent();
      watermark_[i][l] = kNever;
    }
    if (next_index_ >= end_index_) {
      lane.active = false;
      return false;
    }
    lane.active = true;
    lane.index = next_index_++;
    noise_[l] = SampleNoise(config_.master_seed, lane.index);
    lane.detector.emplace(Nodes, config_.xi);
    lane.fault.reset();
    lane.start = clock_;
    for (std::size_t i = 0; i < Nodes; ++i) watermark_[i][l] = config_.xi;
    return true;
  }

  void refresh_deadline() {
    next_deadline_ = std::numeric_limits<std::uint64_t>::max();
    for (const Lane& lane : lanes_) {
      if (lane.active) next_deadline_ = std::min(next_deadline_, lane.start + max_steps_);
    }
  }

  void drift(const Block& x, Block& out) const noexcept {
    const double nu = params_.nu();
    for (std::size_t i = 0; i < Nodes; ++i) {
      std::array<double, Lanes> coupling{};
      for (std::size_t k = coupling_.offsets[i]; k < coupling_.offsets[i + 1]; ++k) {
        const auto& src = x[coupling_.sources[k]];
        for (std::size_t l = 0; l < Lanes; ++l) coupling[l] += src[l] - x[i][l];
      }
      for (std::size_t l = 0; l < Lanes; ++l) {
        out[i][l] = node_drift(x[i][l], nu) + coupling_.beta * coupling[l];
      }
    }
  }

  void step() noexcept {
    const double dt = config_.dt;
    drift(x_, f0_);
    for (std::size_t i = 0; i < Nodes; ++i) {
      for (std::size_t l = 0; l < Lanes; ++l) {
        predictor_[i][l] = x_[i][l] + f0_[i][l] * dt + alpha_ * dW_[i][l];
      }
    }
    drift(predictor_, f1_);
    for (std::size_t i = 0; i < Nodes; ++i) {
      for (std::size_t l = 0; l < Lanes; ++l) {
        next_[i][l] = x_[i][l] + 0.5 * (f0_[i][l] + f1_[i][l]) * dt + alpha_ * dW_[i][l];
      }
    }
  }

  // Commits the step just taken by lane l. Returns false once its sample is done.
  bool advance(std::size_t l) {
    Lane& lane = lanes_[l];
    const std::uint64_t steps_before = clock_ - 1 - lane.start;
    const double t = static_cast<double>(steps_before) * config_.dt;
    std::array<double, Nodes> prev{};
    std::array<double, Nodes> cur{};
    bool finite = true;
    for (std::size_t i = 0; i < Nodes; ++i) {
      prev[i] = x_[i][l];
      cur[i] = next_[i][l];
      finite = finite && std::isfinite(cur[i]);
    }
    if (!finite) {
      lane.fault = IntegrationFault(t + config_.dt, "non-finite state").what();
      return false;
    }
    lane.detector->observe(prev, cur, t, config_.dt);
    for (std::size_t i = 0; i < Nodes; ++i) {
      x_[i][l] = cur[i];
      if (lane.detector->times()[i]) watermark_[i][l] = kNever;
    }
    return steps_before + 1 < max_steps_ && !lane.detector->all_escaped();
  }

  SampleResult finish(std::size_t l) {
    Lane& lane = lanes_[l];
    SampleResult result;
    result.sample_index = lane.index;
    result.record = build_record(lane.detector->times(), config_.t_max);
    result.fault = lane.fault;
    return result;
  }

  const NodeParams& params_;
  const SimulationConfig& config_;
  Coupling coupling_;
  double alpha_;
  std::uint64_t max_steps_;
  std::uint64_t clock_ = 0;
  std::uint64_t next_deadline_ = 0;
  std::size_t next_index_ = 0;
  std::size_t end_index_ = 0;
  std::vector<SampleNoise> noise_;
  std::array<Lane, Lanes> lanes_;
  Block x_{}, next_{}, dW_{}, f0_{}, f1_{}, predictor_{}, watermark_{};
};

constexpr std::size_t kLanes = 8;

// Returns false when the node count has no batched kernel.
bool run_batched(const NodeParams& params, const Network& net, const SimulationConfig& config,
                 std::size_t begin, std::size_t end, std::vector<SampleResult>& out) {
  auto go = [&]<std::size_t N>() {
    LaneBatch<N, kLanes>(params, net, config).run(begin, end, out);
    return true;
  };
  switch (net.n_nodes()) {
    case 1: return go.template operator()<1>();
    case 2: return go.template operator()<2>();
    case 3: return go.template operator()<3>();
    case 4: return go.template operator()<4>();
    default: return false;
  }
}

}  // namespace

void SimulationConfig::validate(const NodeParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw Error(ErrorKind::InvalidArgument, "t_max must be > 0");
  }
  if (t_max >= 268435456.0) throw Error(ErrorKind::InvalidArgument, "t_max must be < 2^28");
  if (n_samples == 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  if (path_stride == 0) throw Error(ErrorKind::InvalidArgument, "path_stride must be >= 1");
  if (noise_substeps == 0) throw Error(ErrorKind::InvalidArgument, "noise_substeps must be >= 1");
  if (!(xi > params.x_saddle() && xi < params.x_active())) {
    throw Error(ErrorKind::InvalidArgument,
                "xi must lie strictly between sqrt(nu) and 1, got " + std::to_string(xi));
  }
}

StateVector heun_step(const StateVector& x, const NodeParams& params, const Network& net,
                      double dt, const StateVector& dW, double t) {
  const std::size_t n = net.n_nodes();
  if (static_cast<std::size_t>(x.size()) != n || static_cast<std::size_t>(dW.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "heun_step: state/noise size differs from network");
  }
  Coupling coupling(net);
  std::vector<double> scratch;
  StateVector next(x.size());
  if (!heun_into(x.data(), dW.data(), next.data(), n, params.nu(), net.alpha(), dt, coupling,
                 scratch)) {
    throw IntegrationFault(t + dt, "non-finite state");
  }
  return next;
}

SampleResult run_sample(const NodeParams& params, const Network& net,
                        const SimulationConfig& config, std::size_t sample_index) {
  config.validate(params);
  const std::size_t n = net.n_nodes();
  const double dt = config.dt;
  const BrownianIncrement increment(config);
  const std::uint64_t max_steps = step_limit(config);

  Coupling coupling(net);
  std::vector<double> scratch;
  SampleNoise noise(config.master_seed, sample_index);
  EscapeDetector detector(n, config.xi);

  std::vector<double> x(n, params.x_quiescent());
  std::vector<double> next(n);
  std::vector<double> dW(n);

  SampleResult result;
  result.sample_index = sample_index;
  if (config.record_paths) {
    result.path.emplace();
    result.path->times.push_back(0.0);
    result.path->states.push_back(Eigen::Map<const StateVector>(x.data(), n));
  }

  for (std::uint64_t step = 0; step < max_steps && !detector.all_escaped(); ++step) {
    const double t = static_cast<double>(step) * dt;
    increment.draw(noise, dW);
    if (!heun_into(x.data(), dW.data(), next.data(), n, params.nu(), net.alpha(), dt, coupling,
                   scratch)) {
      result.fault = IntegrationFault(t + dt, "non-finite state").what();
      break;
    }
    detector.observe(x, next, t, dt);
    x.swap(next);
    if (result.path && (step + 1) % config.path_stride == 0) {
      result.path->times.push_back(static_cast<double>(step + 1) * dt);
      result.path->states.push_back(Eigen::Map<const StateVector>(x.data(), n));
    }
  }

  result.record = build_record(detector.times(), config.t_max);
  return result;
}

Ensemble monte_carlo(const NodeParams& params, const Network& net,
                     const SimulationConfig& config, unsigned threads) {
  config.validate(params);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_samples));

  Ensemble ensemble;
  ensemble.samples.resize(config.n_samples);

  // Each chunk writes only its own slots; the output order is the sample
  // order whatever the schedule. Large chunks keep idle lanes at chunk tails rare.
  const std::size_t kChunk =
      std::clamp<std::size_t>(config.n_samples / (4 * std::size_t{threads}), 64, 4096);
  std::atomic<std::size_t> next_chunk{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next_chunk.fetch_add(kChunk);
      if (begin >= config.n_samples) return;
      const std::size_t end = std::min(begin + kChunk, config.n_samples);
      if (!config.record_paths && run_batched(params, net, config, begin, end, ensemble.samples)) {
        continue;
      }
      for (std::size_t s = begin; s < end; ++s) {
        ensemble.samples[s] = run_sample(params, net, config, s);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  for (const auto& s : ensemble.samples) {
    if (s.record.censored()) ++ensemble.n_censored;
    if (s.fault) ++ensemble.n_faulted;
  }
  return ensemble;
}

}  // namespace domino
