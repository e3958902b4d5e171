#include "latticesir/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>

#include "latticesir/error.hpp"

namespace latticesir {

const char* to_string(SimMode mode) { return mode == SimMode::linear ? "linear" : "clamped"; }

std::int64_t SimState::population() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < S.size(); ++i) total += S[i] + I[i] + R[i];
  return total;
}

namespace {

constexpr std::uint64_t kRefreshPeriod = 8192;

double site_rate_of(const SimState& state, const Rates& rates, SimMode mode, std::int64_t i) {
  double moving = static_cast<double>(std::abs(state.S[i]) + state.I[i] + state.R[i]);
  double infected = static_cast<double>(state.I[i]);
  double infection = rates.beta * infected;
  if (mode == SimMode::clamped && state.S[i] <= 0) infection = 0.0;
  return rates.kappa * moving + infection + rates.gamma * infected;
}

void refresh_rates(SimState& state, const Rates& rates, SimMode mode) {
  auto N = state.lattice.sites();
  state.site_rate.assign(N, 0.0);
  long double total = 0.0L;
  for (std::int64_t i = 0; i < N; ++i) {
    state.site_rate[i] = site_rate_of(state, rates, mode, i);
    total += state.site_rate[i];
  }
  state.total_rate = static_cast<double>(total);
  state.refresh_countdown = kRefreshPeriod;
}

void bump_site(SimState& state, const Rates& rates, SimMode mode, std::int64_t i) {
  double fresh = site_rate_of(state, rates, mode, i);
  state.total_rate += fresh - state.site_rate[i];
  state.site_rate[i] = fresh;
}

struct EventRecord {
  enum Kind { move_S, move_I, move_R, infect, recover } kind = infect;
  std::int64_t site = 0;
  std::int64_t dest = 0;
};

std::int64_t kernel_destination(SimState& state, const MobilityKernel& kernel,
                                std::int64_t from) {
  double u = state.rng.u01();
  Offset c = site_coords(from, state.lattice);
  double acc = 0.0;
  std::size_t pick = kernel.support.size() - 1;
  for (std::size_t e = 0; e < kernel.support.size(); ++e) {
    acc += kernel.support[e].w;
    if (u <= acc) {
      pick = e;
      break;
    }
  }
  const Offset& z = kernel.support[pick].z;
  return site_index(Offset{c[0] + z[0], c[1] + z[1], c[2] + z[2]}, state.lattice);
}

double step_impl(SimState& state, const Rates& rates, const MobilityKernel& kernel,
                 SimMode mode, EventRecord* record) {
  if (kernel.d != state.lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (state.refresh_countdown == 0) refresh_rates(state, rates, mode);
  if (!(state.total_rate > 0.0))
    fail(ErrorCode::Extinct, "no event can fire; chain is frozen");

  double dt = state.rng.exponential(state.total_rate);

  auto N = state.lattice.sites();
  double u = state.rng.u01() * state.total_rate;
  std::int64_t site = -1;
  double acc = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    acc += state.site_rate[i];
    if (u <= acc && state.site_rate[i] > 0.0) {
      site = i;
      break;
    }
  }
  if (site < 0) {  // rounding fell off the end; take the last active site
    for (std::int64_t i = N - 1; i >= 0; --i)
      if (state.site_rate[i] > 0.0) {
        site = i;
        break;
      }
  }

  // channel split within the site, reusing the residual of the scan draw
  double r = u - (acc - state.site_rate[site]);
  double infected = static_cast<double>(state.I[site]);
  double rate_infect = rates.beta * infected;
  if (mode == SimMode::clamped && state.S[site] <= 0) rate_infect = 0.0;
  const double channel[5] = {rates.kappa * static_cast<double>(std::abs(state.S[site])),
                             rates.kappa * infected,
                             rates.kappa * static_cast<double>(state.R[site]),
                             rate_infect, rates.gamma * infected};
  int pick = -1;
  double cacc = 0.0;
  for (int k = 0; k < 5; ++k) {
    cacc += channel[k];
    if (r <= cacc && channel[k] > 0.0) {
      pick = k;
      break;
    }
  }
  if (pick < 0) {  // rounding spill; take the last active channel
    for (int k = 4; k >= 0; --k)
      if (channel[k] > 0.0) {
        pick = k;
        break;
      }
  }

  EventRecord ev;
  ev.site = site;
  ev.dest = site;
  switch (pick) {
    case 0: {
      ev.kind = EventRecord::move_S;
      ev.dest = kernel_destination(state, kernel, site);
      std::int64_t unit = state.S[site] > 0 ? 1 : -1;  // signed unit keeps E[S] exact
      state.S[site] -= unit;
      state.S[ev.dest] += unit;
      break;
    }
    case 1:
      ev.kind = EventRecord::move_I;
      ev.dest = kernel_destination(state, kernel, site);
      --state.I[site];
      ++state.I[ev.dest];
      break;
    case 2:
      ev.kind = EventRecord::move_R;
      ev.dest = kernel_destination(state, kernel, site);
      --state.R[site];
      ++state.R[ev.dest];
      break;
    case 3:
      ev.kind = EventRecord::infect;
      --state.S[site];
      ++state.I[site];
      break;
    default:
      ev.kind = EventRecord::recover;
      --state.I[site];
      ++state.R[site];
      break;
  }

  bump_site(state, rates, mode, site);
  if (ev.dest != site) bump_site(state, rates, mode, ev.dest);
  --state.refresh_countdown;

  state.clock += dt;
  ++state.events;
  if (record) *record = ev;
  return dt;
}

}  // namespace

SimState init_state(const LatticeSpec& lattice, const Rates& rates, std::uint64_t seed) {
  double density = rates.rho0;
  if (density != std::floor(density))
    fail(ErrorCode::NonIntegerDensity, "rho0 must be an integer occupancy for simulation");
  SimState state(lattice, seed);
  std::int64_t s0 = static_cast<std::int64_t>(density);
  for (auto& s : state.S) s = s0;
  state.I[site_index(Offset{0, 0, 0}, lattice)] = 1;
  // rates are derived lazily by step(), which knows the mode
  state.refresh_countdown = 0;
  return state;
}

double step(SimState& state, const Rates& rates, const MobilityKernel& kernel, SimMode mode) {
  return step_impl(state, rates, kernel, mode, nullptr);
}

std::vector<SimState> run(SimState state, const Rates& rates, const MobilityKernel& kernel,
                          SimMode mode, double horizon, std::span<const double> snapshot_times,
                          std::uint64_t event_budget) {
  if (horizon < 0.0) fail(ErrorCode::NegativeTime, "horizon must be >= 0");
  std::vector<double> snaps(snapshot_times.begin(), snapshot_times.end());
  if (snaps.empty()) snaps.push_back(horizon);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    if (snaps[k] < 0.0 || (k > 0 && snaps[k] < snaps[k - 1]))
      fail(ErrorCode::ValidationError, "snapshot times must be nonnegative and nondecreasing");
  }

  refresh_rates(state, rates, mode);

  std::vector<SimState> out;
  std::size_t next = 0;
  while (next < snaps.size() && snaps[next] <= state.clock) out.push_back(state), ++next;

  while (state.clock < horizon && state.total_rate > 0.0) {
    if (state.events >= event_budget)
      fail(ErrorCode::EventBudgetExceeded, "event budget exhausted before the horizon");
    if (next < snaps.size()) {
      SimState before = state;
      step_impl(state, rates, kernel, mode, nullptr);
      while (next < snaps.size() && snaps[next] <= state.clock) {
        out.push_back(before);  // state at the last event strictly before the snapshot
        ++next;
      }
    } else {
      step_impl(state, rates, kernel, mode, nullptr);
    }
  }
  while (next < snaps.size()) out.push_back(state), ++next;
  return out;
}

namespace {

std::string offset_text(const Offset& x, int d) {
  std::string s;
  for (int a = 0; a < d; ++a) {
    if (a) s += ',';
    s += std::to_string(x[a]);
  }
  return s;
}

std::size_t worker_count(std::size_t replicas) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("LATTICESIR_THREADS")) {
    char* end = nullptr;
    unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<std::size_t>(n, cap);
  }
  return std::min(n, replicas);
}

}  // namespace

std::vector<McEstimate> mc_moments(const McConfig& config, const Rates& rates,
                                   const MobilityKernel& kernel, SimMode mode, double t,
                                   std::size_t replicas, std::uint64_t seed_base) {
  if (kernel.d != config.lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (replicas < 100)
    fail(ErrorCode::ValidationError, "need at least 100 replicas for stable errors");

  struct Target {
    std::string name;
    std::int64_t a = 0, b = -1;  // site indices; b >= 0 marks a pair product
    int field = 0;               // 0 = S, 1 = I, 2 = R
  };
  std::vector<Target> targets;
  for (const auto& x : config.sites) {
    auto i = site_index(x, config.lattice);
    std::string tag = offset_text(x, config.lattice.d);
    targets.push_back({"m1_S[" + tag + "]", i, -1, 0});
    targets.push_back({"m1_I[" + tag + "]", i, -1, 1});
    targets.push_back({"m1_R[" + tag + "]", i, -1, 2});
  }
  for (const auto& [x, y] : config.pairs) {
    auto i = site_index(x, config.lattice);
    auto j = site_index(y, config.lattice);
    targets.push_back({"m2_II[" + offset_text(x, config.lattice.d) + ";" +
                           offset_text(y, config.lattice.d) + "]",
                       i, j, 1});
  }
  if (targets.empty()) return {};

  const std::size_t Q = targets.size();
  std::vector<double> samples(replicas * Q);

  auto run_replica = [&](std::size_t r) {
    SimState state = init_state(config.lattice, rates, replica_seed(seed_base, r));
    refresh_rates(state, rates, mode);
    while (state.total_rate > 0.0) {
      if (state.events >= config.event_budget)
        fail(ErrorCode::EventBudgetExceeded, "event budget exhausted before t");
      SimState before = state;
      step_impl(state, rates, kernel, mode, nullptr);
      if (state.clock > t) {
        state = std::move(before);  // state at time t is the pre-event state
        break;
      }
    }
    auto value_of = [&](const Target& g, std::int64_t site) -> double {
      const auto& f = g.field == 0 ? state.S : (g.field == 1 ? state.I : state.R);
      return static_cast<double>(f[site]);
    };
    for (std::size_t q = 0; q < Q; ++q) {
      const Target& g = targets[q];
      double v = value_of(g, g.a);
      if (g.b >= 0) v *= value_of(g, g.b);
      samples[r * Q + q] = v;
    }
  };

  std::size_t workers = worker_count(replicas);
  if (workers <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) run_replica(r);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto drain = [&] {
      for (;;) {
        std::size_t r = cursor.fetch_add(1);
        if (r >= replicas) return;
        try {
          run_replica(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // fixed replica order, compensated, so the result is scheduling-independent
  std::vector<McEstimate> out;
  for (std::size_t q = 0; q < Q; ++q) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
      double y = samples[r * Q + q] - comp;
      double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
    }
    double mean = sum / static_cast<double>(replicas);
    double ss = 0.0, ss_comp = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
      double d = samples[r * Q + q] - mean;
      double y = d * d - ss_comp;
      double s = ss + y;
      ss_comp = (s - ss) - y;
      ss = s;
    }
    double variance = ss / static_cast<double>(replicas - 1);
    McEstimate est;
    est.quantity = targets[q].name;
    est.mean = mean;
    est.standard_error = std::sqrt(variance / static_cast<double>(replicas));
    est.replicas = replicas;
    est.seed_base = seed_base;
    out.push_back(std::move(est));
  }
  return out;
}

namespace {

OccupancyGrid spread_run(const MobilityKernel& kernel, std::uint64_t events,
                         std::uint64_t seed) {
  const Rates rates(1.0, 0.5, 0.0, 1.0);
  OccupancyGrid grid;
  const LatticeSpec& lattice = grid.lattice;
  auto N = lattice.sites();

  SimState state(lattice, seed);
  for (auto& s : state.S) s = 1;
  const Offset start{25, 25, 0};
  auto start_site = site_index(start, lattice);
  state.I[start_site] = 1;
  refresh_rates(state, rates, SimMode::linear);

  grid.visits.assign(N, 0);
  grid.visits[start_site] = 1;

  std::vector<double> dist2(N);
  for (std::int64_t i = 0; i < N; ++i) {
    Offset c = site_coords(i, lattice);
    double dx = min_image(c[0] - start[0], lattice.n);
    double dy = min_image(c[1] - start[1], lattice.n);
    dist2[i] = dx * dx + dy * dy;
  }

  double infected_total = 1.0;
  double spread_total = 0.0;  // sum over infected of squared displacement
  EventRecord ev;
  for (std::uint64_t e = 1; e <= events; ++e) {
    step_impl(state, rates, kernel, SimMode::linear, &ev);
    switch (ev.kind) {
      case EventRecord::move_I:
        ++grid.visits[ev.dest];
        spread_total += dist2[ev.dest] - dist2[ev.site];
        break;
      case EventRecord::infect:
        infected_total += 1.0;
        spread_total += dist2[ev.site];
        break;
      default:
        break;
    }
    if (e % 500 == 0) {
      grid.series.events.push_back(e);
      grid.series.msd.push_back(spread_total / infected_total);
    }
  }

  grid.msd_final = spread_total / infected_total;
  grid.distinct_sites = 0;
  for (auto v : grid.visits)
    if (v > 0) ++grid.distinct_sites;
  return grid;
}

}  // namespace

Figure1Result figure1_experiment(const MobilityKernel& nonlocal_kernel,
                                 const MobilityKernel& local_kernel, std::uint64_t events,
                                 std::uint64_t seed) {
  if (nonlocal_kernel.d != 2 || local_kernel.d != 2)
    fail(ErrorCode::DimensionMismatch, "spread comparison runs on a planar torus");
  Figure1Result result;
  result.events = events;
  result.seed = seed;
  result.nonlocal = spread_run(nonlocal_kernel, events, seed);
  result.local = spread_run(local_kernel, events, seed);
  return result;
}

}  // namespace latticesir
