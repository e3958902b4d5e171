#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"
#include "latticesir/rates.hpp"
#include "latticesir/rng.hpp"

namespace latticesir {

// linear: the infection event fires at rate beta*I(x) regardless of S(x), so S
// may go negative; this is the mode consistent with the linear moment systems.
// clamped: infection suppressed when S(x) <= 0.
enum class SimMode { linear, clamped };

const char* to_string(SimMode mode);

struct SimState {
  LatticeSpec lattice;
  double clock = 0.0;
  std::uint64_t events = 0;
  std::vector<std::int64_t> S, I, R;
  Rng rng;

  // event-rate bookkeeping, maintained incrementally by step()
  std::vector<double> site_rate;
  double total_rate = 0.0;
  std::uint64_t refresh_countdown = 0;

  SimState(const LatticeSpec& lat, std::uint64_t seed)
      : lattice(lat), S(lat.sites()), I(lat.sites()), R(lat.sites()), rng(seed) {}

  std::int64_t population() const;
};

SimState init_state(const LatticeSpec& lattice, const Rates& rates, std::uint64_t seed);

// Executes one exact Gillespie event in place and returns the waiting time.
double step(SimState& state, const Rates& rates, const MobilityKernel& kernel, SimMode mode);

inline constexpr std::uint64_t kDefaultEventBudget = 200'000'000;

// Steps until clock >= horizon; the k-th returned state is the state at the
// last event before snapshot_times[k]. A chain that dies early keeps its final
// state for the remaining snapshots. Empty snapshot_times yields a single
// snapshot at the horizon.
std::vector<SimState> run(SimState state, const Rates& rates, const MobilityKernel& kernel,
                          SimMode mode, double horizon, std::span<const double> snapshot_times,
                          std::uint64_t event_budget = kDefaultEventBudget);

struct McEstimate {
  std::string quantity;  // "m1_I[x]", "m1_S[x]", "m1_R[x]", "m2_II[x;y]"
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed_base = 0;
};

struct McConfig {
  LatticeSpec lattice;
  std::vector<Offset> sites;                        // first-moment targets
  std::vector<std::pair<Offset, Offset>> pairs;     // E[I(x) I(y)] targets
  std::uint64_t event_budget = kDefaultEventBudget;
};

// Independent replicas seeded from seed_base; aggregation runs in fixed
// replica order (compensated sums) so results don't depend on scheduling.
// LATTICESIR_THREADS caps the worker count.
std::vector<McEstimate> mc_moments(const McConfig& config, const Rates& rates,
                                   const MobilityKernel& kernel, SimMode mode, double t,
                                   std::size_t replicas, std::uint64_t seed_base);

struct SpreadSeries {
  std::vector<std::uint64_t> events;
  std::vector<double> msd;
};

struct OccupancyGrid {
  LatticeSpec lattice{2, 51};
  std::vector<std::int64_t> visits;  // infected arrivals per site
  std::int64_t distinct_sites = 0;
  double msd_final = 0.0;
  SpreadSeries series;
};

struct Figure1Result {
  OccupancyGrid nonlocal;
  OccupancyGrid local;
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
};

// Two runs from one infected individual at the center of a 51x51 torus, same
// event count, contrasting a spread-out kernel with nearest-neighbor hops.
Figure1Result figure1_experiment(const MobilityKernel& nonlocal_kernel,
                                 const MobilityKernel& local_kernel, std::uint64_t events,
                                 std::uint64_t seed);

}  // namespace latticesir
