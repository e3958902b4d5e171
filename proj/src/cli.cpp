#include "latticesir/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "latticesir/error.hpp"
#include "latticesir/first_moments.hpp"
#include "latticesir/intermittency.hpp"
#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"
#include "latticesir/rates.hpp"
#include "latticesir/second_moments.hpp"
#include "latticesir/simulator.hpp"
#include "latticesir/torus.hpp"

namespace latticesir {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Config {
  int d = 1;
  int n = 64;
  double h = 1.0;
  json kernel_spec = "nearest_neighbor";
  double kappa = 0.0, beta = 0.0, gamma = 0.0, rho0 = 1.0;
  SimMode mode = SimMode::linear;
  std::uint64_t seed = 1;
  long long replicas = 1;
  std::vector<double> times;
  std::vector<double> snapshot;
  std::vector<Offset> sites;
  std::vector<std::pair<Offset, Offset>> pairs;
  std::vector<Offset> separations;
  std::vector<std::vector<double>> k_points;
  double lambda = 0.0;
  Space space = Space::homogeneous;
  Offset v{1, 0, 0};
  std::uint64_t events = 50000;
  std::uint64_t event_budget = kDefaultEventBudget;
  std::string hash;
};

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorCode::ValidationError, key + " must be a number");
  return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail(ErrorCode::ValidationError, key + " must be an integer");
  return j.get<std::int64_t>();
}

Offset as_offset(const json& j, int d, const std::string& key) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(d))
    fail(ErrorCode::ValidationError, key + " must be an array of " + std::to_string(d) +
                                         " integer coordinates");
  Offset z{0, 0, 0};
  for (int a = 0; a < d; ++a) z[a] = static_cast<int>(as_integer(j[a], key));
  return z;
}

std::vector<double> as_number_list(const json& j, const std::string& key) {
  if (!j.is_array()) fail(ErrorCode::ValidationError, key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(as_number(e, key));
  return out;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  if (!root.is_object()) fail(ErrorCode::ValidationError, "config must be a JSON object");

  static const char* known[] = {"d",     "n",        "h",        "kernel",      "kappa",
                                "beta",  "gamma",    "rho0",     "mode",        "seed",
                                "times", "snapshot", "sites",    "pairs",       "separations",
                                "k",     "lambda",   "space",    "v",           "events",
                                "replicas", "event_budget"};
  for (const auto& [key, value] : root.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || key == name;
    if (!ok) fail(ErrorCode::ValidationError, "unknown config key \"" + key + "\"");
  }

  Config cfg;
  if (!root.contains("d")) fail(ErrorCode::ValidationError, "d is required");
  cfg.d = static_cast<int>(as_integer(root["d"], "d"));
  if (root.contains("n")) cfg.n = static_cast<int>(as_integer(root["n"], "n"));
  if (root.contains("h")) cfg.h = as_number(root["h"], "h");
  if (root.contains("kernel")) cfg.kernel_spec = root["kernel"];
  if (root.contains("kappa")) cfg.kappa = as_number(root["kappa"], "kappa");
  if (root.contains("beta")) cfg.beta = as_number(root["beta"], "beta");
  if (root.contains("gamma")) cfg.gamma = as_number(root["gamma"], "gamma");
  if (root.contains("rho0")) cfg.rho0 = as_number(root["rho0"], "rho0");
  if (root.contains("mode")) {
    std::string m = root["mode"].is_string() ? root["mode"].get<std::string>() : "";
    if (m == "linear")
      cfg.mode = SimMode::linear;
    else if (m == "clamped")
      cfg.mode = SimMode::clamped;
    else
      fail(ErrorCode::ValidationError, "mode must be \"linear\" or \"clamped\"");
  }
  if (root.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(as_integer(root["seed"], "seed"));
  if (root.contains("replicas")) cfg.replicas = as_integer(root["replicas"], "replicas");
  if (root.contains("times")) cfg.times = as_number_list(root["times"], "times");
  if (root.contains("snapshot")) cfg.snapshot = as_number_list(root["snapshot"], "snapshot");
  if (root.contains("sites")) {
    if (!root["sites"].is_array()) fail(ErrorCode::ValidationError, "sites must be an array");
    for (const auto& e : root["sites"]) cfg.sites.push_back(as_offset(e, cfg.d, "sites"));
  }
  if (root.contains("pairs")) {
    if (!root["pairs"].is_array()) fail(ErrorCode::ValidationError, "pairs must be an array");
    for (const auto& e : root["pairs"]) {
      if (!e.is_array() || e.size() != 2)
        fail(ErrorCode::ValidationError, "pairs entries must be [x, y] coordinate pairs");
      cfg.pairs.emplace_back(as_offset(e[0], cfg.d, "pairs"), as_offset(e[1], cfg.d, "pairs"));
    }
  }
  if (root.contains("separations")) {
    if (!root["separations"].is_array())
      fail(ErrorCode::ValidationError, "separations must be an array");
    for (const auto& e : root["separations"])
      cfg.separations.push_back(as_offset(e, cfg.d, "separations"));
  }
  if (root.contains("k")) {
    const json& k = root["k"];
    if (k.is_array() && !k.empty() && k[0].is_array()) {
      for (const auto& e : k) {
        auto point = as_number_list(e, "k");
        if (point.size() != static_cast<std::size_t>(cfg.d))
          fail(ErrorCode::ValidationError, "k points must have d components");
        cfg.k_points.push_back(std::move(point));
      }
    } else {
      auto point = as_number_list(k, "k");
      if (point.size() != static_cast<std::size_t>(cfg.d))
        fail(ErrorCode::ValidationError, "k must have d components");
      cfg.k_points.push_back(std::move(point));
    }
  }
  if (root.contains("lambda")) cfg.lambda = as_number(root["lambda"], "lambda");
  if (root.contains("space")) {
    std::string s = root["space"].is_string() ? root["space"].get<std::string>() : "";
    if (s == "homogeneous")
      cfg.space = Space::homogeneous;
    else if (s == "inhomogeneous")
      cfg.space = Space::inhomogeneous;
    else
      fail(ErrorCode::ValidationError, "space must be \"homogeneous\" or \"inhomogeneous\"");
  }
  if (root.contains("v")) cfg.v = as_offset(root["v"], cfg.d, "v");
  if (root.contains("events"))
    cfg.events = static_cast<std::uint64_t>(as_integer(root["events"], "events"));
  if (root.contains("event_budget"))
    cfg.event_budget = static_cast<std::uint64_t>(as_integer(root["event_budget"], "event_budget"));

  if (cfg.times.empty()) cfg.times.push_back(1.0);
  cfg.hash = hash_hex(root.dump());
  return cfg;
}

MobilityKernel kernel_from(const Config& cfg) {
  const json& spec = cfg.kernel_spec;
  if (spec.is_string()) {
    if (spec.get<std::string>() == "nearest_neighbor") return kernel_nearest_neighbor(cfg.d);
    fail(ErrorCode::ValidationError,
         "unknown kernel preset \"" + spec.get<std::string>() + "\"");
  }
  if (!spec.is_object())
    fail(ErrorCode::ValidationError, "kernel must be a preset name or an object");
  for (const auto& [key, value] : spec.items()) {
    if (key != "preset" && key != "variance" && key != "radius" && key != "entries" &&
        key != "allow_asymmetric")
      fail(ErrorCode::ValidationError, "unknown kernel key \"" + key + "\"");
  }
  if (spec.contains("preset")) {
    std::string preset = spec["preset"].is_string() ? spec["preset"].get<std::string>() : "";
    if (preset == "nearest_neighbor") return kernel_nearest_neighbor(cfg.d);
    if (preset == "gaussian") {
      if (!spec.contains("variance") || !spec.contains("radius"))
        fail(ErrorCode::ValidationError, "gaussian kernel needs variance and radius");
      return kernel_gaussian(cfg.d, as_number(spec["variance"], "variance"),
                             static_cast<int>(as_integer(spec["radius"], "radius")));
    }
    fail(ErrorCode::ValidationError, "unknown kernel preset \"" + preset + "\"");
  }
  if (!spec.contains("entries"))
    fail(ErrorCode::ValidationError, "kernel object needs a preset or an entries list");
  if (!spec["entries"].is_array())
    fail(ErrorCode::ValidationError, "kernel entries must be an array");
  std::vector<KernelEntry> entries;
  for (const auto& e : spec["entries"]) {
    if (!e.is_object() || !e.contains("z") || !e.contains("w"))
      fail(ErrorCode::ValidationError, "kernel entries need z and w");
    for (const auto& [key, value] : e.items())
      if (key != "z" && key != "w")
        fail(ErrorCode::ValidationError, "unknown kernel entry key \"" + key + "\"");
    entries.push_back({as_offset(e["z"], cfg.d, "kernel entry z"), as_number(e["w"], "w")});
  }
  bool allow_asymmetric =
      spec.contains("allow_asymmetric") && spec["allow_asymmetric"].is_boolean() &&
      spec["allow_asymmetric"].get<bool>();
  return build_kernel(cfg.d, entries, allow_asymmetric);
}

struct Emitter {
  fs::path dir;
  std::vector<std::string> files;

  explicit Emitter(const std::string& out) : dir(out) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    files.push_back(name);
  }
};

json offset_json(const Offset& z, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(z[i]);
  return a;
}

std::string coords_header(int d, const char* stem) {
  std::string s;
  for (int a = 0; a < d; ++a) {
    s += ',';
    s += stem;
    s += std::to_string(a);
  }
  return s;
}

std::string coords_row(const Offset& x, int d) {
  std::string s;
  for (int a = 0; a < d; ++a) s += ',' + std::to_string(x[a]);
  return s;
}

void cmd_kernel_info(const Config& cfg, Emitter& out) {
  MobilityKernel kernel = kernel_from(cfg);
  json j;
  j["d"] = kernel.d;
  j["symmetric"] = kernel.symmetric;
  j["variance"] = kernel_variance(kernel);
  j["effective_diffusion"] = effective_diffusion(kernel, cfg.kappa, cfg.h);
  json support = json::array();
  for (const auto& e : kernel.support)
    support.push_back({{"z", offset_json(e.z, kernel.d)}, {"w", e.w}});
  j["support"] = support;
  out.write("kernel.json", j.dump(2) + "\n");
}

void cmd_moments(const Config& cfg, Emitter& out, int order) {
  LatticeSpec lattice(cfg.d, cfg.n, cfg.h);
  MobilityKernel kernel = kernel_from(cfg);
  Rates rates(cfg.kappa, cfg.beta, cfg.gamma, cfg.rho0);

  std::vector<std::vector<double>> k_points = cfg.k_points;
  if (k_points.empty()) k_points.push_back(std::vector<double>(cfg.d, 0.0));

  if (order == 1) {
    std::string csv = "t,site_index" + coords_header(cfg.d, "x") + ",m1_S,m1_I,m1_R,negative_S\n";
    for (double t : cfg.times) {
      FirstMoments fm = m1_inhomogeneous(kernel, rates, t, lattice);
      for (std::int64_t i = 0; i < lattice.sites(); ++i) {
        Offset x = site_coords(i, lattice);
        double s = fm.S.values[i];
        csv += fmt(t) + "," + std::to_string(i) + coords_row(x, cfg.d) + "," + fmt(s) + "," +
               fmt(fm.I.values[i]) + "," + fmt(fm.R.values[i]) + "," + (s < 0.0 ? "1" : "0") +
               "\n";
      }
    }
    out.write("moments1.csv", csv);

    json regimes = json::array();
    for (const auto& k : k_points) {
      RegimeReport rep = classify_first_moment(kernel, rates, k);
      regimes.push_back({{"k", k},
                         {"alpha", rep.alpha},
                         {"theta", rep.theta},
                         {"mu", rep.mu},
                         {"r0", rep.r0},
                         {"r0_mobility", rep.r0_mobility},
                         {"label", to_string(rep.label)},
                         {"conjectural", rep.conjectural}});
    }
    out.write("regimes.json", regimes.dump(2) + "\n");
    return;
  }
  if (order != 2) fail(ErrorCode::ValidationError, "order must be 1 or 2");

  std::vector<Offset> separations = cfg.separations;
  if (separations.empty()) separations.push_back(Offset{1, 0, 0});

  std::string csv = "kind" + coords_header(cfg.d, "v") + ",t,value,compartment_pair\n";
  for (double t : cfg.times) {
    PairMoment same = m2_inhomogeneous(kernel, rates, t, lattice, PairKind::same_site);
    csv += std::string("same_site") + coords_row(Offset{0, 0, 0}, cfg.d) + "," + fmt(t) + "," +
           fmt(same.value) + ",II\n";
    for (const auto& v : separations) {
      PairMoment pm = m2_inhomogeneous(kernel, rates, t, lattice, PairKind::pair, v);
      csv += std::string("pair") + coords_row(v, cfg.d) + "," + fmt(t) + "," + fmt(pm.value) +
             ",II\n";
    }
  }
  out.write("moments2.csv", csv);

  json classification = json::array();
  for (const auto& k : k_points) {
    SecondMomentRegime regime = classify_second_moment(kernel, rates, k);
    classification.push_back({{"k", k},
                              {"alpha", regime.alpha},
                              {"theta", regime.theta},
                              {"mu", regime.mu},
                              {"row", regime.row},
                              {"homogeneous_same_site", regime.homogeneous_same_site},
                              {"homogeneous_pair", regime.homogeneous_pair},
                              {"inhomogeneous_same_site", regime.inhomogeneous_same_site},
                              {"inhomogeneous_pair", regime.inhomogeneous_pair}});
  }
  out.write("classification.json", classification.dump(2) + "\n");
}

void cmd_green(const Config& cfg, Emitter& out) {
  LatticeSpec lattice(cfg.d, cfg.n, cfg.h);
  MobilityKernel kernel = kernel_from(cfg);
  GreenResult g = green_function(kernel, cfg.kappa, cfg.lambda, lattice);
  json j;
  j["lambda"] = g.lambda;
  if (std::isinf(g.value))
    j["value"] = "infinite";
  else
    j["value"] = g.value;
  j["regime"] = to_string(g.regime);
  j["smallk_order"] = g.smallk_order;
  j["resolutions_used"] = {g.resolutions_used[0], g.resolutions_used[1]};
  out.write("green.json", j.dump(2) + "\n");
}

void cmd_classify(const Config& cfg, Emitter& out) {
  if (!(cfg.gamma > 0.0))
    fail(ErrorCode::ValidationError, "classify needs gamma > 0");
  MobilityKernel kernel = kernel_from(cfg);
  Rates rates(cfg.kappa, cfg.beta, cfg.gamma, cfg.rho0);
  std::vector<double> k =
      cfg.k_points.empty() ? std::vector<double>(cfg.d, 0.0) : cfg.k_points.front();
  RegimeReport rep = classify_first_moment(kernel, rates, k);
  json j;
  j["label"] = to_string(rep.label);
  j["k"] = k;
  j["alpha"] = rep.alpha;
  j["theta"] = rep.theta;
  j["mu"] = rep.mu;
  j["r0"] = rep.r0;
  j["r0_mobility"] = rep.r0_mobility;
  j["conjectural"] = rep.conjectural;
  out.write("classify.json", j.dump(2) + "\n");
}

void cmd_intermittency(const Config& cfg, Emitter& out) {
  MobilityKernel kernel = kernel_from(cfg);
  Rates rates(cfg.kappa, cfg.beta, cfg.gamma, cfg.rho0);
  IntermittencyReport report = classify_intermittency(rates, kernel, cfg.space, cfg.v);

  std::string csv = "t,ratio_same_site,ratio_pair\n";
  for (std::size_t i = 0; i < report.times.size(); ++i)
    csv += fmt(report.times[i]) + "," + fmt(report.ratio_same_site[i]) + "," +
           fmt(report.ratio_pair[i]) + "\n";
  out.write("ratios.csv", csv);

  json j;
  j["space"] = to_string(report.space);
  j["v"] = offset_json(report.v, cfg.d);
  j["limit_label"] = report.limit_label;
  j["limit_same_site"] = report.limit_same_site;
  j["limit_pair"] = report.limit_pair;
  j["t_star"] = report.t_star;
  j["witness_fired"] = report.witness_fired;
  j["lattice_n"] = report.lattice_n;
  out.write("report.json", j.dump(2) + "\n");
}

void cmd_simulate(const Config& cfg, Emitter& out, const std::vector<double>& snapshot_flag,
                  long long replicas, std::uint64_t seed, SimMode mode) {
  if (replicas <= 0) fail(ErrorCode::ValidationError, "replicas must be positive");
  if (replicas > 1 && replicas < 100)
    fail(ErrorCode::ValidationError, "replicas must be 1 or at least 100");

  LatticeSpec lattice(cfg.d, cfg.n, cfg.h);
  MobilityKernel kernel = kernel_from(cfg);
  Rates rates(cfg.kappa, cfg.beta, cfg.gamma, cfg.rho0);

  std::vector<double> snaps = snapshot_flag;
  if (snaps.empty()) snaps = cfg.snapshot;
  if (snaps.empty()) snaps = cfg.times;
  double horizon = snaps.back();

  SimState initial = init_state(lattice, rates, seed);
  std::vector<SimState> states =
      run(std::move(initial), rates, kernel, mode, horizon, snaps, cfg.event_budget);

  std::string csv = "t,clock,site_index" + coords_header(cfg.d, "x") + ",S,I,R\n";
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::int64_t i = 0; i < lattice.sites(); ++i) {
      Offset x = site_coords(i, lattice);
      csv += fmt(snaps[s]) + "," + fmt(states[s].clock) + "," + std::to_string(i) +
             coords_row(x, cfg.d) + "," + std::to_string(states[s].S[i]) + "," +
             std::to_string(states[s].I[i]) + "," + std::to_string(states[s].R[i]) + "\n";
    }
  }
  out.write("trajectory.csv", csv);

  if (replicas >= 100) {
    McConfig mc{lattice, cfg.sites, cfg.pairs, cfg.event_budget};
    if (mc.sites.empty()) mc.sites.push_back(Offset{0, 0, 0});
    if (mc.pairs.empty()) mc.pairs.emplace_back(Offset{0, 0, 0}, Offset{0, 0, 0});
    auto estimates = mc_moments(mc, rates, kernel, mode, horizon,
                                static_cast<std::size_t>(replicas), seed);
    std::string est = "quantity,mean,standard_error,replicas,seed_base\n";
    for (const auto& e : estimates)
      est += e.quantity + "," + fmt(e.mean) + "," + fmt(e.standard_error) + "," +
             std::to_string(e.replicas) + "," + std::to_string(e.seed_base) + "\n";
    out.write("estimates.csv", est);
  }
}

void cmd_figure1(const Config& cfg, Emitter& out) {
  if (cfg.d != 2) fail(ErrorCode::ValidationError, "figure1 needs d = 2");
  MobilityKernel nonlocal = kernel_from(cfg);
  MobilityKernel local = kernel_nearest_neighbor(2);
  Figure1Result result = figure1_experiment(nonlocal, local, cfg.events, cfg.seed);

  auto grid_csv = [](const OccupancyGrid& grid) {
    std::string csv;
    int n = grid.lattice.n;
    for (int x0 = 0; x0 < n; ++x0) {
      for (int x1 = 0; x1 < n; ++x1) {
        if (x1) csv += ',';
        csv += std::to_string(grid.visits[site_index(Offset{x0, x1, 0}, grid.lattice)]);
      }
      csv += '\n';
    }
    return csv;
  };
  out.write("occupancy_nonlocal.csv", grid_csv(result.nonlocal));
  out.write("occupancy_local.csv", grid_csv(result.local));

  std::string msd = "events,msd_nonlocal,msd_local\n";
  for (std::size_t i = 0; i < result.nonlocal.series.events.size(); ++i)
    msd += std::to_string(result.nonlocal.series.events[i]) + "," +
           fmt(result.nonlocal.series.msd[i]) + "," + fmt(result.local.series.msd[i]) + "\n";
  out.write("msd_series.csv", msd);

  json j;
  j["events"] = result.events;
  j["seed"] = result.seed;
  j["nonlocal"] = {{"distinct_sites", result.nonlocal.distinct_sites},
                   {"msd_final", result.nonlocal.msd_final}};
  j["local"] = {{"distinct_sites", result.local.distinct_sites},
                {"msd_final", result.local.msd_final}};
  j["msd_ratio"] = result.nonlocal.msd_final / result.local.msd_final;
  j["distinct_ratio"] = static_cast<double>(result.nonlocal.distinct_sites) /
                        static_cast<double>(result.local.distinct_sites);
  out.write("figure1.json", j.dump(2) + "\n");
}

void cmd_tables(Emitter& out) {
  MobilityKernel nn = kernel_nearest_neighbor(1);
  constexpr double half_pi = 1.5707963267948966;
  constexpr double pi = 3.14159265358979323846;

  // first moments: homogeneous rows keyed by sign(beta - gamma), then one
  // parameter point per inhomogeneous regime
  {
    std::string csv = "space,kappa,beta,gamma,k0,label\n";
    struct HomRow {
      double beta, gamma;
      const char* label;
    };
    for (const HomRow& r : {HomRow{0.4, 0.6, "to_zero"}, HomRow{0.5, 0.5, "constant"},
                            HomRow{0.6, 0.4, "to_infinity"}})
      csv += std::string("homogeneous,1,") + fmt(r.beta) + "," + fmt(r.gamma) + ",," + r.label +
             "\n";
    struct InhRow {
      double kappa, beta, gamma, k;
    };
    for (const InhRow& r : {InhRow{1.0, 0.4, 0.6, half_pi}, InhRow{1.0, 1.6, 0.6, half_pi},
                            InhRow{1.0, 1.6, 0.6, 0.0}, InhRow{0.1, 1.6, 0.6, half_pi}}) {
      Rates rates(r.kappa, r.beta, r.gamma, 1.0);
      double k[1] = {r.k};
      RegimeReport rep = classify_first_moment(nn, rates, k);
      csv += std::string("inhomogeneous,") + fmt(r.kappa) + "," + fmt(r.beta) + "," +
             fmt(r.gamma) + "," + fmt(r.k) + "," + to_string(rep.label) + "\n";
    }
    out.write("table2.csv", csv);
  }

  // homogeneous second moments by sign(beta - gamma)
  {
    std::string csv = "kappa,beta,gamma,same_site,pair\n";
    for (auto [beta, gamma] : {std::pair{0.6, 0.4}, {0.4, 0.6}, {0.5, 0.5}}) {
      Rates rates(1.0, beta, gamma, 1.0);
      double k[1] = {0.0};
      SecondMomentRegime regime = classify_second_moment(nn, rates, k);
      csv += std::string("1,") + fmt(beta) + "," + fmt(gamma) + "," +
             regime.homogeneous_same_site + "," + regime.homogeneous_pair + "\n";
    }
    out.write("table3.csv", csv);
  }

  // inhomogeneous second moments: one parameter point per feasible row
  {
    std::string csv = "row,condition,feasible,kappa,beta,gamma,k0,same_site,pair\n";
    struct Sweep {
      int row;
      double kappa, beta, gamma, k;
    };
    const Sweep sweeps[] = {{1, 1.0, 0.5, 0.5, half_pi},
                            {2, 1.0, 0.5, 0.5, 0.0},
                            {5, 1.0, 0.6, 0.4, pi},
                            {6, 1.0, 0.6, 0.4, 0.0}};
    for (const PairRegimeRow& row : pair_regime_rows()) {
      const Sweep* sweep = nullptr;
      for (const Sweep& s : sweeps)
        if (s.row == row.row) sweep = &s;
      if (!row.feasible || !sweep) {
        csv += std::to_string(row.row) + ",\"" + row.condition + "\"," +
               (row.feasible ? "true" : "false") + ",,,,," + row.same_site + "," + row.pair +
               "\n";
        continue;
      }
      Rates rates(sweep->kappa, sweep->beta, sweep->gamma, 1.0);
      double k[1] = {sweep->k};
      SecondMomentRegime regime = classify_second_moment(nn, rates, k);
      csv += std::to_string(row.row) + ",\"" + row.condition + "\",true," + fmt(sweep->kappa) +
             "," + fmt(sweep->beta) + "," + fmt(sweep->gamma) + "," + fmt(sweep->k) + "," +
             regime.inhomogeneous_same_site + "," + regime.inhomogeneous_pair + "\n";
    }
    out.write("table4.csv", csv);
  }

  // intermittency in both spaces across the three rate orderings
  {
    std::string csv =
        "space,kappa,beta,gamma,label,witness_fired,limit_same_site,limit_pair,t_star\n";
    for (Space space : {Space::homogeneous, Space::inhomogeneous}) {
      for (auto [beta, gamma] : {std::pair{0.4, 0.6}, {0.5, 0.5}, {0.6, 0.4}}) {
        Rates rates(1.0, beta, gamma, 1.0);
        IntermittencyReport rep = classify_intermittency(rates, nn, space, Offset{1, 0, 0});
        bool bounded = std::string(rep.limit_label) == "bounded";
        csv += std::string(to_string(space)) + ",1," + fmt(beta) + "," + fmt(gamma) + "," +
               rep.limit_label + "," + (rep.witness_fired ? "true" : "false") + "," +
               (bounded ? fmt(rep.limit_same_site) : std::string()) + "," +
               (bounded ? fmt(rep.limit_pair) : std::string()) + "," + fmt(rep.t_star) + "\n";
      }
    }
    out.write("table5.csv", csv);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"lattice SIR moments, Green functions, and event simulation"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out_dir, "output directory");

  CLI::App* sc_kernel = app.add_subcommand("kernel-info", "describe the mobility kernel");
  CLI::App* sc_moments = app.add_subcommand("moments", "evaluate moment fields");
  int order = 1;
  sc_moments->add_option("--order", order, "1 for means, 2 for pair moments");
  CLI::App* sc_green = app.add_subcommand("green", "Green function of the mobility walk");
  CLI::App* sc_simulate = app.add_subcommand("simulate", "stochastic event simulation");
  std::string mode_flag, snapshot_flag;
  long long replicas_flag = -1;
  long long seed_flag = -1;
  sc_simulate->add_option("--mode", mode_flag, "linear or clamped");
  sc_simulate->add_option("--replicas", replicas_flag, "1 or >= 100");
  sc_simulate->add_option("--seed", seed_flag, "base RNG seed");
  sc_simulate->add_option("--snapshot", snapshot_flag, "comma-separated snapshot times");
  CLI::App* sc_intermittency =
      app.add_subcommand("intermittency", "moment-ratio growth diagnostics");
  CLI::App* sc_classify = app.add_subcommand("classify", "first-moment growth regime");
  CLI::App* sc_figure1 =
      app.add_subcommand("figure1", "spread comparison of two mobility kernels");
  CLI::App* sc_tables = app.add_subcommand("tables", "regime tables over a parameter sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err = {{"error", {{"code", "ParseError"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  auto started = std::chrono::steady_clock::now();
  std::string subcommand;
  try {
    Config cfg;
    if (!config_path.empty())
      cfg = parse_config(config_path);
    else if (!sc_tables->parsed())
      fail(ErrorCode::ValidationError, "--config is required");
    else
      cfg.hash = hash_hex("{}");

    Emitter out(out_dir);
    if (sc_kernel->parsed()) {
      subcommand = "kernel-info";
      cmd_kernel_info(cfg, out);
    } else if (sc_moments->parsed()) {
      subcommand = "moments";
      cmd_moments(cfg, out, order);
    } else if (sc_green->parsed()) {
      subcommand = "green";
      cmd_green(cfg, out);
    } else if (sc_simulate->parsed()) {
      subcommand = "simulate";
      SimMode mode = cfg.mode;
      if (mode_flag == "linear")
        mode = SimMode::linear;
      else if (mode_flag == "clamped")
        mode = SimMode::clamped;
      else if (!mode_flag.empty())
        fail(ErrorCode::ValidationError, "mode must be \"linear\" or \"clamped\"");
      std::vector<double> snaps;
      if (!snapshot_flag.empty()) {
        std::stringstream ss(snapshot_flag);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            snaps.push_back(std::stod(item));
          } catch (const std::exception&) {
            fail(ErrorCode::ValidationError, "snapshot times must be numbers");
          }
        }
      }
      long long replicas = replicas_flag >= 0 ? replicas_flag : cfg.replicas;
      std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : cfg.seed;
      cmd_simulate(cfg, out, snaps, replicas, seed, mode);
    } else if (sc_intermittency->parsed()) {
      subcommand = "intermittency";
      cmd_intermittency(cfg, out);
    } else if (sc_classify->parsed()) {
      subcommand = "classify";
      cmd_classify(cfg, out);
    } else if (sc_figure1->parsed()) {
      subcommand = "figure1";
      cmd_figure1(cfg, out);
    } else {
      subcommand = "tables";
      cmd_tables(out);
    }

    json manifest;
    manifest["config_hash"] = cfg.hash;
    manifest["version"] = "0.1.0";
    std::sort(out.files.begin(), out.files.end());
    manifest["outputs"] = out.files;
    {
      std::ofstream f(out.dir / "manifest.json", std::ios::binary);
      f << manifest.dump(2) << "\n";
    }

    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    std::cerr << "RunRecord subcommand=" << subcommand << " config_hash=" << cfg.hash
              << " version=0.1.0 outputs=" << out.files.size() << " wall_ms=" << fmt(wall_ms)
              << "\n";
    return 0;
  } catch (const Error& e) {
    json err = {{"error", {{"code", error_name(e.code())}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    if (e.code() == ErrorCode::ParseError) return 2;
    if (e.code() == ErrorCode::ValidationError) return 3;
    return 1;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", "RuntimeError"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

}  // namespace latticesir
