#include "latticesir/second_moments.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>

#include "latticesir/torus.hpp"

namespace latticesir {

const char* to_string(PairKind kind) {
  return kind == PairKind::same_site ? "same_site" : "pair";
}

const char* to_string(PairTag tag) {
  switch (tag) {
    case PairTag::II: return "II";
    case PairTag::SS: return "SS";
    case PairTag::RR: return "RR";
    case PairTag::SI: return "SI";
    default: return "RI";
  }
}

double m2_homogeneous_same_site(const Rates& rates, double t) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  double drive = rates.beta + rates.gamma + 2.0 * rates.kappa;
  if (rates.critical()) return rates.rho0 + drive * t;
  double b = rates.growth();
  double e1 = std::exp(b * t), e2 = std::exp(2.0 * b * t);
  return rates.rho0 * e2 + (drive / -b) * (e1 - e2);
}

double m2_homogeneous_pair(const Rates& rates, const MobilityKernel& kernel,
                           const Offset& v, double t) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (v[0] == 0 && v[1] == 0 && v[2] == 0)
    fail(ErrorCode::ZeroSeparation, "pair moment needs v != 0");
  double av = kernel.weight(v);
  if (rates.critical()) return rates.rho0 - 2.0 * rates.kappa * av * t;
  double b = rates.growth();
  double e1 = std::exp(b * t), e2 = std::exp(2.0 * b * t);
  return rates.rho0 * e2 + (2.0 * rates.kappa * av / b) * (e1 - e2);
}

namespace {

struct Quadrature {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Gauss-Legendre rule by Newton iteration on the Legendre recurrence.
const Quadrature& gauss_legendre(int m) {
  static std::map<int, Quadrature> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;

  Quadrature q;
  q.nodes.resize(m);
  q.weights.resize(m);
  constexpr double pi = 3.14159265358979323846;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = x;
    q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(m, std::move(q)).first->second;
}

// literal spectral expressions as printed; the bracketed differences hit
// removable 0/0 points (kappa a_hat = 0 at criticality, -2(beta+gamma)
// otherwise), evaluated by their limits as the torus integral requires
double verbatim_mode_value(double ahat, const Rates& rates, double t, bool same_site) {
  double kappa = rates.kappa, beta = rates.beta, gamma = rates.gamma;
  double ka = kappa * ahat;
  if (rates.critical()) {
    double e1 = std::exp(ka * t), e2 = std::exp(2.0 * ka * t);
    if (!same_site) return e2 + 2.0 * (e1 - e2);
    // (e1 - e2) / ka = -e1 expm1(ka t) / ka
    double ratio = ka == 0.0 ? t : std::expm1(ka * t) / ka;
    return e2 + (ka + 2.0 * kappa + beta + gamma) * e1 * ratio;
  }
  double lead = std::exp(2.0 * (ka * t + beta + gamma) * t);
  double e1 = std::exp(ka * t);
  double s = ka + 2.0 * (beta + gamma);
  // (e1 - e2) / s with e2 = e1 e^{s t}
  double ratio = s == 0.0 ? t : std::expm1(s * t) / s;
  if (same_site) return lead + (ka + 2.0 * kappa + beta + gamma) * e1 * ratio;
  return lead - 2.0 * ka * e1 * ratio;
}

double verbatim_value(const MobilityKernel& kernel, const Rates& rates, double t,
                      const LatticeSpec& lattice, const Offset& w, bool same_site) {
  auto grid = symbol_grid(kernel, lattice);
  auto N = lattice.sites();
  constexpr double two_pi = 6.283185307179586476925286766559;
  double sum = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    Offset j = site_coords(i, lattice);
    double phase = 0.0;
    for (int a = 0; a < lattice.d; ++a) phase += two_pi * j[a] * w[a] / lattice.n;
    sum += verbatim_mode_value(grid.re[i], rates, t, same_site) * std::cos(phase);
  }
  return sum / static_cast<double>(N);
}

}  // namespace

PairMoment m2_inhomogeneous(const MobilityKernel& kernel, const Rates& rates, double t,
                            const LatticeSpec& lattice, PairKind kind, const Offset& v,
                            bool paper_verbatim) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");

  PairMoment out;
  out.t = t;
  out.kind = kind;
  out.v = v;
  out.tag = PairTag::II;

  if (paper_verbatim) {
    out.value = verbatim_value(kernel, rates, t, lattice, v, kind == PairKind::same_site);
    return out;
  }

  // evaluation sites: same_site reads the diagonal at v, pair reads (0, v)
  Offset x = kind == PairKind::same_site ? v : Offset{0, 0, 0};
  Offset y = v;

  auto N = lattice.sites();
  std::vector<std::int32_t> at_x(N), at_y(N);
  for (std::int64_t i = 0; i < N; ++i) {
    Offset z = site_coords(i, lattice);
    at_x[i] = static_cast<std::int32_t>(
        site_index(Offset{x[0] - z[0], x[1] - z[1], x[2] - z[2]}, lattice));
    at_y[i] = static_cast<std::int32_t>(
        site_index(Offset{y[0] - z[0], y[1] - z[1], y[2] - z[2]}, lattice));
  }

  double b = rates.growth();
  double drive = rates.beta + rates.gamma;

  TransitionField pt = transition_probability(kernel, rates.kappa, t, lattice);
  double lead = std::exp(2.0 * b * t) * pt.at(x) * pt.at(y);
  if (t == 0.0) {
    out.value = lead;
    return out;
  }

  auto apply_generator = [&](const std::vector<double>& f, std::vector<double>& Lf) {
    for (std::int64_t i = 0; i < N; ++i) {
      Offset c = site_coords(i, lattice);
      double s = 0.0;
      for (const auto& e : kernel.support)
        s += e.w * f[site_index(Offset{c[0] - e.z[0], c[1] - e.z[1], c[2] - e.z[2]},
                                lattice)];
      Lf[i] = s - f[i];
    }
  };

  // Duhamel source, propagated to the pair (x, y):
  //   T1: migration exchange, folded through the one-walker identity
  //       sum_w p_tau(y-w) a(w-z) = (L p_tau)(y-z)
  //   T2: same-site birth terms (beta+gamma) m1 + kappa L m1
  std::vector<double> m1(N), Lp(N), Lm1(N);
  auto integrand = [&](double s) {
    double tau = t - s;
    TransitionField ps = transition_probability(kernel, rates.kappa, s, lattice);
    TransitionField ptau = transition_probability(kernel, rates.kappa, tau, lattice);
    double ebs = std::exp(b * s);
    for (std::int64_t i = 0; i < N; ++i) m1[i] = ebs * ps.values[i];
    apply_generator(ptau.values, Lp);
    apply_generator(m1, Lm1);

    double t1 = 0.0, t2 = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
      double px = ptau.values[at_x[i]], py = ptau.values[at_y[i]];
      t1 += (px * Lp[at_y[i]] + py * Lp[at_x[i]]) * m1[i];
      t2 += px * py * (drive * m1[i] + rates.kappa * Lm1[i]);
    }
    return std::exp(2.0 * b * tau) * (-rates.kappa * t1 + t2);
  };

  double previous = 0.0;
  bool have_previous = false;
  for (int m = 16; m <= 8192; m *= 2) {
    const Quadrature& q = gauss_legendre(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i)
      sum += q.weights[i] * integrand(0.5 * t * (q.nodes[i] + 1.0));
    double value = lead + 0.5 * t * sum;
    if (have_previous &&
        std::abs(value - previous) <= 1e-8 * std::max(std::abs(value), 1e-300)) {
      out.value = value;
      return out;
    }
    previous = value;
    have_previous = true;
  }
  fail(ErrorCode::QuadratureStall, "time convolution did not settle by 8192 nodes");
}

namespace {

int sign_with_tolerance(double x) {
  constexpr double kZero = 1e-9;
  if (std::abs(x) <= kZero) return 0;
  return x < 0.0 ? -1 : 1;
}

}  // namespace

std::array<PairRegimeRow, 6> pair_regime_rows() {
  return {{
      {1, "beta = gamma, alpha < 0, theta < 0", "to_zero", "to_zero", true},
      {2, "beta = gamma, alpha = 0, theta = 0", "delta_origin", "delta_origin", true},
      {3, "beta + gamma < 0, alpha < 0, mu < 0", "to_zero", "to_zero", false},
      {4, "beta + gamma < 0, alpha = 0, mu < 0", "scaled_delta_origin", "to_zero", false},
      {5, "beta + gamma > 0, alpha < 0, mu < 0", "to_zero", "to_zero", true},
      {6, "beta + gamma > 0, alpha <= 0, mu > 0", "to_infinity", "to_infinity", true},
  }};
}

SecondMomentRegime classify_second_moment(const MobilityKernel& kernel, const Rates& rates,
                                          std::span<const double> k) {
  auto s = symbol(kernel, k);

  SecondMomentRegime regime;
  regime.alpha = rates.kappa * s.real();
  regime.theta = regime.alpha + rates.growth();
  regime.mu = regime.alpha + rates.beta + rates.gamma;

  int growth_sign = rates.critical() ? 0 : sign_with_tolerance(rates.growth());
  if (growth_sign > 0) {
    regime.homogeneous_same_site = "to_infinity";
    regime.homogeneous_pair = "to_infinity";
  } else if (growth_sign < 0) {
    regime.homogeneous_same_site = "to_zero";
    regime.homogeneous_pair = "to_zero";
  } else {
    regime.homogeneous_same_site = "to_infinity";  // linear growth
    regime.homogeneous_pair = "to_zero";
  }

  int a = sign_with_tolerance(regime.alpha);
  int th = sign_with_tolerance(regime.theta);
  int mu = sign_with_tolerance(regime.mu);
  int sum_sign = sign_with_tolerance(rates.beta + rates.gamma);

  // first matching row in table order; overlapping conditions resolve to the
  // earlier row
  bool matched[7] = {};
  matched[1] = growth_sign == 0 && a < 0 && th < 0;
  matched[2] = growth_sign == 0 && a == 0 && th == 0;
  matched[3] = sum_sign < 0 && a < 0 && mu < 0;
  matched[4] = sum_sign < 0 && a == 0 && mu < 0;
  matched[5] = sum_sign > 0 && a < 0 && mu < 0;
  matched[6] = sum_sign > 0 && a <= 0 && mu > 0;

  regime.row = 0;
  regime.inhomogeneous_same_site = "unlisted";
  regime.inhomogeneous_pair = "unlisted";
  auto rows = pair_regime_rows();
  for (int r = 1; r <= 6; ++r)
    if (matched[r]) {
      regime.row = r;
      regime.inhomogeneous_same_site = rows[r - 1].same_site;
      regime.inhomogeneous_pair = rows[r - 1].pair;
      break;
    }
  return regime;
}

}  // namespace latticesir
