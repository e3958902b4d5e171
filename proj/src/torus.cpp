#include "latticesir/torus.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace latticesir {

namespace {

void check_pair(const MobilityKernel& kernel, const LatticeSpec& lattice) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
}

// index tables for the gather (Pq)(x) = sum_z a(z) q(x - z)
std::vector<std::vector<std::int32_t>> gather_tables(const MobilityKernel& kernel,
                                                     const LatticeSpec& lattice) {
  auto N = lattice.sites();
  std::vector<std::vector<std::int32_t>> nb(kernel.support.size());
  for (std::size_t e = 0; e < kernel.support.size(); ++e) {
    nb[e].resize(N);
    const Offset& z = kernel.support[e].z;
    for (std::int64_t i = 0; i < N; ++i) {
      Offset x = site_coords(i, lattice);
      Offset src{x[0] - z[0], x[1] - z[1], x[2] - z[2]};
      nb[e][i] = static_cast<std::int32_t>(site_index(src, lattice));
    }
  }
  return nb;
}

}  // namespace

const char* to_string(WalkRegime regime) {
  return regime == WalkRegime::transient ? "transient" : "recurrent";
}

std::complex<double> torus_integrate(std::span<const std::complex<double>> grid_values) {
  if (grid_values.empty()) fail(ErrorCode::EmptyGrid, "no grid values");
  std::complex<double> sum = 0.0;
  for (const auto& v : grid_values) sum += v;
  return sum / static_cast<double>(grid_values.size());
}

// e^{kappa t L} delta_0 as the uniformized series e^{-kappa t} sum_m
// (kappa t)^m / m! P^m delta_0. Every term is nonnegative, so the result
// carries full relative precision even in the far tails, unlike a spectral
// synthesis whose tail values come from cancellation.
TransitionField transition_probability(const MobilityKernel& kernel, double kappa,
                                       double t, const LatticeSpec& lattice) {
  check_pair(kernel, lattice);
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (kappa < 0.0) fail(ErrorCode::ValidationError, "kappa must be >= 0");

  auto N = lattice.sites();
  TransitionField field{lattice, t, std::vector<double>(N, 0.0)};
  field.values[0] = 1.0;
  double mu = kappa * t;
  if (mu == 0.0) return field;

  auto nb = gather_tables(kernel, lattice);
  std::size_t E = kernel.support.size();

  // Poisson weights are carried without their e^{-mu} prefactor; the ladder
  // rescales when they outgrow 1e280 and the log of the total scale is
  // applied once at the end.
  long m_max = static_cast<long>(std::ceil(mu + 40.0 * std::sqrt(mu + 1.0) + 40.0));
  std::vector<double> q = field.values, qn(N), acc(N, 0.0);
  double w = 1.0;
  double log_scale = -mu;
  constexpr double kCap = 1e280;
  acc[0] = w;

  for (long m = 1; m <= m_max; ++m) {
    for (std::int64_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t e = 0; e < E; ++e) s += kernel.support[e].w * q[nb[e][i]];
      qn[i] = s;
    }
    q.swap(qn);
    w *= mu / static_cast<double>(m);
    if (w > kCap) {
      w /= kCap;
      for (auto& a : acc) a /= kCap;
      log_scale += std::log(kCap);
    }
    for (std::int64_t i = 0; i < N; ++i) acc[i] += w * q[i];
  }

  double scale = std::exp(log_scale);
  for (std::int64_t i = 0; i < N; ++i) field.values[i] = acc[i] * scale;
  return field;
}

// Return probability via the positive spectral sum (1/N) sum_k e^{kappa a_hat(k) t};
// exact on the torus and O(N) per time point.
double p00(const MobilityKernel& kernel, double kappa, double t,
           const LatticeSpec& lattice) {
  check_pair(kernel, lattice);
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (kappa < 0.0) fail(ErrorCode::ValidationError, "kappa must be >= 0");
  auto grid = symbol_grid(kernel, lattice);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.re.size(); ++i) {
    double mag = std::exp(kappa * t * grid.re[i]);
    sum += kernel.symmetric ? mag : mag * std::cos(kappa * t * grid.im[i]);
  }
  return sum / static_cast<double>(grid.re.size());
}

DecayFit p00_decay_fit(const MobilityKernel& kernel, double kappa,
                       std::span<const double> t_grid, const LatticeSpec& lattice) {
  check_pair(kernel, lattice);
  if (t_grid.size() < 4)
    fail(ErrorCode::InsufficientPoints, "decay fit needs at least 4 times");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) fail(ErrorCode::ValidationError, "times must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      fail(ErrorCode::ValidationError, "times must be strictly increasing");
  }

  // periodic images must stay negligible at the largest time
  double spread = 8.0 * std::sqrt(kappa * kernel_variance(kernel) * t_grid.back());
  if (lattice.n < spread)
    fail(ErrorCode::TorusSaturated,
         "torus too small for t_max: need n >= " + std::to_string(spread));

  auto N = lattice.sites();
  auto grid = symbol_grid(kernel, lattice);
  std::vector<double> logt(t_grid.size()), logp(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.re.size(); ++i) {
      double mag = std::exp(kappa * t_grid[j] * grid.re[i]);
      sum += kernel.symmetric ? mag : mag * std::cos(kappa * t_grid[j] * grid.im[i]);
    }
    double p = sum / static_cast<double>(N);
    if (j == 0 && p >= 0.5)
      fail(ErrorCode::ValidationError, "t_grid starts before the power-law regime");
    if (p <= 2.0 / static_cast<double>(N))
      fail(ErrorCode::TorusSaturated, "p00 reached the uniform floor 1/n^d");
    logt[j] = std::log(t_grid[j]);
    logp[j] = std::log(p);
  }

  auto n = static_cast<double>(t_grid.size());
  double mx = std::accumulate(logt.begin(), logt.end(), 0.0) / n;
  double my = std::accumulate(logp.begin(), logp.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    sxx += (logt[j] - mx) * (logt[j] - mx);
    sxy += (logt[j] - mx) * (logp[j] - my);
  }
  double slope = sxy / sxx;
  return DecayFit{std::exp(my - slope * mx), -slope};
}

namespace {

double drift_norm(const MobilityKernel& kernel) {
  double b[3] = {0.0, 0.0, 0.0};
  for (const auto& e : kernel.support)
    for (int a = 0; a < kernel.d; ++a) b[a] += e.w * e.z[a];
  return std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
}

double covariance_det(const MobilityKernel& kernel) {
  double c[3][3] = {};
  for (const auto& e : kernel.support)
    for (int a = 0; a < kernel.d; ++a)
      for (int b = 0; b < kernel.d; ++b) c[a][b] += e.w * e.z[a] * e.z[b];
  switch (kernel.d) {
    case 1: return c[0][0];
    case 2: return c[0][0] * c[1][1] - c[0][1] * c[1][0];
    default:
      return c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) -
             c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0]) +
             c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
  }
}

// mean number of visits to the origin, k=0 mode excluded
double excluded_mode_sum(const MobilityKernel& kernel, double kappa,
                         const LatticeSpec& lattice) {
  auto grid = symbol_grid(kernel, lattice);
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.re.size(); ++i) {
    std::complex<double> denom(-kappa * grid.re[i], -kappa * grid.im[i]);
    sum += (1.0 / denom).real();
  }
  return sum / static_cast<double>(grid.re.size());
}

}  // namespace

GreenResult green_function(const MobilityKernel& kernel, double kappa, double lambda,
                           const LatticeSpec& lattice) {
  check_pair(kernel, lattice);
  if (lambda < 0.0) fail(ErrorCode::ValidationError, "lambda must be >= 0");
  if (kappa < 0.0) fail(ErrorCode::ValidationError, "kappa must be >= 0");

  GreenResult out;
  out.lambda = lambda;

  if (kappa == 0.0) {
    if (lambda == 0.0)
      fail(ErrorCode::ZeroMobility, "frozen walk: G_0 undefined without mobility");
    // the walker never leaves the origin
    out.value = 1.0 / lambda;
    out.regime = WalkRegime::recurrent;
    out.smallk_order = 0;
    out.resolutions_used = {lattice.n, 0};
    return out;
  }

  // Transience decided from the symbol's zero at k=0: quadratic with
  // nondegenerate covariance, so 1/|k|^2 is integrable iff d >= 3. A net
  // drift makes the walk transient in any dimension.
  bool transient = drift_norm(kernel) > 1e-12 ||
                   (kernel.d >= 3 && covariance_det(kernel) > 1e-12);
  out.regime = transient ? WalkRegime::transient : WalkRegime::recurrent;
  out.smallk_order = 2;

  if (lambda > 0.0) {
    auto grid = symbol_grid(kernel, lattice);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.re.size(); ++i) {
      std::complex<double> denom(lambda - kappa * grid.re[i], -kappa * grid.im[i]);
      sum += (1.0 / denom).real();
    }
    out.value = sum / static_cast<double>(grid.re.size());
    out.resolutions_used = {lattice.n, 0};
    return out;
  }

  if (!transient) {
    out.value = std::numeric_limits<double>::infinity();
    out.resolutions_used = {0, 0};
    return out;
  }

  // The excluded k=0 mode leaves an O(1/n) deficit; one Richardson step
  // across n and 2n removes it.
  LatticeSpec fine(lattice.d, 2 * lattice.n, lattice.h);
  double coarse = excluded_mode_sum(kernel, kappa, lattice);
  double refined = excluded_mode_sum(kernel, kappa, fine);
  out.value = 2.0 * refined - coarse;
  out.resolutions_used = {lattice.n, 2 * lattice.n};
  return out;
}

}  // namespace latticesir
