#include "latticesir/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latticesir {

namespace {

constexpr double kMassTolerance = 1e-12;

Offset negate(const Offset& z) { return Offset{-z[0], -z[1], -z[2]}; }

bool offsets_equal(const Offset& a, const Offset& b) {
  return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
}

std::string offset_text(const Offset& z) {
  return "(" + std::to_string(z[0]) + "," + std::to_string(z[1]) + "," +
         std::to_string(z[2]) + ")";
}

void check_dimension(int d) {
  if (d < 1 || d > 3) fail(ErrorCode::UnsupportedDimension, "d must be 1, 2, or 3");
}

}  // namespace

double MobilityKernel::weight(const Offset& z) const {
  for (const auto& e : support)
    if (offsets_equal(e.z, z)) return e.w;
  return 0.0;
}

MobilityKernel build_kernel(int d, const std::vector<KernelEntry>& entries,
                            bool allow_asymmetric) {
  check_dimension(d);

  MobilityKernel kernel;
  kernel.d = d;
  kernel.support = entries;

  double mass = 0.0, carry = 0.0;
  for (const auto& e : kernel.support) {
    bool zero = true;
    for (int a = 0; a < 3; ++a) {
      if (a >= d && e.z[a] != 0)
        fail(ErrorCode::ValidationError,
             "offset " + offset_text(e.z) + " uses an axis beyond d=" + std::to_string(d));
      if (e.z[a] != 0) zero = false;
    }
    if (zero) fail(ErrorCode::ZeroOffset, "offset 0 is implicit and may not be listed");
    if (!(e.w >= 0.0))
      fail(ErrorCode::NegativeWeight, "weight at " + offset_text(e.z) + " is negative");
    double y = e.w - carry;        // Kahan: large supports must not fail the
    double s = mass + y;           // mass gate through summation noise alone
    carry = (s - mass) - y;
    mass = s;
  }

  std::sort(kernel.support.begin(), kernel.support.end(),
            [](const KernelEntry& a, const KernelEntry& b) { return a.z < b.z; });
  for (std::size_t i = 1; i < kernel.support.size(); ++i)
    if (offsets_equal(kernel.support[i - 1].z, kernel.support[i].z))
      fail(ErrorCode::DuplicateOffset, "offset " + offset_text(kernel.support[i].z) +
                                           " listed more than once");

  if (std::abs(mass - 1.0) > kMassTolerance)
    fail(ErrorCode::NonUnitMass,
         "weights sum to " + std::to_string(mass) + ", expected 1");

  kernel.symmetric = true;
  for (const auto& e : kernel.support)
    if (kernel.weight(negate(e.z)) != e.w) {
      kernel.symmetric = false;
      break;
    }
  if (!kernel.symmetric && !allow_asymmetric)
    fail(ErrorCode::ValidationError,
         "kernel is asymmetric; pass allow_asymmetric to construct it anyway");

  return kernel;
}

MobilityKernel kernel_nearest_neighbor(int d) {
  check_dimension(d);
  std::vector<KernelEntry> entries;
  double w = 1.0 / (2.0 * d);
  for (int a = 0; a < d; ++a)
    for (int s : {-1, +1}) {
      Offset z{0, 0, 0};
      z[a] = s;
      entries.push_back({z, w});
    }
  return build_kernel(d, entries);
}

MobilityKernel kernel_gaussian(int d, double variance, int radius) {
  check_dimension(d);
  if (!(variance > 0.0)) fail(ErrorCode::ValidationError, "variance must be positive");
  if (radius < 1) fail(ErrorCode::ValidationError, "radius must be >= 1");

  // Density evaluated relative to the closest nonzero offset so tiny
  // variances cannot underflow the whole support.
  std::vector<KernelEntry> entries;
  long double total = 0.0L;
  Offset z{0, 0, 0};
  int lo = -radius, hi = radius;
  for (int x0 = lo; x0 <= hi; ++x0)
    for (int x1 = (d > 1 ? lo : 0); x1 <= (d > 1 ? hi : 0); ++x1)
      for (int x2 = (d > 2 ? lo : 0); x2 <= (d > 2 ? hi : 0); ++x2) {
        if (x0 == 0 && x1 == 0 && x2 == 0) continue;
        z = {x0, x1, x2};
        double r2 = double(x0) * x0 + double(x1) * x1 + double(x2) * x2;
        double w = std::exp(-(r2 - 1.0) / (2.0 * variance));
        entries.push_back({z, w});
        total += w;
      }
  if (!(total > 0.0L) || !std::isfinite(static_cast<double>(total)))
    fail(ErrorCode::DegenerateTruncation, "no mass left on the truncated support");

  // one shared divisor keeps a(z) == a(-z) ties exact
  for (auto& e : entries) e.w = static_cast<double>(e.w / total);
  return build_kernel(d, entries);
}

std::complex<double> symbol(const MobilityKernel& kernel, std::span<const double> k) {
  if (static_cast<int>(k.size()) != kernel.d)
    fail(ErrorCode::DimensionMismatch, "frequency vector length differs from kernel.d");
  double re = -1.0, im = 0.0;
  for (const auto& e : kernel.support) {
    double phase = 0.0;
    for (int a = 0; a < kernel.d; ++a) phase += k[a] * e.z[a];
    re += e.w * std::cos(phase);
    im += e.w * std::sin(phase);
  }
  return {re, im};
}

FourierSymbol symbol_grid(const MobilityKernel& kernel, const LatticeSpec& lattice) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  auto N = lattice.sites();
  FourierSymbol out{lattice, std::vector<double>(N), std::vector<double>(N)};
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::int64_t idx = 0; idx < N; ++idx) {
    Offset j = site_coords(idx, lattice);
    double k[3];
    for (int a = 0; a < lattice.d; ++a) k[a] = two_pi * j[a] / lattice.n;
    auto s = symbol(kernel, std::span<const double>(k, lattice.d));
    out.re[idx] = s.real();
    out.im[idx] = kernel.symmetric ? 0.0 : s.imag();
  }
  return out;
}

double kernel_variance(const MobilityKernel& kernel) {
  double v = 0.0;
  for (const auto& e : kernel.support) {
    double r2 = 0.0;
    for (int a = 0; a < kernel.d; ++a) r2 += double(e.z[a]) * e.z[a];
    v += e.w * r2;
  }
  return v;
}

double effective_diffusion(const MobilityKernel& kernel, double kappa, double h) {
  if (kappa < 0.0) fail(ErrorCode::ValidationError, "kappa must be >= 0");
  if (!(h > 0.0)) fail(ErrorCode::ValidationError, "h must be positive");
  return kappa * h * h * kernel_variance(kernel) / 2.0;
}

}  // namespace latticesir
