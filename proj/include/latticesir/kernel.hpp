#pragma once

#include <complex>
#include <span>
#include <vector>

#include "latticesir/lattice.hpp"

namespace latticesir {

struct KernelEntry {
  Offset z{0, 0, 0};
  double w = 0.0;
};

// Jump distribution a(z) on Z^d \ {0}: weights nonnegative, summing to one.
// a(0) = -1 is implicit (the generator convention) and is never stored.
struct MobilityKernel {
  int d = 1;
  std::vector<KernelEntry> support;
  bool symmetric = true;

  // a(z) for z != 0; zero outside the support.
  double weight(const Offset& z) const;
};

// Symbol values over the n^d DFT grid k_j = 2*pi*j/n (row-major site order).
struct FourierSymbol {
  LatticeSpec lattice;
  std::vector<double> re;
  std::vector<double> im;
};

MobilityKernel build_kernel(int d, const std::vector<KernelEntry>& entries,
                            bool allow_asymmetric = false);
MobilityKernel kernel_nearest_neighbor(int d);
MobilityKernel kernel_gaussian(int d, double variance, int radius);

// a_hat(k) = sum_z a(z) e^{i k.z} - 1; real and in [-2, 0] for symmetric kernels.
std::complex<double> symbol(const MobilityKernel& kernel, std::span<const double> k);
FourierSymbol symbol_grid(const MobilityKernel& kernel, const LatticeSpec& lattice);

double kernel_variance(const MobilityKernel& kernel);
double effective_diffusion(const MobilityKernel& kernel, double kappa, double h);

// DFT frequency 2*pi*j/n folded into (-pi, pi] for reporting.
inline double grid_frequency(int j, int n) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  double k = two_pi * j / n;
  return k > 3.14159265358979323846 ? k - two_pi : k;
}

}  // namespace latticesir
