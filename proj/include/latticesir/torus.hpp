#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"

namespace latticesir {

// One row p(t, 0, x) of the walk's transition matrix; translation invariance
// makes one row sufficient.
struct TransitionField {
  LatticeSpec lattice;
  double t = 0.0;
  std::vector<double> values;

  double at(const Offset& x) const { return values[site_index(x, lattice)]; }
};

enum class WalkRegime { transient, recurrent };

const char* to_string(WalkRegime regime);

struct GreenResult {
  double lambda = 0.0;
  double value = 0.0;  // +infinity marker when recurrent at lambda = 0
  WalkRegime regime = WalkRegime::recurrent;
  int smallk_order = 2;
  std::array<int, 2> resolutions_used{0, 0};
};

// (1/n^d) * sum of grid values: the n-point trapezoid rule for
// (1/(2pi)^d) * integral over T^d, exact for the finite torus.
std::complex<double> torus_integrate(std::span<const std::complex<double>> grid_values);

TransitionField transition_probability(const MobilityKernel& kernel, double kappa,
                                       double t, const LatticeSpec& lattice);

double p00(const MobilityKernel& kernel, double kappa, double t,
           const LatticeSpec& lattice);

struct DecayFit {
  double amplitude = 0.0;  // prefactor of t^{-exponent}
  double exponent = 0.0;
};

DecayFit p00_decay_fit(const MobilityKernel& kernel, double kappa,
                       std::span<const double> t_grid, const LatticeSpec& lattice);

GreenResult green_function(const MobilityKernel& kernel, double kappa, double lambda,
                           const LatticeSpec& lattice);

}  // namespace latticesir
