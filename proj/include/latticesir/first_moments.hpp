#pragma once

#include <span>
#include <vector>

#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"
#include "latticesir/rates.hpp"

namespace latticesir {

enum class Compartment { S, I, R };

const char* to_string(Compartment c);

struct MomentField {
  double t = 0.0;
  Compartment compartment = Compartment::S;
  LatticeSpec lattice;
  std::vector<double> values;

  double at(const Offset& x) const { return values[site_index(x, lattice)]; }
};

struct FirstMoments {
  MomentField S, I, R;
};

// Growth regimes of m1_I(t, x) at a Fourier mode k.
enum class MomentRegime { vanish, steady_delta, grow_origin_only, grow_everywhere };

const char* to_string(MomentRegime label);

struct RegimeReport {
  double alpha = 0.0;  // kappa * a_hat(k)
  double theta = 0.0;  // alpha + beta - gamma
  double mu = 0.0;     // alpha + beta + gamma
  double r0 = 0.0;
  double r0_mobility = 0.0;  // (kappa * a_hat(k) + beta) / gamma
  MomentRegime label = MomentRegime::vanish;
  bool conjectural = false;  // asymmetric kernel: Re a_hat used, flagged
};

double m1_homogeneous(const Rates& rates, double t, Compartment target, bool at_origin);

FirstMoments m1_inhomogeneous(const MobilityKernel& kernel, const Rates& rates, double t,
                              const LatticeSpec& lattice);

FirstMoments m1_ode_oracle(const MobilityKernel& kernel, const Rates& rates, double t,
                           const LatticeSpec& lattice);

struct ReproductionNumbers {
  double r0 = 0.0;
  std::vector<double> r0_mobility;  // per DFT grid mode, row-major
  double r0_mobility_max = 0.0;
};

ReproductionNumbers reproduction_numbers(const MobilityKernel& kernel, const Rates& rates,
                                         const LatticeSpec& lattice);

RegimeReport classify_first_moment(const MobilityKernel& kernel, const Rates& rates,
                                   std::span<const double> k);

}  // namespace latticesir
