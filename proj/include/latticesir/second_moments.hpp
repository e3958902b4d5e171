#pragma once

#include <array>
#include <vector>

#include "latticesir/first_moments.hpp"
#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"
#include "latticesir/rates.hpp"

namespace latticesir {

enum class PairKind { same_site, pair };
enum class PairTag { II, SS, RR, SI, RI };

const char* to_string(PairKind kind);
const char* to_string(PairTag tag);

struct PairMoment {
  double t = 0.0;
  PairKind kind = PairKind::same_site;
  Offset v{0, 0, 0};  // separation; zero for same_site
  double value = 0.0;
  PairTag tag = PairTag::II;
};

// Full set of pair fields over all site pairs, N x N row-major in (x, y),
// plus the first-moment fields integrated alongside.
struct PairFields {
  LatticeSpec lattice;
  double t = 0.0;
  std::vector<double> II, SS, RR, SI, RI;
  std::vector<double> m1S, m1I, m1R;

  double pair_at(const std::vector<double>& field, const Offset& x, const Offset& y) const {
    auto N = lattice.sites();
    return field[site_index(x, lattice) * N + site_index(y, lattice)];
  }
};

double m2_homogeneous_same_site(const Rates& rates, double t);
double m2_homogeneous_pair(const Rates& rates, const MobilityKernel& kernel,
                           const Offset& v, double t);

// Duhamel evaluation of m2_II at one site pair: semigroup lead plus a
// Gauss-Legendre time convolution of the first-moment source, nodes doubled
// until two successive levels agree to 1e-8 relative.
// paper_verbatim switches to the literal printed spectral expressions, kept
// only so their divergence from the Duhamel/ODE values can be demonstrated.
PairMoment m2_inhomogeneous(const MobilityKernel& kernel, const Rates& rates, double t,
                            const LatticeSpec& lattice, PairKind kind,
                            const Offset& v = Offset{0, 0, 0},
                            bool paper_verbatim = false);

PairFields m2_ode_oracle(const MobilityKernel& kernel, const Rates& rates, double t,
                         const LatticeSpec& lattice);

// Asymptotic labels for m2_I(t,x,x) and m2_I(t,v).
struct SecondMomentRegime {
  double alpha = 0.0;
  double theta = 0.0;
  double mu = 0.0;
  // homogeneous space, keyed by sign(beta - gamma)
  const char* homogeneous_same_site = "";
  const char* homogeneous_pair = "";
  // inhomogeneous space, first matching table row
  const char* inhomogeneous_same_site = "";
  const char* inhomogeneous_pair = "";
  int row = 0;  // 1-6, 0 when no row matches
};

SecondMomentRegime classify_second_moment(const MobilityKernel& kernel, const Rates& rates,
                                          std::span<const double> k);

// Row catalogue of the inhomogeneous asymptotics table; rows conditioned on
// beta + gamma < 0 carry feasible = false (unreachable for nonnegative rates).
struct PairRegimeRow {
  int row = 0;
  const char* condition = "";
  const char* same_site = "";
  const char* pair = "";
  bool feasible = true;
};

std::array<PairRegimeRow, 6> pair_regime_rows();

}  // namespace latticesir
