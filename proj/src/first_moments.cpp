#include "latticesir/first_moments.hpp"

#include <algorithm>
#include <cmath>

#include "latticesir/torus.hpp"

namespace latticesir {

const char* to_string(Compartment c) {
  switch (c) {
    case Compartment::S: return "S";
    case Compartment::I: return "I";
    default: return "R";
  }
}

const char* to_string(MomentRegime label) {
  switch (label) {
    case MomentRegime::vanish: return "vanish";
    case MomentRegime::steady_delta: return "steady_delta";
    case MomentRegime::grow_origin_only: return "grow_origin_only";
    default: return "grow_everywhere";
  }
}

double m1_homogeneous(const Rates& rates, double t, Compartment target, bool at_origin) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  double delta = at_origin ? 1.0 : 0.0;
  switch (target) {
    case Compartment::I: return delta * std::exp(rates.growth() * t);
    case Compartment::R: return rates.gamma * delta * rates.growth_integral(t);
    default: return rates.rho0 - rates.beta * delta * rates.growth_integral(t);
  }
}

// All three fields are affine in p(t,0,x): the infected field rides the
// semigroup, and the S/R fields accumulate -beta / +gamma of its time
// integral, which collapses to growth_integral by the semigroup property.
FirstMoments m1_inhomogeneous(const MobilityKernel& kernel, const Rates& rates, double t,
                              const LatticeSpec& lattice) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");

  TransitionField p = transition_probability(kernel, rates.kappa, t, lattice);
  double ebt = std::exp(rates.growth() * t);
  double c = rates.growth_integral(t);

  FirstMoments out{
      MomentField{t, Compartment::S, lattice, std::vector<double>(p.values.size())},
      MomentField{t, Compartment::I, lattice, std::vector<double>(p.values.size())},
      MomentField{t, Compartment::R, lattice, std::vector<double>(p.values.size())}};
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    out.S.values[i] = rates.rho0 - rates.beta * c * p.values[i];
    out.I.values[i] = ebt * p.values[i];
    out.R.values[i] = rates.gamma * c * p.values[i];
  }
  return out;
}

namespace {

// sign with a dead zone: grid frequencies hit the regime boundaries only up
// to trig roundoff
int sign_with_tolerance(double x) {
  constexpr double kZero = 1e-9;
  if (std::abs(x) <= kZero) return 0;
  return x < 0.0 ? -1 : 1;
}

}  // namespace

ReproductionNumbers reproduction_numbers(const MobilityKernel& kernel, const Rates& rates,
                                         const LatticeSpec& lattice) {
  if (rates.gamma <= 0.0) fail(ErrorCode::ZeroRecovery, "gamma must be positive");
  auto grid = symbol_grid(kernel, lattice);
  ReproductionNumbers out;
  out.r0 = rates.beta / rates.gamma;
  out.r0_mobility.resize(grid.re.size());
  double max_re = grid.re[0];
  for (std::size_t i = 0; i < grid.re.size(); ++i) {
    out.r0_mobility[i] = (rates.kappa * grid.re[i] + rates.beta) / rates.gamma;
    max_re = std::max(max_re, grid.re[i]);
  }
  out.r0_mobility_max = out.r0 + rates.kappa * max_re / rates.gamma;
  return out;
}

RegimeReport classify_first_moment(const MobilityKernel& kernel, const Rates& rates,
                                   std::span<const double> k) {
  if (rates.gamma <= 0.0) fail(ErrorCode::ZeroRecovery, "gamma must be positive");
  auto s = symbol(kernel, k);

  RegimeReport report;
  report.conjectural = !kernel.symmetric;
  report.alpha = rates.kappa * s.real();
  report.theta = report.alpha + rates.growth();
  report.mu = report.alpha + rates.beta + rates.gamma;
  report.r0 = rates.beta / rates.gamma;
  report.r0_mobility = (rates.kappa * s.real() + rates.beta) / rates.gamma;

  int theta_sign = sign_with_tolerance(report.theta);
  int alpha_sign = sign_with_tolerance(report.alpha);
  if (theta_sign < 0)
    report.label = MomentRegime::vanish;
  else if (theta_sign == 0)
    report.label = MomentRegime::steady_delta;
  else
    report.label = alpha_sign == 0 ? MomentRegime::grow_origin_only
                                   : MomentRegime::grow_everywhere;
  return report;
}

}  // namespace latticesir
