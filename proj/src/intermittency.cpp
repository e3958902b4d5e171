#include "latticesir/intermittency.hpp"

#include <cmath>
#include <cstdint>

#include "latticesir/second_moments.hpp"
#include "latticesir/torus.hpp"

namespace latticesir {

const char* to_string(Space space) {
  return space == Space::homogeneous ? "homogeneous" : "inhomogeneous";
}

namespace {

bool zero_offset(const Offset& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

// torus wide enough that the walk does not feel the wrap by time t; the pair
// field spreads at rate 2 kappa
LatticeSpec auto_lattice(const MobilityKernel& kernel, const Rates& rates, double t) {
  double spread = 8.0 * std::sqrt(2.0 * rates.kappa * kernel_variance(kernel) * t);
  std::int64_t need = std::max<std::int64_t>(64, static_cast<std::int64_t>(std::ceil(spread)));
  int n = 64;
  while (n < need) n *= 2;
  return LatticeSpec(kernel.d, n);
}

double mean_at(double m1, const char* where) {
  if (!(m1 >= 1e-300)) fail(ErrorCode::VanishingMean, where);
  return m1;
}

double inhomogeneous_same_site(const Rates& rates, const MobilityKernel& kernel, double t,
                               const LatticeSpec& lattice) {
  double m2 =
      m2_inhomogeneous(kernel, rates, t, lattice, PairKind::same_site).value;
  double m1 = mean_at(std::exp(rates.growth() * t) * p00(kernel, rates.kappa, t, lattice),
                      "m1 at the origin underflowed");
  return m2 / (m1 * m1);
}

double inhomogeneous_pair(const Rates& rates, const MobilityKernel& kernel, const Offset& v,
                          double t, const LatticeSpec& lattice) {
  double m2 = m2_inhomogeneous(kernel, rates, t, lattice, PairKind::pair, v).value;
  TransitionField p = transition_probability(kernel, rates.kappa, t, lattice);
  double ebt = std::exp(rates.growth() * t);
  double m1_origin = mean_at(ebt * p.at(Offset{0, 0, 0}), "m1 at the origin underflowed");
  double m1_v = mean_at(ebt * p.at(v), "m1 at the separated site underflowed");
  return m2 / (m1_origin * m1_v);
}

}  // namespace

double ratio_same_site(const Rates& rates, const MobilityKernel& kernel, double t,
                       Space space) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (space == Space::homogeneous) {
    double drive = rates.beta + rates.gamma + 2.0 * rates.kappa;
    if (rates.critical()) return rates.rho0 + drive * t;
    double b = rates.growth();
    return rates.rho0 + (drive / -b) * std::expm1(-b * t);
  }
  return inhomogeneous_same_site(rates, kernel, t, auto_lattice(kernel, rates, t));
}

double ratio_pair(const Rates& rates, const MobilityKernel& kernel, const Offset& v, double t,
                  Space space) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (zero_offset(v)) fail(ErrorCode::ZeroSeparation, "pair ratio needs v != 0");
  if (space == Space::homogeneous) {
    double av = kernel.weight(v);
    if (rates.critical()) return rates.rho0 - 2.0 * rates.kappa * av * t;
    double b = rates.growth();
    return rates.rho0 + (2.0 * rates.kappa * av / b) * std::expm1(-b * t);
  }
  return inhomogeneous_pair(rates, kernel, v, t, auto_lattice(kernel, rates, t));
}

double ratio_limit_same_site(const Rates& rates) {
  if (rates.critical() || rates.growth() <= 0.0)
    fail(ErrorCode::ValidationError, "ratio limit is finite only for beta > gamma");
  return rates.rho0 + (rates.beta + rates.gamma + 2.0 * rates.kappa) / rates.growth();
}

double ratio_limit_pair(const Rates& rates, const MobilityKernel& kernel, const Offset& v) {
  if (zero_offset(v)) fail(ErrorCode::ZeroSeparation, "pair ratio needs v != 0");
  if (rates.critical() || rates.growth() <= 0.0)
    fail(ErrorCode::ValidationError, "ratio limit is finite only for beta > gamma");
  return rates.rho0 - 2.0 * rates.kappa * kernel.weight(v) / rates.growth();
}

IntermittencyReport classify_intermittency(const Rates& rates, const MobilityKernel& kernel,
                                           Space space, const Offset& v) {
  if (zero_offset(v)) fail(ErrorCode::ZeroSeparation, "pair ratio needs v != 0");

  IntermittencyReport report;
  report.space = space;
  report.v = v;

  double c = std::abs(rates.growth()) + rates.kappa + 1.0;
  for (int j = 0; j <= 10; ++j) report.times.push_back(std::exp2(j) / c);

  if (space == Space::homogeneous) {
    for (double t : report.times) {
      report.ratio_same_site.push_back(ratio_same_site(rates, kernel, t, space));
      report.ratio_pair.push_back(ratio_pair(rates, kernel, v, t, space));
    }
    bool bounded = !rates.critical() && rates.growth() > 0.0;
    report.limit_label = bounded ? "bounded" : "intermittent";
    if (bounded) {
      report.limit_same_site = ratio_limit_same_site(rates);
      report.limit_pair = ratio_limit_pair(rates, kernel, v);
    }
  } else {
    LatticeSpec lattice = auto_lattice(kernel, rates, report.times.back());
    report.lattice_n = lattice.n;
    for (double t : report.times) {
      report.ratio_same_site.push_back(inhomogeneous_same_site(rates, kernel, t, lattice));
      report.ratio_pair.push_back(inhomogeneous_pair(rates, kernel, v, t, lattice));
    }
    report.limit_label = "intermittent";
  }

  report.witness_fired = report.ratio_same_site[10] >= 10.0 * report.ratio_same_site[6];

  std::size_t star = report.times.size() - 1;
  while (star > 0 && report.ratio_same_site[star] >= report.ratio_same_site[star - 1]) --star;
  report.t_star = report.times[star];
  return report;
}

}  // namespace latticesir
