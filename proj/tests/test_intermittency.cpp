#include "doctest.h"

#include <cmath>
#include <string>

#include "latticesir/error.hpp"
#include "latticesir/first_moments.hpp"
#include "latticesir/intermittency.hpp"
#include "latticesir/second_moments.hpp"
#include "latticesir/torus.hpp"

using namespace latticesir;

TEST_CASE("homogeneous ratios start at rho0 and grow at the drive rate") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(1.0, 0.6, 0.4, 2.5);
  CHECK(ratio_same_site(r, k, 0.0, Space::homogeneous) == doctest::Approx(2.5));
  CHECK(ratio_pair(r, k, Offset{1, 0, 0}, 0.0, Space::homogeneous) ==
        doctest::Approx(2.5));

  // d/dt at 0 is beta + gamma + 2 kappa
  double h = 1e-6;
  double slope = (ratio_same_site(r, k, h, Space::homogeneous) - 2.5) / h;
  CHECK(slope == doctest::Approx(3.0).epsilon(1e-5));

  CHECK_THROWS_AS(ratio_same_site(r, k, -1.0, Space::homogeneous), Error);
  CHECK_THROWS_AS(ratio_pair(r, k, Offset{0, 0, 0}, 1.0, Space::homogeneous), Error);
}

TEST_CASE("supercritical homogeneous ratios settle at their limits") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(1.0, 0.6, 0.4, 1.0);
  Offset v{1, 0, 0};

  CHECK(ratio_limit_same_site(r) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(ratio_limit_pair(r, k, v) == doctest::Approx(-4.0).epsilon(1e-12));

  // at t = 50 the residuals are exactly 15 e^{-10} and 5 e^{-10}
  CHECK(ratio_same_site(r, k, 50.0, Space::homogeneous) ==
        doctest::Approx(16.0 - 15.0 * std::exp(-10.0)).epsilon(1e-12));
  CHECK(ratio_pair(r, k, v, 50.0, Space::homogeneous) ==
        doctest::Approx(-4.0 + 5.0 * std::exp(-10.0)).epsilon(1e-12));

  // exponential approach: |ratio(t) - E1| = |rho0 - E1| e^{-(beta-gamma)t}
  for (double t : {1.0, 2.0, 5.0}) {
    double gap = std::abs(ratio_same_site(r, k, t, Space::homogeneous) - 16.0);
    CHECK(gap <= 15.0 * std::exp(-0.2 * t) * (1.0 + 1e-12));
  }

  CHECK_THROWS_AS(ratio_limit_same_site(Rates(1.0, 0.4, 0.6)), Error);
  CHECK_THROWS_AS(ratio_limit_same_site(Rates(1.0, 0.5, 0.5)), Error);
  CHECK_THROWS_AS(ratio_limit_pair(Rates(1.0, 0.6, 0.4), k, Offset{0, 0, 0}), Error);
}

TEST_CASE("critical homogeneous ratios are linear in t") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(1.0, 0.5, 0.5, 1.0);
  CHECK(ratio_same_site(r, k, 10.0, Space::homogeneous) ==
        doctest::Approx(31.0).epsilon(1e-13));
  CHECK(ratio_same_site(r, k, 100.0, Space::homogeneous) /
            ratio_same_site(r, k, 10.0, Space::homogeneous) >=
        9.0);
  CHECK(ratio_pair(r, k, Offset{1, 0, 0}, 10.0, Space::homogeneous) ==
        doctest::Approx(1.0 - 10.0).epsilon(1e-13));
}

TEST_CASE("closed-form ratios equal the moment-module assembly") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(0.5, 0.7, 0.3, 2.0);
  Offset v{1, 0, 0};
  for (double t : {0.4, 1.7, 3.0}) {
    double m1 = m1_homogeneous(r, t, Compartment::I, true);
    double same = m2_homogeneous_same_site(r, t) / (m1 * m1);
    CHECK(ratio_same_site(r, k, t, Space::homogeneous) ==
          doctest::Approx(same).epsilon(1e-10));
    double off = m2_homogeneous_pair(r, k, v, t) / (m1 * m1);
    CHECK(ratio_pair(r, k, v, t, Space::homogeneous) ==
          doctest::Approx(off).epsilon(1e-10));
  }
}

TEST_CASE("inhomogeneous ratio assembles moments on an expanded torus") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(1.0, 0.4, 0.6, 1.0);
  double t = 1.0;

  // at t = 1 the automatic torus is the 64-site floor
  LatticeSpec lat(1, 64);
  double m2 = m2_inhomogeneous(k, r, t, lat, PairKind::same_site).value;
  double m1 = std::exp(r.growth() * t) * p00(k, r.kappa, t, lat);
  CHECK(ratio_same_site(r, k, t, Space::inhomogeneous) ==
        doctest::Approx(m2 / (m1 * m1)).epsilon(1e-12));

  // the normalization is the point mass, so the t = 0 ratio is 1, not rho0
  CHECK(ratio_same_site(r, k, 0.0, Space::inhomogeneous) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alternative printed ratio forms diverge from the assembly") {
  // Closed forms involving e^{3(beta-gamma)t} that circulate for these
  // ratios; they do not solve the pair system this library integrates, so
  // they are evaluated here only to record the disagreement.
  MobilityKernel k = kernel_nearest_neighbor(1);
  Rates r(1.0, 0.4, 0.6, 1.0);
  LatticeSpec lat(1, 64);
  double t = 1.0;
  double b3 = 3.0 * r.growth();
  double drive = r.beta + r.gamma + 2.0 * r.kappa;

  double p = p00(k, r.kappa, t, lat);
  double printed_same = r.rho0 / p + r.kappa * std::expm1(b3 * t) / (b3 * p * p) +
                        drive / (b3 * p) * std::expm1(b3 * t);
  double assembled_same = ratio_same_site(r, k, t, Space::inhomogeneous);
  CHECK(std::abs(printed_same - assembled_same) > 0.1 * std::abs(assembled_same));

  Offset v{1, 0, 0};
  TransitionField field = transition_probability(k, r.kappa, t, lat);
  double pv = field.at(v);
  double printed_pair =
      r.rho0 / pv - 2.0 * r.kappa * k.weight(v) / (b3 * pv) * std::expm1(b3 * t);
  double assembled_pair = ratio_pair(r, k, v, t, Space::inhomogeneous);
  CHECK(std::abs(printed_pair - assembled_pair) > 0.1 * std::abs(assembled_pair));

  // both conventions agree on the t = 0 value at unit rho0
  double printed_zero = r.rho0 / p00(k, r.kappa, 0.0, lat);
  CHECK(printed_zero == doctest::Approx(1.0));
  CHECK(ratio_same_site(r, k, 0.0, Space::inhomogeneous) == doctest::Approx(1.0));
}

TEST_CASE("classification separates bounded from intermittent growth") {
  MobilityKernel k = kernel_nearest_neighbor(1);

  IntermittencyReport sub = classify_intermittency(Rates(1.0, 0.3, 0.5), k,
                                                   Space::homogeneous);
  CHECK(std::string(sub.limit_label) == "intermittent");
  CHECK(sub.witness_fired);
  REQUIRE(sub.times.size() == 11);
  CHECK(sub.times[10] / sub.times[0] == doctest::Approx(1024.0));
  CHECK(sub.times[0] == doctest::Approx(1.0 / 2.2));

  IntermittencyReport crit = classify_intermittency(Rates(1.0, 0.5, 0.5), k,
                                                    Space::homogeneous);
  CHECK(std::string(crit.limit_label) == "intermittent");
  CHECK(crit.witness_fired);

  IntermittencyReport super = classify_intermittency(Rates(1.0, 0.6, 0.4), k,
                                                     Space::homogeneous);
  CHECK(std::string(super.limit_label) == "bounded");
  CHECK_FALSE(super.witness_fired);
  CHECK(super.limit_same_site == doctest::Approx(16.0));
  CHECK(super.limit_pair == doctest::Approx(-4.0));
  // monotone from the start
  CHECK(super.t_star == doctest::Approx(super.times[0]));

  CHECK_THROWS_AS(classify_intermittency(Rates(1.0, 0.5, 0.5), k, Space::homogeneous,
                                         Offset{0, 0, 0}),
                  Error);
}

TEST_CASE("inhomogeneous space is intermittent for decaying means") {
  MobilityKernel k = kernel_nearest_neighbor(1);
  IntermittencyReport rep = classify_intermittency(Rates(1.0, 0.4, 0.6), k,
                                                   Space::inhomogeneous);
  CHECK(std::string(rep.limit_label) == "intermittent");
  CHECK(rep.witness_fired);
  CHECK(rep.lattice_n >= 64);
  CHECK((rep.lattice_n & (rep.lattice_n - 1)) == 0);

  // series is nondecreasing beyond the reported t*
  bool seen_star = false;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (rep.times[i] == rep.t_star) seen_star = true;
    if (seen_star && i + 1 < rep.times.size())
      CHECK(rep.ratio_same_site[i + 1] >= rep.ratio_same_site[i] * (1.0 - 1e-12));
  }
  CHECK(seen_star);
}
