#pragma once

#include <vector>

#include "latticesir/kernel.hpp"
#include "latticesir/lattice.hpp"
#include "latticesir/rates.hpp"

namespace latticesir {

enum class Space { homogeneous, inhomogeneous };

const char* to_string(Space space);

// Moment ratio m2(t) / m1(t)^2 at one site, normalized so m1(0) = 1.
// Homogeneous space has a closed form; inhomogeneous space is assembled from
// the moment evaluators on an automatically sized torus.
double ratio_same_site(const Rates& rates, const MobilityKernel& kernel, double t, Space space);

// Cross ratio m2(t, v) / (m1 m1) at separation v != 0.
double ratio_pair(const Rates& rates, const MobilityKernel& kernel, const Offset& v, double t,
                  Space space);

// Long-time limits of the homogeneous ratios, finite only when beta > gamma.
double ratio_limit_same_site(const Rates& rates);
double ratio_limit_pair(const Rates& rates, const MobilityKernel& kernel, const Offset& v);

struct IntermittencyReport {
  Space space = Space::homogeneous;
  Offset v{1, 0, 0};
  std::vector<double> times;            // geometric grid 2^j / (|beta-gamma| + kappa + 1)
  std::vector<double> ratio_same_site;
  std::vector<double> ratio_pair;
  const char* limit_label = "";         // "intermittent" | "bounded"
  double limit_same_site = 0.0;         // E1, set when bounded
  double limit_pair = 0.0;              // E2, set when bounded
  double t_star = 0.0;                  // series monotone beyond here
  bool witness_fired = false;           // >= 10x growth across the last decade
  int lattice_n = 0;                    // torus used for inhomogeneous ratios
};

IntermittencyReport classify_intermittency(const Rates& rates, const MobilityKernel& kernel,
                                           Space space, const Offset& v = Offset{1, 0, 0});

}  // namespace latticesir
