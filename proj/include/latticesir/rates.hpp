#pragma once

#include <algorithm>
#include <cmath>

#include "latticesir/error.hpp"

namespace latticesir {

// Model rates: kappa (per-particle jump rate), beta (infection), gamma
// (recovery), rho0 (initial susceptible level per site).
struct Rates {
  double kappa = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double rho0 = 1.0;

  Rates(double kappa_, double beta_, double gamma_, double rho0_ = 1.0)
      : kappa(kappa_), beta(beta_), gamma(gamma_), rho0(rho0_) {
    if (!(std::isfinite(kappa) && std::isfinite(beta) && std::isfinite(gamma) &&
          std::isfinite(rho0)))
      fail(ErrorCode::ValidationError, "rates must be finite");
    if (kappa < 0.0) fail(ErrorCode::ValidationError, "kappa must be >= 0");
    if (beta < 0.0) fail(ErrorCode::ValidationError, "beta must be >= 0");
    if (gamma < 0.0) fail(ErrorCode::ValidationError, "gamma must be >= 0");
    if (rho0 < 0.0) fail(ErrorCode::ValidationError, "rho0 must be >= 0");
  }

  double growth() const { return beta - gamma; }

  // beta == gamma up to construction noise; the growth-rate branch point.
  bool critical() const {
    return std::abs(beta - gamma) <= 1e-12 * std::max(beta, gamma);
  }

  // integral_0^t e^{(beta-gamma)s} ds, continuous through beta == gamma.
  double growth_integral(double t) const {
    if (critical()) return t;
    double b = growth();
    return std::expm1(b * t) / b;
  }
};

}  // namespace latticesir
