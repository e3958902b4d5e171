#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "latticesir/first_moments.hpp"
#include "latticesir/second_moments.hpp"

namespace latticesir {

namespace {

namespace ode = boost::numeric::odeint;

// gather tables: table[e][x] = site of x - z_e, so sums run in the same
// direction the walk moves
std::vector<std::vector<std::int32_t>> jump_tables(const MobilityKernel& kernel,
                                                   const LatticeSpec& lattice) {
  auto N = lattice.sites();
  std::vector<std::vector<std::int32_t>> nb(kernel.support.size());
  for (std::size_t e = 0; e < kernel.support.size(); ++e) {
    nb[e].resize(N);
    const Offset& z = kernel.support[e].z;
    for (std::int64_t i = 0; i < N; ++i) {
      Offset x = site_coords(i, lattice);
      nb[e][i] = static_cast<std::int32_t>(
          site_index(Offset{x[0] - z[0], x[1] - z[1], x[2] - z[2]}, lattice));
    }
  }
  return nb;
}

template <typename Real>
void check_finite(const std::vector<Real>& y) {
  for (const Real& v : y)
    if (!std::isfinite(static_cast<double>(v)))
      fail(ErrorCode::IntegratorFailure, "state left the finite range");
}

}  // namespace

FirstMoments m1_ode_oracle(const MobilityKernel& kernel, const Rates& rates, double t,
                           const LatticeSpec& lattice) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");

  auto N = lattice.sites();
  auto nb = jump_tables(kernel, lattice);
  std::size_t E = kernel.support.size();

  using state_t = std::vector<long double>;
  state_t y(3 * N, 0.0L);
  for (std::int64_t i = 0; i < N; ++i) y[i] = rates.rho0;
  y[N] = 1.0L;  // I = delta at the origin

  long double kappa = rates.kappa, beta = rates.beta, gamma = rates.gamma;
  auto rhs = [&](const state_t& x, state_t& dx, long double) {
    for (int f = 0; f < 3; ++f) {
      const long double* src = x.data() + f * N;
      long double* dst = dx.data() + f * N;
      for (std::int64_t i = 0; i < N; ++i) {
        long double s = 0.0L;
        for (std::size_t e = 0; e < E; ++e) s += kernel.support[e].w * src[nb[e][i]];
        dst[i] = kappa * (s - src[i]);
      }
    }
    for (std::int64_t i = 0; i < N; ++i) {
      long double inf = x[N + i];
      dx[i] -= beta * inf;
      dx[N + i] += (beta - gamma) * inf;
      dx[2 * N + i] += gamma * inf;
    }
  };

  if (t > 0.0) {
    using stepper_t = ode::runge_kutta_dopri5<state_t, long double>;
    try {
      ode::integrate_adaptive(ode::make_controlled<stepper_t>(1e-24L, 1e-13L), rhs, y,
                              0.0L, static_cast<long double>(t),
                              std::min<long double>(0.01L, t));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& ex) {
      fail(ErrorCode::IntegratorFailure, ex.what());
    }
    check_finite(y);
  }

  FirstMoments out{MomentField{t, Compartment::S, lattice, std::vector<double>(N)},
                   MomentField{t, Compartment::I, lattice, std::vector<double>(N)},
                   MomentField{t, Compartment::R, lattice, std::vector<double>(N)}};
  for (std::int64_t i = 0; i < N; ++i) {
    out.S.values[i] = static_cast<double>(y[i]);
    out.I.values[i] = static_cast<double>(y[N + i]);
    out.R.values[i] = static_cast<double>(y[2 * N + i]);
  }
  return out;
}

// Joint integration of the five pair fields and the three first-moment
// fields. Every pair field sees the same two-slot jump operator; the pair
// sources differ per field as in the moment derivation:
//   SS:  -beta*(SI + SI^T) - kappa*a(y-x)*(s_x + s_y),  diag extra kappa*Ls + beta*i
//   II:  2(b-g)*II         - kappa*a(y-x)*(i_x + i_y),  diag extra kappa*Li + (b+g)*i
//   RR:  +gamma*(RI + RI^T) - kappa*a(y-x)*(r_x + r_y), diag extra kappa*Lr + gamma*i
//   SI:  (b-g)*SI - beta*II,                            diag extra -beta*i
//   RI:  (b-g)*RI + gamma*II,                           diag extra -gamma*i
// with a(0) = -1, so the same-site equations come out of the shared form.
PairFields m2_ode_oracle(const MobilityKernel& kernel, const Rates& rates, double t,
                         const LatticeSpec& lattice) {
  if (kernel.d != lattice.d)
    fail(ErrorCode::DimensionMismatch, "kernel.d differs from lattice.d");
  if (t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");

  auto N = lattice.sites();
  if (N > 64)
    fail(ErrorCode::SystemTooLarge,
         "pair system needs n^d <= 64 sites, got " + std::to_string(N));

  auto nb = jump_tables(kernel, lattice);
  std::size_t E = kernel.support.size();

  // torus-folded kernel weights by target site, with the a(0) = -1 onsite term
  std::vector<double> aw(N, 0.0);
  aw[0] = -1.0;
  for (const auto& e : kernel.support) aw[site_index(e.z, lattice)] += e.w;

  const std::int64_t NP = N * N;
  enum { SS, II, RR, SI, RI };
  const std::int64_t m1s = 5 * NP, m1i = 5 * NP + N, m1r = 5 * NP + 2 * N;

  using state_t = std::vector<double>;
  state_t y(5 * NP + 3 * N, 0.0);
  for (std::int64_t x = 0; x < N; ++x) {
    for (std::int64_t yy = 0; yy < N; ++yy) y[SS * NP + x * N + yy] = rates.rho0 * rates.rho0;
    y[SI * NP + x * N + 0] = rates.rho0;  // E[S(x) I(0)] at t=0
    y[m1s + x] = rates.rho0;
  }
  y[II * NP] = 1.0;
  y[m1i] = 1.0;

  double kappa = rates.kappa, beta = rates.beta, gamma = rates.gamma;
  double growth = beta - gamma;

  auto one_slot = [&](const double* src, std::int64_t i) {
    double s = 0.0;
    for (std::size_t e = 0; e < E; ++e) s += kernel.support[e].w * src[nb[e][i]];
    return s - src[i];
  };

  auto rhs = [&](const state_t& v, state_t& dv, double) {
    const double* s1 = v.data() + m1s;
    const double* i1 = v.data() + m1i;
    const double* r1 = v.data() + m1r;

    // two-slot jump operator on each pair field
    for (int f = 0; f < 5; ++f) {
      const double* M = v.data() + f * NP;
      double* dM = dv.data() + f * NP;
      for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t yy = 0; yy < N; ++yy) {
          double s = 0.0;
          for (std::size_t e = 0; e < E; ++e)
            s += kernel.support[e].w * (M[nb[e][x] * N + yy] + M[x * N + nb[e][yy]]);
          dM[x * N + yy] = kappa * (s - 2.0 * M[x * N + yy]);
        }
    }

    const double* mii = v.data() + II * NP;
    const double* msi = v.data() + SI * NP;
    const double* mri = v.data() + RI * NP;

    for (std::int64_t x = 0; x < N; ++x)
      for (std::int64_t yy = 0; yy < N; ++yy) {
        std::int64_t p = x * N + yy, pt = yy * N + x;
        dv[SS * NP + p] -= beta * (msi[p] + msi[pt]);
        dv[II * NP + p] += 2.0 * growth * mii[p];
        dv[RR * NP + p] += gamma * (mri[p] + mri[pt]);
        dv[SI * NP + p] += growth * msi[p] - beta * mii[p];
        dv[RI * NP + p] += growth * mri[p] + gamma * mii[p];
      }

    // migration exchange sources and same-site extras
    for (std::int64_t x = 0; x < N; ++x) {
      Offset cx = site_coords(x, lattice);
      for (std::int64_t yy = 0; yy < N; ++yy) {
        Offset cy = site_coords(yy, lattice);
        Offset dxy{cy[0] - cx[0], cy[1] - cx[1], cy[2] - cx[2]};
        double a_xy = aw[site_index(dxy, lattice)];
        std::int64_t p = x * N + yy;
        dv[SS * NP + p] -= kappa * a_xy * (s1[x] + s1[yy]);
        dv[II * NP + p] -= kappa * a_xy * (i1[x] + i1[yy]);
        dv[RR * NP + p] -= kappa * a_xy * (r1[x] + r1[yy]);
      }
      std::int64_t d = x * N + x;
      dv[SS * NP + d] += kappa * one_slot(s1, x) + beta * i1[x];
      dv[II * NP + d] += kappa * one_slot(i1, x) + (beta + gamma) * i1[x];
      dv[RR * NP + d] += kappa * one_slot(r1, x) + gamma * i1[x];
      dv[SI * NP + d] -= beta * i1[x];
      dv[RI * NP + d] -= gamma * i1[x];
    }

    // first moments ride along
    for (std::int64_t x = 0; x < N; ++x) {
      dv[m1s + x] = kappa * one_slot(s1, x) - beta * i1[x];
      dv[m1i + x] = kappa * one_slot(i1, x) + growth * i1[x];
      dv[m1r + x] = kappa * one_slot(r1, x) + gamma * i1[x];
    }
  };

  if (t > 0.0) {
    using stepper_t = ode::runge_kutta_dopri5<state_t>;
    try {
      ode::integrate_adaptive(ode::make_controlled<stepper_t>(1e-14, 1e-12), rhs, y, 0.0,
                              t, std::min(1e-3, t));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& ex) {
      fail(ErrorCode::IntegratorFailure, ex.what());
    }
    check_finite(y);
  }

  PairFields out{lattice, t, {}, {}, {}, {}, {}, {}, {}, {}};
  auto cut = [&](int f) {
    return std::vector<double>(y.begin() + f * NP, y.begin() + (f + 1) * NP);
  };
  out.SS = cut(SS);
  out.II = cut(II);
  out.RR = cut(RR);
  out.SI = cut(SI);
  out.RI = cut(RI);
  out.m1S.assign(y.begin() + m1s, y.begin() + m1s + N);
  out.m1I.assign(y.begin() + m1i, y.begin() + m1i + N);
  out.m1R.assign(y.begin() + m1r, y.begin() + m1r + N);
  return out;
}

}  // namespace latticesir
