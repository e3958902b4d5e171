#pragma once

#include <array>
#include <cstdint>

#include "latticesir/error.hpp"

namespace latticesir {

// Offsets and coordinates live in at most three dimensions; unused axes stay 0.
using Offset = std::array<int, 3>;

// Periodic torus Z_n^d with optional physical spacing h.
struct LatticeSpec {
  int d = 1;
  int n = 64;
  double h = 1.0;

  LatticeSpec(int d_, int n_, double h_ = 1.0) : d(d_), n(n_), h(h_) {
    if (d < 1 || d > 3) fail(ErrorCode::UnsupportedDimension, "d must be 1, 2, or 3");
    if (n < 2) fail(ErrorCode::ValidationError, "n must be >= 2");
    if (!(h > 0.0)) fail(ErrorCode::ValidationError, "h must be positive");
  }

  std::int64_t sites() const {
    std::int64_t s = 1;
    for (int a = 0; a < d; ++a) s *= n;
    return s;
  }
};

inline int wrap(int v, int n) {
  int r = v % n;
  return r < 0 ? r + n : r;
}

// Row-major indexing: index = ((x0*n + x1)*n + x2) over the first d axes.
inline std::int64_t site_index(const Offset& x, const LatticeSpec& lat) {
  std::int64_t idx = 0;
  for (int a = 0; a < lat.d; ++a) idx = idx * lat.n + wrap(x[a], lat.n);
  return idx;
}

inline Offset site_coords(std::int64_t idx, const LatticeSpec& lat) {
  Offset x{0, 0, 0};
  for (int a = lat.d - 1; a >= 0; --a) {
    x[a] = static_cast<int>(idx % lat.n);
    idx /= lat.n;
  }
  return x;
}

// Signed displacement to the nearest periodic image, per axis.
inline int min_image(int delta, int n) {
  int r = wrap(delta, n);
  return r > n / 2 ? r - n : r;
}

}  // namespace latticesir
