#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace abelian::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2, Neon };

// Flat table of the hot coordinatewise loops. Every backend fills the same
// table; elementwise entries are bit-identical across backends (same rounding
// sequence, no FMA), reductions may differ in the last ulps because lanes
// reassociate the sums.
struct Ops {
  void (*add)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*sub)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*mul)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*conj)(const cplx*, cplx*, std::size_t);
  void (*scale)(cplx, const cplx*, cplx*, std::size_t);
  double (*max_abs2)(const cplx*, std::size_t);
  cplx (*weighted_sum)(const double*, const cplx*, std::size_t);
  // sum of w[i] over coordinates with Re(a[i]) <= t
  double (*mass_le)(const double*, const cplx*, double, std::size_t);
  double (*sum)(const double*, std::size_t);
};

// Active table. First call resolves the backend: ABELIAN_INFO_SIMD=scalar|avx2|neon
// overrides, otherwise the best supported one wins.
const Ops& active();

Backend active_backend();
bool backend_available(Backend b);
std::vector<Backend> available_backends();
void set_backend(Backend b);  // throws ValidationError if unsupported
std::string backend_name(Backend b);

}  // namespace abelian::kernels
