#include "abelian/kernels.hpp"

#include <cstdlib>
#include <mutex>

#include "abelian/errors.hpp"

namespace abelian::kernels {

#ifdef ABELIAN_HAVE_AVX2
const Ops& detail_avx2_ops();  // kernels_avx2.cpp
#endif
#ifdef ABELIAN_HAVE_NEON
const Ops& detail_neon_ops();  // kernels_neon.cpp
#endif

namespace {

// Scalar reference path. Complex arithmetic is spelled out on raw doubles so
// the rounding sequence is pinned; SIMD backends replicate it exactly for the
// elementwise entries.

const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
double* re(cplx* p) { return reinterpret_cast<double*>(p); }

void add_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  for (std::size_t i = 0; i < 2 * n; ++i) po[i] = pa[i] + pb[i];
}

void sub_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  for (std::size_t i = 0; i < 2 * n; ++i) po[i] = pa[i] - pb[i];
}

void mul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    po[2 * i] = ar * br - ai * bi;
    po[2 * i + 1] = ar * bi + ai * br;
  }
}

void conj_scalar(const cplx* a, cplx* out, std::size_t n) {
  const double* pa = re(a);
  double* po = re(out);
  for (std::size_t i = 0; i < n; ++i) {
    po[2 * i] = pa[2 * i];
    po[2 * i + 1] = -pa[2 * i + 1];
  }
}

void scale_scalar(cplx s, const cplx* a, cplx* out, std::size_t n) {
  const double sr = s.real(), si = s.imag();
  const double* pa = re(a);
  double* po = re(out);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    po[2 * i] = ar * sr - ai * si;
    po[2 * i + 1] = ar * si + ai * sr;
  }
}

double max_abs2_scalar(const cplx* a, std::size_t n) {
  const double* pa = re(a);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = pa[2 * i] * pa[2 * i] + pa[2 * i + 1] * pa[2 * i + 1];
    if (v > m) m = v;
  }
  return m;
}

cplx weighted_sum_scalar(const double* w, const cplx* a, std::size_t n) {
  const double* pa = re(a);
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sr += w[i] * pa[2 * i];
    si += w[i] * pa[2 * i + 1];
  }
  return {sr, si};
}

double mass_le_scalar(const double* w, const cplx* a, double t, std::size_t n) {
  const double* pa = re(a);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pa[2 * i] <= t) m += w[i];
  }
  return m;
}

double sum_scalar(const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i];
  return s;
}

const Ops kScalarOps = {add_scalar,      sub_scalar,          mul_scalar,     conj_scalar, scale_scalar,
                        max_abs2_scalar, weighted_sum_scalar, mass_le_scalar, sum_scalar};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Ops g_active = kScalarOps;
Backend g_backend = Backend::Scalar;
std::once_flag g_init;

void apply_backend(Backend b) {
  switch (b) {
    case Backend::Scalar:
      g_active = kScalarOps;
      break;
#ifdef ABELIAN_HAVE_AVX2
    case Backend::Avx2:
      g_active = detail_avx2_ops();
      break;
#endif
#ifdef ABELIAN_HAVE_NEON
    case Backend::Neon:
      g_active = detail_neon_ops();
      break;
#endif
    default:
      throw ValidationError("SIMD backend '" + backend_name(b) + "' is not available in this build");
  }
  g_backend = b;
}

Backend default_backend() {
#ifdef ABELIAN_HAVE_AVX2
  if (cpu_has_avx2()) return Backend::Avx2;
#endif
#ifdef ABELIAN_HAVE_NEON
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

void init_from_env() {
  const char* env = std::getenv("ABELIAN_INFO_SIMD");
  if (env == nullptr || *env == '\0') {
    apply_backend(default_backend());
    return;
  }
  const std::string want(env);
  Backend b;
  if (want == "scalar") {
    b = Backend::Scalar;
  } else if (want == "avx2") {
    b = Backend::Avx2;
  } else if (want == "neon") {
    b = Backend::Neon;
  } else {
    throw ValidationError("ABELIAN_INFO_SIMD must be scalar, avx2 or neon; got '" + want + "'");
  }
  if (!backend_available(b)) {
    throw ValidationError("ABELIAN_INFO_SIMD=" + want + " but that backend is unavailable here");
  }
  apply_backend(b);
}

}  // namespace

const Ops& active() {
  std::call_once(g_init, init_from_env);
  return g_active;
}

Backend active_backend() {
  std::call_once(g_init, init_from_env);
  return g_backend;
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#ifdef ABELIAN_HAVE_AVX2
      return cpu_has_avx2();
#else
      return false;
#endif
    case Backend::Neon:
#ifdef ABELIAN_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

void set_backend(Backend b) {
  std::call_once(g_init, init_from_env);
  if (!backend_available(b)) {
    throw ValidationError("SIMD backend '" + backend_name(b) + "' is not available on this machine");
  }
  apply_backend(b);
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace abelian::kernels
