#include <immintrin.h>

#include "abelian/kernels.hpp"

// AVX2 backend. Elementwise entries keep the scalar rounding sequence
// (mul/add/sub only, no FMA) so backends agree bit for bit; reductions
// accumulate per lane and reassociate.

namespace abelian::kernels {

namespace {

const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
double* re(cplx* p) { return reinterpret_cast<double*>(p); }

void add_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(po + i, _mm256_add_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i)));
  }
  for (; i < len; ++i) po[i] = pa[i] + pb[i];
}

void sub_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(po + i, _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i)));
  }
  for (; i < len; ++i) po[i] = pa[i] - pb[i];
}

void mul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);
    const __m256d r = _mm256_addsub_pd(_mm256_mul_pd(va, b_re), _mm256_mul_pd(a_sw, b_im));
    _mm256_storeu_pd(po + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    po[2 * i] = ar * br - ai * bi;
    po[2 * i + 1] = ar * bi + ai * br;
  }
}

void conj_avx2(const cplx* a, cplx* out, std::size_t n) {
  const double* pa = re(a);
  double* po = re(out);
  const __m256d mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(po + 2 * i, _mm256_xor_pd(_mm256_loadu_pd(pa + 2 * i), mask));
  }
  for (; i < n; ++i) {
    po[2 * i] = pa[2 * i];
    po[2 * i + 1] = -pa[2 * i + 1];
  }
}

void scale_avx2(cplx s, const cplx* a, cplx* out, std::size_t n) {
  const double sr = s.real(), si = s.imag();
  const double* pa = re(a);
  double* po = re(out);
  const __m256d vr = _mm256_set1_pd(sr);
  const __m256d vi = _mm256_set1_pd(si);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);
    const __m256d r = _mm256_addsub_pd(_mm256_mul_pd(va, vr), _mm256_mul_pd(a_sw, vi));
    _mm256_storeu_pd(po + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    po[2 * i] = ar * sr - ai * si;
    po[2 * i + 1] = ar * si + ai * sr;
  }
}

double max_abs2_avx2(const cplx* a, std::size_t n) {
  const double* pa = re(a);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(pa + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    vmax = _mm256_max_pd(vmax, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0] > lanes[2] ? lanes[0] : lanes[2];
  for (; i < n; ++i) {
    const double v = pa[2 * i] * pa[2 * i] + pa[2 * i + 1] * pa[2 * i + 1];
    if (v > m) m = v;
  }
  return m;
}

cplx weighted_sum_avx2(const double* w, const cplx* a, std::size_t n) {
  const double* pa = re(a);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w4 = _mm256_loadu_pd(w + i);
    const __m256d wlo = _mm256_permute4x64_pd(w4, 0x50);  // w0 w0 w1 w1
    const __m256d whi = _mm256_permute4x64_pd(w4, 0xFA);  // w2 w2 w3 w3
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(wlo, _mm256_loadu_pd(pa + 2 * i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(whi, _mm256_loadu_pd(pa + 2 * i + 4)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sr = lanes[0] + lanes[2];
  double si = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    sr += w[i] * pa[2 * i];
    si += w[i] * pa[2 * i + 1];
  }
  return {sr, si};
}

double mass_le_avx2(const double* w, const cplx* a, double t, std::size_t n) {
  const double* pa = re(a);
  const __m256d vt = _mm256_set1_pd(t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
    const __m256d res = _mm256_unpacklo_pd(v0, v1);  // ar0 ar2 ar1 ar3
    const __m256d w4 = _mm256_permute4x64_pd(_mm256_loadu_pd(w + i), 0xD8);  // w0 w2 w1 w3
    const __m256d mask = _mm256_cmp_pd(res, vt, _CMP_LE_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, w4));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    if (pa[2 * i] <= t) m += w[i];
  }
  return m;
}

double sum_avx2(const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(w + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += w[i];
  return s;
}

const Ops kAvx2Ops = {add_avx2,      sub_avx2,          mul_avx2,     conj_avx2, scale_avx2,
                      max_abs2_avx2, weighted_sum_avx2, mass_le_avx2, sum_avx2};

}  // namespace

const Ops& detail_avx2_ops() { return kAvx2Ops; }

}  // namespace abelian::kernels
