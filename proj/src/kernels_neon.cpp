#include <arm_neon.h>

#include "abelian/kernels.hpp"

// NEON backend (aarch64). One complex per 128-bit vector; same rounding
// sequence as the scalar path for elementwise entries (negation is exact,
// no FMA).

namespace abelian::kernels {

namespace {

const double* re(const cplx* p) { return reinterpret_cast<const double*>(p); }
double* re(cplx* p) { return reinterpret_cast<double*>(p); }

void add_neon(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    vst1q_f64(po + i, vaddq_f64(vld1q_f64(pa + i), vld1q_f64(pb + i)));
  }
  for (; i < len; ++i) po[i] = pa[i] + pb[i];
}

void sub_neon(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  const std::size_t len = 2 * n;
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    vst1q_f64(po + i, vsubq_f64(vld1q_f64(pa + i), vld1q_f64(pb + i)));
  }
  for (; i < len; ++i) po[i] = pa[i] - pb[i];
}

void mul_neon(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double *pa = re(a), *pb = re(b);
  double* po = re(out);
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(pa + 2 * i);
    const float64x2_t vb = vld1q_f64(pb + 2 * i);
    const float64x2_t t0 = vmulq_f64(va, vdupq_laneq_f64(vb, 0));
    const float64x2_t t1 = vmulq_f64(vextq_f64(va, va, 1), vdupq_laneq_f64(vb, 1));
    vst1q_f64(po + 2 * i, vaddq_f64(t0, vmulq_f64(t1, sign)));
  }
}

void conj_neon(const cplx* a, cplx* out, std::size_t n) {
  const double* pa = re(a);
  double* po = re(out);
  for (std::size_t i = 0; i < n; ++i) {
    po[2 * i] = pa[2 * i];
    po[2 * i + 1] = -pa[2 * i + 1];
  }
}

void scale_neon(cplx s, const cplx* a, cplx* out, std::size_t n) {
  const double* pa = re(a);
  double* po = re(out);
  const float64x2_t vr = vdupq_n_f64(s.real());
  const float64x2_t vi = vdupq_n_f64(s.imag());
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(pa + 2 * i);
    const float64x2_t t0 = vmulq_f64(va, vr);
    const float64x2_t t1 = vmulq_f64(vextq_f64(va, va, 1), vi);
    vst1q_f64(po + 2 * i, vaddq_f64(t0, vmulq_f64(t1, sign)));
  }
}

double max_abs2_neon(const cplx* a, std::size_t n) {
  const double* pa = re(a);
  float64x2_t vmax = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t v = vld1q_f64(pa + 2 * i);
    const float64x2_t sq = vmulq_f64(v, v);
    vmax = vmaxq_f64(vmax, vpaddq_f64(sq, sq));
  }
  return vgetq_lane_f64(vmax, 0);
}

cplx weighted_sum_neon(const double* w, const cplx* a, std::size_t n) {
  const double* pa = re(a);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t w2 = vld1q_f64(w + i);
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(pa + 2 * i), vdupq_laneq_f64(w2, 0)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(pa + 2 * i + 2), vdupq_laneq_f64(w2, 1)));
  }
  float64x2_t acc = vaddq_f64(acc0, acc1);
  double sr = vgetq_lane_f64(acc, 0);
  double si = vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    sr += w[i] * pa[2 * i];
    si += w[i] * pa[2 * i + 1];
  }
  return {sr, si};
}

double mass_le_neon(const double* w, const cplx* a, double t, std::size_t n) {
  const double* pa = re(a);
  const float64x2_t vt = vdupq_n_f64(t);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v0 = vld1q_f64(pa + 2 * i);
    const float64x2_t v1 = vld1q_f64(pa + 2 * i + 2);
    const float64x2_t res = vuzp1q_f64(v0, v1);  // ar0 ar1
    const uint64x2_t mask = vcleq_f64(res, vt);
    const float64x2_t sel = vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vld1q_f64(w + i))));
    acc = vaddq_f64(acc, sel);
  }
  double m = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    if (pa[2 * i] <= t) m += w[i];
  }
  return m;
}

double sum_neon(const double* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vld1q_f64(w + i));
  }
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += w[i];
  return s;
}

const Ops kNeonOps = {add_neon,      sub_neon,          mul_neon,     conj_neon, scale_neon,
                      max_abs2_neon, weighted_sum_neon, mass_le_neon, sum_neon};

}  // namespace

const Ops& detail_neon_ops() { return kNeonOps; }

}  // namespace abelian::kernels
