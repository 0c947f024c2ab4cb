// aarch64 only. Advanced SIMD is part of the base ISA there, so no runtime
// check is needed.
#include <arm_neon.h>

#include "sppqm/kernels.hpp"

namespace sppqm::detail {

namespace {

void weighted_source(const double* w, const double* re, const double* im, std::size_t n,
                     double* out_re, double* out_im) {
  float64x2_t sr = vdupq_n_f64(0.0);
  float64x2_t si = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t wv = vld1q_f64(w + j);
    sr = vfmaq_f64(sr, wv, vld1q_f64(re + j));
    si = vfmaq_f64(si, wv, vld1q_f64(im + j));
  }
  double tr = vaddvq_f64(sr);
  double ti = vaddvq_f64(si);
  for (; j < n; ++j) {
    tr += w[j] * re[j];
    ti += w[j] * im[j];
  }
  *out_re = tr;
  *out_im = ti;
}

void atomic_rhs(const ColumnParams& p, std::size_t n, double Ar, double Ai, double Or, double Oi,
                const double* ar, const double* ai, const double* cr, const double* ci,
                double* dar, double* dai, double* dcr, double* dci) {
  const float64x2_t vAr = vdupq_n_f64(Ar), vAi = vdupq_n_f64(Ai);
  const float64x2_t vOr = vdupq_n_f64(Or), vOi = vdupq_n_f64(Oi);
  const float64x2_t g13 = vdupq_n_f64(p.g13), g12 = vdupq_n_f64(p.g12);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t a = vld1q_f64(ar + j), b = vld1q_f64(ai + j);
    const float64x2_t c = vld1q_f64(cr + j), d = vld1q_f64(ci + j);
    const float64x2_t d13 = vld1q_f64(p.d13 + j), d12 = vld1q_f64(p.d12 + j);
    const float64x2_t ce = vld1q_f64(p.ce + j), cc = vld1q_f64(p.cc + j);

    const float64x2_t t13r = vmulq_f64(cc, vfmaq_f64(vmulq_f64(vOi, c), vOr, d));
    const float64x2_t t13i = vmulq_f64(cc, vfmsq_f64(vmulq_f64(vOr, c), vOi, d));
    const float64x2_t t12r = vmulq_f64(cc, vfmsq_f64(vmulq_f64(vOr, b), vOi, a));
    const float64x2_t t12i = vmulq_f64(cc, vfmaq_f64(vmulq_f64(vOi, b), vOr, a));

    float64x2_t r = vfmsq_f64(vmulq_f64(d13, b), g13, a);
    r = vfmsq_f64(r, ce, vAi);
    vst1q_f64(dar + j, vsubq_f64(r, t13r));

    r = vnegq_f64(vfmaq_f64(vmulq_f64(g13, b), d13, a));
    r = vfmaq_f64(r, ce, vAr);
    vst1q_f64(dai + j, vaddq_f64(r, t13i));

    r = vfmsq_f64(vmulq_f64(d12, d), g12, c);
    vst1q_f64(dcr + j, vsubq_f64(r, t12r));

    r = vnegq_f64(vfmaq_f64(vmulq_f64(g12, d), d12, c));
    vst1q_f64(dci + j, vaddq_f64(r, t12i));
  }
  for (; j < n; ++j) {
    const double a = ar[j], b = ai[j], c = cr[j], d = ci[j];
    const double ce = p.ce[j], cc = p.cc[j];
    dar[j] = p.d13[j] * b - p.g13 * a - ce * Ai - cc * (Or * d + Oi * c);
    dai[j] = -p.d13[j] * a - p.g13 * b + ce * Ar + cc * (Or * c - Oi * d);
    dcr[j] = p.d12[j] * d - p.g12 * c - cc * (Or * b - Oi * a);
    dci[j] = -p.d12[j] * c - p.g12 * d + cc * (Or * a + Oi * b);
  }
}

void axpy(std::size_t n, double a, const double* x, const double* y, double* out) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(out + j, vfmaq_f64(vld1q_f64(y + j), va, vld1q_f64(x + j)));
  for (; j < n; ++j) out[j] = y[j] + a * x[j];
}

void rk4_accumulate(std::size_t n, double h, const double* k1, const double* k2, const double* k3,
                    const double* k4, double* y) {
  const double s = h / 6.0;
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t acc = vaddq_f64(vld1q_f64(k1 + j), vld1q_f64(k4 + j));
    acc = vfmaq_f64(acc, two, vaddq_f64(vld1q_f64(k2 + j), vld1q_f64(k3 + j)));
    vst1q_f64(y + j, vfmaq_f64(vld1q_f64(y + j), vs, acc));
  }
  for (; j < n; ++j) y[j] += s * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{"neon", weighted_source, atomic_rhs, axpy, rk4_accumulate};
  return table;
}

}  // namespace sppqm::detail
