// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "sppqm/kernels.hpp"

namespace sppqm::detail {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void weighted_source(const double* w, const double* re, const double* im, std::size_t n,
                     double* out_re, double* out_im) {
  __m256d sr = _mm256_setzero_pd();
  __m256d si = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d wv = _mm256_loadu_pd(w + j);
    sr = _mm256_fmadd_pd(wv, _mm256_loadu_pd(re + j), sr);
    si = _mm256_fmadd_pd(wv, _mm256_loadu_pd(im + j), si);
  }
  double tr = hsum(sr);
  double ti = hsum(si);
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
  const __m256d vAr = _mm256_set1_pd(Ar), vAi = _mm256_set1_pd(Ai);
  const __m256d vOr = _mm256_set1_pd(Or), vOi = _mm256_set1_pd(Oi);
  const __m256d g13 = _mm256_set1_pd(p.g13), g12 = _mm256_set1_pd(p.g12);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(ar + j), b = _mm256_loadu_pd(ai + j);
    const __m256d c = _mm256_loadu_pd(cr + j), d = _mm256_loadu_pd(ci + j);
    const __m256d d13 = _mm256_loadu_pd(p.d13 + j), d12 = _mm256_loadu_pd(p.d12 + j);
    const __m256d ce = _mm256_loadu_pd(p.ce + j), cc = _mm256_loadu_pd(p.cc + j);

    // control terms
    const __m256d t13r = _mm256_mul_pd(cc, _mm256_fmadd_pd(vOr, d, _mm256_mul_pd(vOi, c)));
    const __m256d t13i = _mm256_mul_pd(cc, _mm256_fmsub_pd(vOr, c, _mm256_mul_pd(vOi, d)));
    const __m256d t12r = _mm256_mul_pd(cc, _mm256_fmsub_pd(vOr, b, _mm256_mul_pd(vOi, a)));
    const __m256d t12i = _mm256_mul_pd(cc, _mm256_fmadd_pd(vOr, a, _mm256_mul_pd(vOi, b)));

    __m256d r = _mm256_fmsub_pd(d13, b, _mm256_mul_pd(g13, a));
    r = _mm256_fnmadd_pd(ce, vAi, r);
    _mm256_storeu_pd(dar + j, _mm256_sub_pd(r, t13r));

    r = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_fmadd_pd(d13, a, _mm256_mul_pd(g13, b)));
    r = _mm256_fmadd_pd(ce, vAr, r);
    _mm256_storeu_pd(dai + j, _mm256_add_pd(r, t13i));

    r = _mm256_fmsub_pd(d12, d, _mm256_mul_pd(g12, c));
    _mm256_storeu_pd(dcr + j, _mm256_sub_pd(r, t12r));

    r = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_fmadd_pd(d12, c, _mm256_mul_pd(g12, d)));
    _mm256_storeu_pd(dci + j, _mm256_add_pd(r, t12i));
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
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(out + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
  }
  for (; j < n; ++j) out[j] = y[j] + a * x[j];
}

void rk4_accumulate(std::size_t n, double h, const double* k1, const double* k2, const double* k3,
                    const double* k4, double* y) {
  const double s = h / 6.0;
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_add_pd(_mm256_loadu_pd(k1 + j), _mm256_loadu_pd(k4 + j));
    acc = _mm256_fmadd_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + j), _mm256_loadu_pd(k3 + j)), acc);
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(vs, acc, _mm256_loadu_pd(y + j)));
  }
  for (; j < n; ++j) y[j] += s * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", weighted_source, atomic_rhs, axpy, rk4_accumulate};
  return table;
}

}  // namespace sppqm::detail
