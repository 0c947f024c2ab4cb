#include "sppqm/kernels.hpp"

namespace sppqm::detail {

namespace {

void weighted_source(const double* w, const double* re, const double* im, std::size_t n,
                     double* out_re, double* out_im) {
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sr += w[j] * re[j];
    si += w[j] * im[j];
  }
  *out_re = sr;
  *out_im = si;
}

void atomic_rhs(const ColumnParams& p, std::size_t n, double Ar, double Ai, double Or, double Oi,
                const double* ar, const double* ai, const double* cr, const double* ci,
                double* dar, double* dai, double* dcr, double* dci) {
  for (std::size_t j = 0; j < n; ++j) {
    const double a = ar[j], b = ai[j], c = cr[j], d = ci[j];
    const double ce = p.ce[j], cc = p.cc[j];
    dar[j] = p.d13[j] * b - p.g13 * a - ce * Ai - cc * (Or * d + Oi * c);
    dai[j] = -p.d13[j] * a - p.g13 * b + ce * Ar + cc * (Or * c - Oi * d);
    dcr[j] = p.d12[j] * d - p.g12 * c - cc * (Or * b - Oi * a);
    dci[j] = -p.d12[j] * c - p.g12 * d + cc * (Or * a + Oi * b);
  }
}

void axpy(std::size_t n, double a, const double* x, const double* y, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = y[j] + a * x[j];
}

void rk4_accumulate(std::size_t n, double h, const double* k1, const double* k2, const double* k3,
                    const double* k4, double* y) {
  const double s = h / 6.0;
  for (std::size_t j = 0; j < n; ++j) y[j] += s * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", weighted_source, atomic_rhs, axpy, rk4_accumulate};
  return table;
}

}  // namespace sppqm::detail
