#pragma once

#include <cstddef>
#include <string>

namespace sppqm {

// Per-column coefficients of the atomic equations on one x row. Arrays have
// one entry per (layer, detuning class) column.
struct ColumnParams {
  const double* d13;  // Delta31 + Delta_p of the column
  const double* d12;  // Delta21 + Delta_R of the column
  const double* ce;   // probe coupling sqrt(chi) exp(-z/xi_p)
  const double* cc;   // control profile exp(-z/xi_cp)
  double g13;
  double g12;
};

// Struct-of-arrays kernels for the time-domain integrator. Real and imaginary
// parts live in separate arrays.
struct KernelTable {
  const char* name;
  // out = sum_j w[j] * (re[j] + i im[j])
  void (*weighted_source)(const double* w, const double* re, const double* im, std::size_t n,
                          double* out_re, double* out_im);
  // Right-hand side of
  //   ds13/dt = -i d13 s13 - g13 s13 + i ce Abar + i cc Omega s12
  //   ds12/dt = -i d12 s12 - g12 s12 + i cc conj(Omega) s13
  // with s13 = (ar, ai) and s12 = (cr, ci).
  void (*atomic_rhs)(const ColumnParams& p, std::size_t n, double abar_re, double abar_im,
                     double omega_re, double omega_im, const double* ar, const double* ai,
                     const double* cr, const double* ci, double* dar, double* dai, double* dcr,
                     double* dci);
  // out = y + a x
  void (*axpy)(std::size_t n, double a, const double* x, const double* y, double* out);
  // y += h/6 (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_accumulate)(std::size_t n, double h, const double* k1, const double* k2,
                         const double* k3, const double* k4, double* y);
};

enum class KernelChoice { kAuto, kScalar, kAvx2, kNeon };

KernelChoice parse_kernel_choice(const std::string& name);
std::string kernel_choice_name(KernelChoice choice);

// True when the variant was compiled in and the CPU supports it.
bool kernel_available(KernelChoice choice);

// kAuto picks the widest available variant, honouring SPPQM_KERNEL when set.
// Requesting an unavailable variant throws ConfigError.
const KernelTable& select_kernels(KernelChoice choice = KernelChoice::kAuto);

namespace detail {
const KernelTable& scalar_kernels();
#if defined(SPPQM_HAVE_AVX2_TU)
const KernelTable& avx2_kernels();
#endif
#if defined(SPPQM_HAVE_NEON_TU)
const KernelTable& neon_kernels();
#endif
}  // namespace detail

}  // namespace sppqm
