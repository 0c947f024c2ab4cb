#include <cstdlib>

#include "sppqm/errors.hpp"
#include "sppqm/kernels.hpp"

namespace sppqm {

KernelChoice parse_kernel_choice(const std::string& name) {
  if (name == "auto" || name.empty()) return KernelChoice::kAuto;
  if (name == "scalar") return KernelChoice::kScalar;
  if (name == "avx2") return KernelChoice::kAvx2;
  if (name == "neon") return KernelChoice::kNeon;
  throw ConfigError("unknown kernel '" + name + "' (expected auto, scalar, avx2 or neon)");
}

std::string kernel_choice_name(KernelChoice choice) {
  switch (choice) {
    case KernelChoice::kAuto: return "auto";
    case KernelChoice::kScalar: return "scalar";
    case KernelChoice::kAvx2: return "avx2";
    case KernelChoice::kNeon: return "neon";
  }
  return "auto";
}

bool kernel_available(KernelChoice choice) {
  switch (choice) {
    case KernelChoice::kAuto:
    case KernelChoice::kScalar:
      return true;
    case KernelChoice::kAvx2:
#if defined(SPPQM_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case KernelChoice::kNeon:
#if defined(SPPQM_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable& table_for(KernelChoice choice) {
  switch (choice) {
#if defined(SPPQM_HAVE_AVX2_TU)
    case KernelChoice::kAvx2: return detail::avx2_kernels();
#endif
#if defined(SPPQM_HAVE_NEON_TU)
    case KernelChoice::kNeon: return detail::neon_kernels();
#endif
    default: return detail::scalar_kernels();
  }
}

}  // namespace

const KernelTable& select_kernels(KernelChoice choice) {
  if (choice == KernelChoice::kAuto) {
    if (const char* env = std::getenv("SPPQM_KERNEL")) choice = parse_kernel_choice(env);
  }
  if (choice == KernelChoice::kAuto) {
    if (kernel_available(KernelChoice::kAvx2)) return table_for(KernelChoice::kAvx2);
    if (kernel_available(KernelChoice::kNeon)) return table_for(KernelChoice::kNeon);
    return detail::scalar_kernels();
  }
  if (!kernel_available(choice)) {
    throw ConfigError("kernel '" + kernel_choice_name(choice) + "' is not available on this machine");
  }
  return table_for(choice);
}

}  // namespace sppqm
