#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

namespace oracle {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kC = 2.99792458e8;

// Composite Simpson rule with n (even) intervals.
inline cd simpson(const std::function<cd(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  cd s = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  return s * h / 3.0;
}

// Simpson on a grid that is dense around `center` (a resonance) and coarse elsewhere.
inline cd simpson_around(const std::function<cd(double)>& f, double a, double b, double center,
                         double width, std::size_t n_dense, std::size_t n_coarse) {
  const double lo = std::max(a, center - 40.0 * width);
  const double hi = std::min(b, center + 40.0 * width);
  if (!(lo < hi)) return simpson(f, a, b, n_coarse);
  cd s{0.0, 0.0};
  if (lo > a) s += simpson(f, a, lo, n_coarse);
  s += simpson(f, lo, hi, n_dense);
  if (hi < b) s += simpson(f, hi, b, n_coarse);
  return s;
}

// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

 private:
  std::mt19937_64 eng_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
inline double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Surface-mode wavevector for mu2 = 0, written from K^2 = k0^2 eps2^2 / (eps2^2 - eps1^2).
inline cd spp_wavevector(double k0, double eps1, cd eps2) {
  cd K = k0 * eps2 / std::sqrt(eps2 * eps2 - eps1 * eps1);
  if (K.real() < 0) K = -K;
  return K;
}

}  // namespace oracle
