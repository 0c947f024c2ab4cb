#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace sppqm {

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate;
  std::size_t panels;
};

// Globally adaptive 15-point Gauss-Kronrod on [a, b], starting from panels
// split at any breakpoints strictly inside. The panel with the largest error
// estimate is bisected until the summed estimate is below rel_tol * |value|.
// Throws NumericError if that does not happen within max_panels.
QuadratureResult integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                   double b, const std::vector<double>& breakpoints,
                                   double rel_tol, const char* context,
                                   std::size_t max_panels = 4000);

}  // namespace sppqm
