#pragma once

#include <complex>

namespace sppqm {

using cdouble = std::complex<double>;

// Drude-type permittivity and permeability of the metamaterial:
//   eps2(w) = eps_inf - omega_e^2 / (w (w + i gamma_e))
//   mu2(w)  = mu_inf  - omega_mu^2 / w^2
struct DrudeModel {
  double eps_inf = 2.0;
  double omega_e = 1.37e16;   // rad/s
  double gamma_e = 0.0;       // rad/s
  double mu_inf = 2.0;
  double omega_mu = 1.37e16 / 1.67;  // rad/s

  void validate() const;
};

// Upper half-space, an ordinary dielectric.
struct DielectricParams {
  double eps1 = 1.31;
  double mu1 = 1.0;

  void validate() const;
};

// Metamaterial response at one frequency. Can be given directly, bypassing the
// Drude model.
struct MaterialPoint {
  cdouble eps2{-1.34, 1e-4};
  cdouble mu2{0.0, 0.0};
};

MaterialPoint eval_nimm(const DrudeModel& model, double omega);

// Frequency where mu2 vanishes, omega_mu / sqrt(mu_inf).
double mu_zero_frequency(const DrudeModel& model);

// Frequency where Re eps2 = -eps1 (the singular matching point of the TM
// dispersion). Bracketed search over (1e-6, 1e6) * omega_e; throws
// NoSolutionError when Re eps2 + eps1 does not change sign there.
double epsilon_match_frequency(const DrudeModel& model, double eps1);

}  // namespace sppqm
