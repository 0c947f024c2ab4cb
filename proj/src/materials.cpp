#include "sppqm/materials.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "sppqm/errors.hpp"

namespace sppqm {

void DrudeModel::validate() const {
  if (!(omega_e > 0.0) || !(omega_mu > 0.0)) {
    throw DomainError("Drude model: omega_e and omega_mu must be positive");
  }
  if (!(gamma_e >= 0.0)) throw DomainError("Drude model: gamma_e must be non-negative");
  if (!(eps_inf > 0.0) || !(mu_inf > 0.0)) {
    throw DomainError("Drude model: eps_inf and mu_inf must be positive");
  }
}

void DielectricParams::validate() const {
  if (!(eps1 > 0.0) || !(mu1 > 0.0)) {
    throw DomainError("dielectric: eps1 and mu1 must be positive");
  }
}

MaterialPoint eval_nimm(const DrudeModel& model, double omega) {
  if (!(omega > 0.0)) throw DomainError("eval_nimm: omega must be positive");
  const cdouble denom = omega * cdouble(omega, model.gamma_e);
  MaterialPoint p;
  p.eps2 = model.eps_inf - model.omega_e * model.omega_e / denom;
  const double ratio = model.omega_mu / omega;
  p.mu2 = model.mu_inf - ratio * ratio;
  return p;
}

double mu_zero_frequency(const DrudeModel& model) {
  if (!(model.mu_inf > 0.0)) throw DomainError("mu_zero_frequency: mu_inf must be positive");
  return model.omega_mu / std::sqrt(model.mu_inf);
}

double epsilon_match_frequency(const DrudeModel& model, double eps1) {
  model.validate();
  if (!(eps1 >= 0.0)) throw DomainError("epsilon_match_frequency: eps1 must be non-negative");

  auto residual = [&](double omega) { return eval_nimm(model, omega).eps2.real() + eps1; };

  const double lo = model.omega_e * 1e-6;
  const double hi = model.omega_e * 1e6;
  const double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_lo * f_hi > 0.0) {
    throw NoSolutionError("epsilon_match_frequency: Re eps2 never reaches -eps1 = " +
                          std::to_string(-eps1));
  }

  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> tol(52);
  const auto [a, b] =
      boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi, tol, max_iter);
  const double root = 0.5 * (a + b);

  const double scale = eps1 > 0.0 ? eps1 : 1.0;
  if (std::abs(residual(root)) / scale > 1e-10) {
    throw NumericError("epsilon_match_frequency: root did not converge");
  }
  return root;
}

}  // namespace sppqm
