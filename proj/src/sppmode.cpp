#include "sppqm/sppmode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sppqm/errors.hpp"
#include "sppqm/parallel.hpp"
#include "sppqm/units.hpp"

namespace sppqm {

namespace {

constexpr double kPi = constants::kPi;
constexpr double kMuZeroTolerance = 1e-9;
constexpr double kBoundaryTolerance = 1e-10;
constexpr double kVgRelativeStep = 1e-4;

cdouble with_positive_real(cdouble z) { return z.real() < 0.0 ? -z : z; }

// (eps1/eps2)^2, after rejecting the singular matching point.
cdouble ratio_squared(const InterfaceSpec& spec) {
  const cdouble r = spec.dielectric.eps1 / spec.nimm.eps2;
  const cdouble r2 = r * r;
  if (std::abs(1.0 - r2) < 1e-14) {
    std::ostringstream msg;
    msg << "dispersion: (eps1/eps2)^2 = 1 at eps2 = " << spec.nimm.eps2.real() << "+"
        << spec.nimm.eps2.imag() << "i; keep |eps_r + eps1|/|eps_r| above the low-loss margin";
    throw SingularityError(msg.str());
  }
  return r2;
}

void require_mu2_zero(const InterfaceSpec& spec) {
  if (std::abs(spec.nimm.mu2) > kMuZeroTolerance) {
    throw DomainError("dispersion: mu2 must vanish at the operating point");
  }
}

// K and K^2 - k0^2 without cancellation: k0^2 r^2 / (1 - r^2).
struct Wavevectors {
  cdouble K;
  cdouble k1;
};

Wavevectors wavevectors(const InterfaceSpec& spec) {
  require_mu2_zero(spec);
  const cdouble r2 = ratio_squared(spec);
  const double k0 = spec.k0();
  const cdouble K = with_positive_real(k0 / std::sqrt(1.0 - r2));
  const cdouble k1 = with_positive_real(std::sqrt(k0 * k0 * r2 / (1.0 - r2)));
  return {K, k1};
}

double k_par_at(const InterfaceSpec& base, double omega) {
  InterfaceSpec s = base;
  s.lambda_o = wavelength_from_angular_frequency(omega, s.dielectric.eps1, s.dielectric.mu1);
  s.nimm.eps2 = eval_nimm(*s.drude, omega).eps2;
  s.nimm.mu2 = 0.0;
  return dispersion_exact(s).real();
}

}  // namespace

InterfaceSpec InterfaceSpec::from_drude(const DielectricParams& dielectric,
                                        const DrudeModel& model, double lambda_o) {
  InterfaceSpec spec;
  spec.dielectric = dielectric;
  spec.lambda_o = lambda_o;
  spec.drude = model;
  spec.eps_inf = model.eps_inf;
  spec.mu_inf = model.mu_inf;
  spec.nimm.eps2 = eval_nimm(model, spec.omega()).eps2;
  spec.nimm.mu2 = 0.0;
  return spec;
}

double InterfaceSpec::omega() const {
  return angular_frequency_from_wavelength(lambda_o, dielectric.eps1, dielectric.mu1);
}

double InterfaceSpec::k0() const { return 2.0 * kPi / lambda_o; }

void InterfaceSpec::validate() const {
  dielectric.validate();
  if (!(lambda_o > 0.0)) throw DomainError("interface: lambda_o must be positive");
  if (!(nimm.eps2.real() < 0.0)) throw DomainError("interface: Re eps2 must be negative");
  if (drude) drude->validate();
}

std::string vg_policy_name(VgPolicy policy) {
  return policy == VgPolicy::kFiniteDifference ? "finite_difference" : "phase_velocity";
}

cdouble dispersion_exact(const InterfaceSpec& spec) {
  spec.validate();
  return wavevectors(spec).K;
}

ApproxDispersion dispersion_approx(const InterfaceSpec& spec) {
  spec.validate();
  const double er = std::abs(spec.nimm.eps2.real());
  const double ei = spec.nimm.eps2.imag();
  const double e1 = spec.dielectric.eps1;
  const double denom = er * er - ei * ei - e1 * e1;
  if (!(denom > 0.0)) {
    throw DomainError("dispersion_approx: |eps_r|^2 - eps_i^2 - eps1^2 <= 0, approximation invalid");
  }
  const double u = 2.0 * ei * er / denom;
  // sqrt(eps1/(2 eps_i)) * sqrt(u) folded together so eps_i = 0 is regular.
  const cdouble K = spec.k0() * std::sqrt(e1 * er / (denom * cdouble(1.0, -u)));
  return {with_positive_real(K), u};
}

LowLossDiagnostics low_loss_check(const InterfaceSpec& spec, double margin) {
  const double er = spec.nimm.eps2.real();
  const double r1 = spec.nimm.eps2.imag() / std::abs(er);
  const double r2 = std::abs(er + spec.dielectric.eps1) / std::abs(er);
  return {r1, r2, (r1 <= margin * r2) && (r2 <= margin)};
}

SppMode solve_mode(const InterfaceSpec& spec) {
  spec.validate();
  const Wavevectors w = wavevectors(spec);

  SppMode mode;
  mode.K = w.K;
  mode.k_par = w.K.real();
  mode.kappa = w.K.imag();
  mode.k1 = w.k1;
  // k2 = sqrt(K^2 - k0^2 eps2 mu2 / (eps1 mu1)) with mu2 = 0.
  mode.k2 = w.K;

  const cdouble ratio = mode.k1 / mode.k2;
  const cdouble expected = -spec.dielectric.eps1 / spec.nimm.eps2;
  if (std::abs(ratio - expected) > kBoundaryTolerance * std::abs(expected)) {
    throw DomainError("solve_mode: k1/k2 != -eps1/eps2, no bound TM mode on this branch");
  }
  if (!(mode.k1.real() > 0.0) || !(mode.k2.real() > 0.0)) {
    throw DomainError("solve_mode: field does not decay away from the interface");
  }

  mode.xi1 = 1.0 / mode.k1.real();
  mode.xi2 = 1.0 / std::abs(mode.k2);
  mode.lambda_par = 2.0 * kPi / mode.k_par;
  mode.l_x = mode.kappa > 0.0 ? 1.0 / mode.kappa : std::numeric_limits<double>::infinity();
  mode.Lz = quantization_length(spec, mode.xi1, mode.xi2);
  mode.omega = spec.omega();
  mode.v_phase = mode.omega / mode.k_par;

  if (spec.drude) {
    const double h = kVgRelativeStep;
    const double kp = k_par_at(spec, mode.omega * (1.0 + h));
    const double km = k_par_at(spec, mode.omega * (1.0 - h));
    if (!(kp != km)) throw NumericError("solve_mode: flat dispersion, group velocity undefined");
    mode.v_group = 2.0 * h * mode.omega / (kp - km);
    mode.vg_policy = VgPolicy::kFiniteDifference;
  } else {
    mode.v_group = mode.v_phase;
    mode.vg_policy = VgPolicy::kPhaseVelocity;
  }
  return mode;
}

FieldSample field_profile(const SppMode& mode, const InterfaceSpec& spec, double z) {
  const cdouble i(0.0, 1.0);
  const double k0 = spec.k0();
  const double e1 = spec.dielectric.eps1;
  const double m1 = spec.dielectric.mu1;
  // k0 here already carries sqrt(eps1 mu1); the vacuum wavenumber is k0 / sqrt(eps1 mu1).
  const double k_vac = k0 / std::sqrt(e1 * m1);
  FieldSample f;
  if (z >= 0.0) {
    const cdouble decay = std::exp(-mode.k1 * z);
    f.ex = decay;
    f.ez = i * mode.K / mode.k1 * decay;
    f.hy = -i * k_vac * e1 / mode.k1 * decay;
  } else {
    const cdouble decay = std::exp(mode.k2 * z);
    f.ex = decay;
    f.ez = -i * mode.K / mode.k2 * decay;
    f.hy = i * k_vac * spec.nimm.eps2 / mode.k2 * decay;
  }
  return f;
}

double magnetic_suppression(const SppMode& mode, const InterfaceSpec& spec) {
  const FieldSample f = field_profile(mode, spec, 0.0);
  const double impedance = std::sqrt(spec.dielectric.eps1 / spec.dielectric.mu1);
  return std::abs(f.hy) / (std::abs(f.ex) * impedance);
}

double quantization_length(const InterfaceSpec& spec, double xi1, double xi2) {
  if (xi1 < 0.0 || xi2 < 0.0) throw DomainError("quantization_length: negative confinement");
  const double e1 = spec.dielectric.eps1;
  const double m1 = spec.dielectric.mu1;
  const double eo = spec.background_eps();
  const double mo = spec.background_mu();
  const double q1 = spec.k0() * xi1;
  const double q2 = spec.k0() * xi2;
  return (2.0 * e1 + e1 * q1 * q1) * xi1 +
         (2.0 * (2.0 * eo + e1) + 2.0 * e1 * q2 * q2 * mo / m1) * xi2;
}

QuantizationLimit quantization_length_limit(const DrudeModel& model, const InterfaceSpec& spec,
                                            double xi) {
  if (!(xi > 0.0)) throw DomainError("quantization_length_limit: xi must be positive");
  const double ratio = model.omega_e / model.omega_mu;
  return {4.0 * (model.eps_inf + spec.dielectric.eps1) * xi, 4.0 * model.mu_inf * ratio * ratio * xi};
}

std::vector<double> SweepGrid::eps_r_values() const {
  if (!(eps_r_step > 0.0)) throw DomainError("sweep: eps_r step must be positive");
  if (!(eps_r_stop >= eps_r_start)) throw DomainError("sweep: eps_r stop below start");
  const auto n = static_cast<std::size_t>(std::floor((eps_r_stop - eps_r_start) / eps_r_step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = eps_r_start + static_cast<double>(k) * eps_r_step;
  return out;
}

namespace {

template <typename Metric>
std::vector<SweepRow> sweep(const SweepGrid& grid, const InterfaceSpec& base, Metric metric) {
  const std::vector<double> er = grid.eps_r_values();
  if (er.empty() || grid.eps_i.empty()) throw DomainError("sweep: empty grid");
  std::vector<double> ei = grid.eps_i;
  std::sort(ei.begin(), ei.end());
  // eps_r ascending, then eps_i ascending
  std::vector<SweepRow> rows(er.size() * ei.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.eps_r = er[idx / ei.size()];
    row.eps_i = ei[idx % ei.size()];
    InterfaceSpec s = base;
    s.drude.reset();
    s.nimm.eps2 = cdouble(row.eps_r, row.eps_i);
    s.nimm.mu2 = 0.0;
    try {
      row.value = metric(solve_mode(s), s);
    } catch (const Error& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_figure1(const SweepGrid& grid, const InterfaceSpec& base) {
  return sweep(grid, base, [](const SppMode& m, const InterfaceSpec& s) { return m.l_x / s.lambda_o; });
}

std::vector<SweepRow> sweep_figure2(const SweepGrid& grid, const InterfaceSpec& base) {
  return sweep(grid, base, [](const SppMode& m, const InterfaceSpec& s) { return m.xi1 / s.lambda_o; });
}

}  // namespace sppqm
