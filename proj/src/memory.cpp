#include "sppqm/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sppqm/errors.hpp"
#include "sppqm/parallel.hpp"
#include "sppqm/quadrature.hpp"
#include "sppqm/units.hpp"

namespace sppqm {

namespace {

constexpr double kPi = constants::kPi;
constexpr double kInnerTolerance = 1e-10;
constexpr double kOuterTolerance = 1e-8;
constexpr double kTruncationSigmas = 6.0;
constexpr double kAdiabaticRatio = 10.0;
const cdouble kI(0.0, 1.0);

double gaussian_pdf(double x, double sigma) {
  // renormalised over the +-6 sigma truncation
  static const double mass = std::erf(kTruncationSigmas / std::sqrt(2.0));
  return std::exp(-0.5 * (x / sigma) * (x / sigma)) / (sigma * std::sqrt(2.0 * kPi) * mass);
}

// Average of g(d21, d31) over the broadening distribution.
cdouble average_over_broadening(const RamanEnsemble& ens,
                                const std::function<cdouble(double, double)>& g,
                                const char* context) {
  if (ens.homogeneous()) return g(0.0, 0.0);
  const auto& gb = std::get<GaussianBroadening>(ens.broadening);

  auto over31 = [&](double d21) -> cdouble {
    if (gb.sigma31 <= 0.0) return g(d21, 0.0);
    const double lim = kTruncationSigmas * gb.sigma31;
    return integrate_complex([&](double d31) { return gaussian_pdf(d31, gb.sigma31) * g(d21, d31); },
                             -lim, lim, {0.0}, kOuterTolerance, context)
        .value;
  };
  if (gb.sigma21 <= 0.0) return over31(0.0);
  const double lim = kTruncationSigmas * gb.sigma21;
  return integrate_complex([&](double d21) { return gaussian_pdf(d21, gb.sigma21) * over31(d21); },
                           -lim, lim, {0.0}, kOuterTolerance, context)
      .value;
}

cdouble excited_detuning(const DriveConfig& drive, double delta31, double gamma31) {
  const cdouble d(delta31 + drive.delta_p, -gamma31);
  if (std::abs(d) == 0.0) {
    throw SingularityError("Delta31 + Delta_p = 0 with gamma31 = 0: Raman model undefined");
  }
  return d;
}

}  // namespace

bool RamanEnsemble::homogeneous() const {
  if (std::holds_alternative<Homogeneous>(broadening)) return true;
  const auto& g = std::get<GaussianBroadening>(broadening);
  return g.sigma21 <= 0.0 && g.sigma31 <= 0.0;
}

void RamanEnsemble::validate() const {
  if (!(n_o > 0.0)) throw DomainError("ensemble: n_o must be positive");
  if (!(z_o >= 0.0)) throw DomainError("ensemble: z_o must be non-negative");
  if (!(gamma21 >= 0.0) || !(gamma31 >= 0.0)) throw DomainError("ensemble: decay rates must be >= 0");
  if (const auto* g = std::get_if<GaussianBroadening>(&broadening)) {
    if (g->sigma21 < 0.0 || g->sigma31 < 0.0) throw DomainError("ensemble: negative broadening width");
  }
}

void DriveConfig::validate() const {
  if (!(xi1_p > 0.0) || !(xi1_cp > 0.0)) throw DomainError("drive: confinements must be positive");
  if (!(probe_bandwidth >= 0.0)) throw DomainError("drive: probe bandwidth must be >= 0");
}

std::string field_normalization_name(FieldNormalization n) {
  return n == FieldNormalization::kSi ? "si" : "as_printed";
}

FieldNormalization parse_field_normalization(const std::string& name) {
  if (name == "si") return FieldNormalization::kSi;
  if (name == "as_printed") return FieldNormalization::kAsPrinted;
  throw ConfigError("unknown field normalization '" + name + "' (expected si or as_printed)");
}

double coupling_chi(const SppMode& mode, const RamanEnsemble& ensemble, double omega_p,
                    FieldNormalization normalization) {
  if (!(mode.v_group > 0.0) || !std::isfinite(mode.v_group)) {
    throw ConfigError("coupling_chi: mode has no group velocity");
  }
  if (!(mode.Lz > 0.0)) throw ConfigError("coupling_chi: mode has no quantization length");
  const double pol = 1.0 + std::norm(mode.K / mode.k1);
  double chi = ensemble.n_o * ensemble.d13 * ensemble.d13 * omega_p * pol /
               (constants::kVacuumPermittivity * constants::kHbar * mode.Lz * mode.v_group);
  if (normalization == FieldNormalization::kSi) chi *= kPi;
  return chi;
}

cdouble stark_shift(double z, const DriveConfig& drive, double delta21, double gamma31,
                    double delta31) {
  if (z < 0.0) throw DomainError("stark_shift: z must be non-negative");
  const cdouble d = excited_detuning(drive, delta31, gamma31);
  return delta21 + drive.delta_pR - std::exp(-2.0 * z / drive.xi1_cp) * std::norm(drive.omega_cp) / d;
}

MemoryContext make_context(const SppMode& mode, const RamanEnsemble& ensemble,
                           const DriveConfig& drive, double omega_p,
                           FieldNormalization normalization) {
  ensemble.validate();
  drive.validate();
  return {coupling_chi(mode, ensemble, omega_p, normalization), ensemble, drive};
}

cdouble susceptibility_sigma(const MemoryContext& ctx) {
  const auto& ens = ctx.ensemble;
  const double xi = ctx.drive.xi1_p;
  const double layer = -0.5 * xi * std::expm1(-2.0 * ens.z_o / xi);
  const cdouble mean_inv = average_over_broadening(
      ens, [&](double, double d31) { return 1.0 / excited_detuning(ctx.drive, d31, ens.gamma31); },
      "susceptibility_sigma");
  return ctx.chi * layer * mean_inv;
}

cdouble alpha_numeric(double nu, const MemoryContext& ctx) {
  const auto& ens = ctx.ensemble;
  const auto& dr = ctx.drive;
  const double om2 = std::norm(dr.omega_cp);
  if (om2 == 0.0 || ens.z_o == 0.0) return {0.0, 0.0};
  const double decay = 2.0 * (1.0 / dr.xi1_p + 1.0 / dr.xi1_cp);

  auto per_class = [&](double d21, double d31) -> cdouble {
    const cdouble D = excited_detuning(dr, d31, ens.gamma31);
    const cdouble light_shift = om2 / D;
    auto f = [&](double z) -> cdouble {
      const double wc = std::exp(-2.0 * z / dr.xi1_cp);
      const cdouble delta = d21 + dr.delta_pR - wc * light_shift;
      return std::exp(-decay * z) / (kI * (delta - nu) + ens.gamma21);
    };

    std::vector<double> breaks;
    const double re_shift = light_shift.real();
    if (re_shift != 0.0) {
      const double w_star = (d21 + dr.delta_pR - nu) / re_shift;
      const double w_min = std::exp(-2.0 * ens.z_o / dr.xi1_cp);
      if (w_star > w_min && w_star < 1.0) {
        const double z_star = -0.5 * dr.xi1_cp * std::log(w_star);
        const double width = 0.5 * dr.xi1_cp * (ens.gamma21 + std::abs(light_shift.imag())) /
                             (w_star * std::abs(re_shift));
        breaks = {z_star - 10.0 * width, z_star, z_star + 10.0 * width};
      }
    }
    const cdouble zint =
        integrate_complex(f, 0.0, ens.z_o, breaks, kInnerTolerance, "alpha_numeric").value;
    return 2.0 * om2 * zint / (D * D);
  };

  return ctx.chi * average_over_broadening(ens, per_class, "alpha_numeric");
}

cdouble alpha_effective_numeric(double nu, const MemoryContext& ctx) {
  return alpha_numeric(nu, ctx) - 2.0 * kI * susceptibility_sigma(ctx);
}

bool closed_form_applicable(const MemoryContext& ctx) {
  return ctx.ensemble.homogeneous() && ctx.ensemble.gamma31 == 0.0 &&
         ctx.drive.xi1_cp == ctx.drive.xi1_p;
}

cdouble alpha_closed(double nu, const MemoryContext& ctx) {
  if (!closed_form_applicable(ctx)) {
    throw DomainError(
        "alpha_closed: needs homogeneous broadening, gamma31 = 0 and equal probe/control confinement");
  }
  const auto& dr = ctx.drive;
  const auto& ens = ctx.ensemble;
  if (dr.delta_p == 0.0) throw SingularityError("alpha_closed: Delta_p = 0");
  const double xi = dr.xi1_p;
  const double om2 = std::norm(dr.omega_cp);
  if (ens.z_o == 0.0) return {0.0, 0.0};
  if (om2 == 0.0) return -2.0 * kI * susceptibility_sigma(ctx);

  const double w0 = std::exp(-2.0 * ens.z_o / xi);
  // The imaginary part keeps its signed zero when gamma21 = 0, which selects
  // the gamma21 -> 0+ side of the branch cut in both logarithms.
  const cdouble C(dr.delta_p * (dr.delta_pR - nu) / om2, -dr.delta_p * ens.gamma21 / om2);
  const cdouble upper = 1.0 - C;
  const cdouble lower = w0 - C;
  if (std::abs(upper) == 0.0 || std::abs(lower) == 0.0) {
    throw SingularityError("alpha_closed: logarithm argument vanishes (gamma21 = 0 on a window edge)");
  }
  return kI * ctx.chi * xi * C / dr.delta_p * (std::log(upper) - std::log(lower));
}

SpectralResponse spectral_response(const std::vector<double>& nu_grid, const MemoryContext& ctx,
                                   double L_x) {
  SpectralResponse r;
  r.nu_grid = nu_grid;
  r.L_x = L_x;
  r.alpha_eff.resize(nu_grid.size());
  r.optical_density.resize(nu_grid.size());
  const bool closed = closed_form_applicable(ctx);
  parallel_for(nu_grid.size(), [&](std::size_t k) {
    r.alpha_eff[k] = closed ? alpha_closed(nu_grid[k], ctx) : alpha_effective_numeric(nu_grid[k], ctx);
    r.optical_density[k] = r.alpha_eff[k].real() * L_x;
  });
  return r;
}

OdMap optical_density_map(const std::vector<double>& nu_grid, const std::vector<double>& zo_grid,
                          const MemoryContext& ctx, double L_x) {
  OdMap map;
  map.nu_grid = nu_grid;
  map.zo_grid = zo_grid;
  map.L_x = L_x;
  const std::size_t n = nu_grid.size() * zo_grid.size();
  map.od.assign(n, 0.0);
  map.cell_error.assign(n, std::string());
  const bool closed = closed_form_applicable(ctx);
  parallel_for(n, [&](std::size_t idx) {
    const std::size_t iz = idx / nu_grid.size();
    const std::size_t inu = idx % nu_grid.size();
    MemoryContext cell = ctx;
    cell.ensemble.z_o = zo_grid[iz];
    try {
      const cdouble a = closed ? alpha_closed(nu_grid[inu], cell) : alpha_effective_numeric(nu_grid[inu], cell);
      map.od[idx] = a.real() * L_x;
    } catch (const Error& e) {
      map.od[idx] = std::numeric_limits<double>::quiet_NaN();
      map.cell_error[idx] = e.what();
    }
  });
  return map;
}

Window find_window(const std::vector<double>& nu, const std::vector<double>& od, double threshold) {
  if (nu.size() != od.size()) throw DomainError("find_window: grid size mismatch");
  auto above = [&](std::size_t i) { return std::isfinite(od[i]) && od[i] >= threshold; };
  auto crossing = [&](std::size_t outside, std::size_t inside) {
    const double a = od[outside];
    const double b = od[inside];
    if (!std::isfinite(a) || a == b) return nu[inside];
    const double t = (threshold - a) / (b - a);
    return nu[outside] + t * (nu[inside] - nu[outside]);
  };

  Window best;
  std::size_t i = 0;
  while (i < nu.size()) {
    if (!above(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < nu.size() && above(j + 1)) ++j;
    Window w;
    w.found = true;
    w.lo = i > 0 ? crossing(i - 1, i) : nu[i];
    w.hi = j + 1 < nu.size() ? crossing(j + 1, j) : nu[j];
    if (!best.found || w.width() > best.width()) best = w;
    i = j + 1;
  }
  return best;
}

long long mode_capacity(const SpectralResponse& response, double gamma21, double od_threshold) {
  if (!(od_threshold > 0.0)) throw DomainError("mode_capacity: threshold must be positive");
  if (!(gamma21 > 0.0)) throw DomainError("mode_capacity: gamma21 must be positive");
  const Window w = find_window(response.nu_grid, response.optical_density, od_threshold);
  if (!w.found) return 0;
  return static_cast<long long>(std::floor(w.width() / gamma21));
}

OdSummary summarize_od_map(const OdMap& map, double gamma21, double od_threshold) {
  OdSummary s;
  if (map.zo_grid.empty() || map.nu_grid.empty()) return s;
  const std::size_t n_nu = map.nu_grid.size();
  std::size_t thickest = 0;
  for (std::size_t iz = 0; iz < map.zo_grid.size(); ++iz) {
    if (map.zo_grid[iz] > map.zo_grid[thickest]) thickest = iz;
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_nu; ++k) {
      const double v = map.at(iz, k);
      if (std::isfinite(v)) row_max = std::max(row_max, v);
    }
    s.max_od = std::max(s.max_od, row_max);
    if (row_max > od_threshold &&
        (s.od_gt_threshold_min_zo < 0.0 || map.zo_grid[iz] < s.od_gt_threshold_min_zo)) {
      s.od_gt_threshold_min_zo = map.zo_grid[iz];
    }
  }
  const std::vector<double> row(map.od.begin() + static_cast<std::ptrdiff_t>(thickest * n_nu),
                                map.od.begin() + static_cast<std::ptrdiff_t>((thickest + 1) * n_nu));
  s.window = find_window(map.nu_grid, row, od_threshold);
  if (s.window.found && gamma21 > 0.0) {
    s.capacity = static_cast<long long>(std::floor(s.window.width() / gamma21));
  }
  return s;
}

CribPlan crib_plan(const DriveConfig& drive, const RamanEnsemble& ensemble, double t_prime) {
  drive.validate();
  if (drive.probe_bandwidth > 0.0 && std::abs(drive.delta_p) < kAdiabaticRatio * drive.probe_bandwidth) {
    std::ostringstream msg;
    msg << "crib_plan: |Delta_p| = " << std::abs(drive.delta_p) << " is not >> probe bandwidth "
        << drive.probe_bandwidth << "; S13 would not vanish at the switch";
    throw DomainError(msg.str());
  }
  CribPlan p;
  p.xi1_e = drive.xi1_p;
  p.xi1_ce = drive.xi1_cp;
  p.delta_e = -drive.delta_p;
  p.delta_eR = -drive.delta_pR;
  p.invert_delta31 = !ensemble.homogeneous();
  p.invert_delta21 = !ensemble.homogeneous();
  p.t_prime = t_prime;
  return p;
}

DriveConfig echo_drive(const CribPlan& plan, const DriveConfig& drive) {
  DriveConfig e = drive;
  e.delta_p = plan.delta_e;
  e.delta_pR = plan.delta_eR;
  e.xi1_p = plan.xi1_e;
  e.xi1_cp = plan.xi1_ce;
  e.omega_cp = plan.control_sign * drive.omega_cp;
  return e;
}

PhaseMatch phase_match(const std::array<double, 2>& K_cp, double n_p, double n_e, double omega_p,
                       double omega_e, double k_expected, double tolerance) {
  const double c = constants::kSpeedOfLight;
  const double shift = (n_p * omega_p + n_e * omega_e) / c;
  PhaseMatch m;
  m.K_ce = {K_cp[0] + shift, K_cp[1]};
  const double rx = c * (m.K_ce[0] - K_cp[0]) - (n_p * omega_p + n_e * omega_e);
  const double ry = c * (m.K_ce[1] - K_cp[1]);
  const double scale = std::max(std::abs(n_p * omega_p + n_e * omega_e), c * std::hypot(K_cp[0], K_cp[1]));
  m.residual = scale > 0.0 ? std::hypot(rx, ry) / scale : std::hypot(rx, ry);
  m.angle = std::atan2(m.K_ce[1], m.K_ce[0]);
  if (k_expected > 0.0) {
    m.magnitude_mismatch = std::abs(std::hypot(m.K_ce[0], m.K_ce[1]) - k_expected) / k_expected;
    m.feasible = m.magnitude_mismatch <= tolerance;
  }
  return m;
}

double effective_index(const SppMode& mode) {
  return mode.k_par * constants::kSpeedOfLight / mode.omega;
}

}  // namespace sppqm
