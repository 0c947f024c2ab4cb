#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "sppqm/sppmode.hpp"

namespace sppqm {

struct Homogeneous {};

// Independent Gaussians in the two detunings, truncated at +-6 sigma and
// renormalised. A zero width collapses that axis to a delta function.
struct GaussianBroadening {
  double sigma21 = 0.0;
  double sigma31 = 0.0;
};

using Broadening = std::variant<Homogeneous, GaussianBroadening>;

struct RamanEnsemble {
  double n_o = 2e25;           // m^-3
  double d13 = 8.478353e-33;   // C m
  double gamma21 = 1e4;        // rad/s
  double gamma31 = 0.0;        // rad/s
  double z_o = 0.3 * 285e-9;   // m
  Broadening broadening = Homogeneous{};

  bool homogeneous() const;
  void validate() const;
};

struct DriveConfig {
  cdouble omega_cp{1e7, 0.0};  // control Rabi frequency, rad/s
  double delta_p = 1e7;        // omega31 - omega_p
  double delta_pR = 7e7;       // Raman detuning
  double xi1_p = 285e-9 / 40.0;
  double xi1_cp = 285e-9 / 40.0;
  double probe_bandwidth = 0.0;  // rad/s; 0 means unspecified

  void validate() const;
};

// How the single-photon field amplitude is normalised when building chi.
//  kSi:        E_o^2 = hbar omega / (2 eps_vac L_y L_z)
//  kAsPrinted: E_o^2 = hbar omega / (2 pi eps_vac L_y L_z)
// The two differ by a factor pi in chi.
enum class FieldNormalization { kSi, kAsPrinted };
std::string field_normalization_name(FieldNormalization n);
FieldNormalization parse_field_normalization(const std::string& name);

// chi_p = n_o |d13|^2 omega_p (1 + |K/k1|^2) / (eps_vac hbar L_z v_g), times pi
// under kSi. Units 1/(m^2 s).
double coupling_chi(const SppMode& mode, const RamanEnsemble& ensemble, double omega_p,
                    FieldNormalization normalization = FieldNormalization::kSi);

// delta_p(z) = D21 + Delta_pR - exp(-2z/xi_cp) |Omega|^2 / (D31 + Delta_p - i gamma31)
cdouble stark_shift(double z, const DriveConfig& drive, double delta21, double gamma31,
                    double delta31 = 0.0);

// Everything the spectral functions need, with chi already evaluated.
struct MemoryContext {
  double chi = 0.0;
  RamanEnsemble ensemble;
  DriveConfig drive;
};

MemoryContext make_context(const SppMode& mode, const RamanEnsemble& ensemble,
                           const DriveConfig& drive, double omega_p,
                           FieldNormalization normalization = FieldNormalization::kSi);

cdouble susceptibility_sigma(const MemoryContext& ctx);
cdouble alpha_numeric(double nu, const MemoryContext& ctx);
// alpha_numeric - 2 i sigma
cdouble alpha_effective_numeric(double nu, const MemoryContext& ctx);
// Closed form; requires homogeneous broadening, gamma31 = 0 and xi1_cp = xi1_p.
cdouble alpha_closed(double nu, const MemoryContext& ctx);
bool closed_form_applicable(const MemoryContext& ctx);

struct SpectralResponse {
  std::vector<double> nu_grid;
  std::vector<cdouble> alpha_eff;
  std::vector<double> optical_density;
  double L_x = 0.0;
};

// Closed form when applicable, quadrature otherwise.
SpectralResponse spectral_response(const std::vector<double>& nu_grid, const MemoryContext& ctx,
                                   double L_x);

struct OdMap {
  std::vector<double> nu_grid;
  std::vector<double> zo_grid;
  std::vector<double> od;               // row-major, od[iz * nu.size() + inu]
  std::vector<std::string> cell_error;  // empty string where the cell succeeded
  double L_x = 0.0;

  double at(std::size_t iz, std::size_t inu) const { return od[iz * nu_grid.size() + inu]; }
};

OdMap optical_density_map(const std::vector<double>& nu_grid, const std::vector<double>& zo_grid,
                          const MemoryContext& ctx, double L_x);

struct Window {
  bool found = false;
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return found ? hi - lo : 0.0; }
};

// Widest contiguous run with od >= threshold; edges interpolated linearly
// between grid points.
Window find_window(const std::vector<double>& nu, const std::vector<double>& od, double threshold);

long long mode_capacity(const SpectralResponse& response, double gamma21, double od_threshold = 3.0);

struct OdSummary {
  Window window;       // on the thickest layer row
  double max_od = 0.0;
  long long capacity = 0;
  double od_gt_threshold_min_zo = -1.0;  // -1 when no row exceeds the threshold
};

OdSummary summarize_od_map(const OdMap& map, double gamma21, double od_threshold = 3.0);

struct CribPlan {
  bool amplitude_sign_flip = true;
  double xi1_e = 0.0;
  double xi1_ce = 0.0;
  double delta_e = 0.0;
  double delta_eR = 0.0;
  bool invert_delta31 = false;
  bool invert_delta21 = false;
  double control_sign = -1.0;  // Omega_ce(-tau_e) = control_sign * Omega_cp(tau)
  bool s13_zero_at_switch = true;
  bool s12_continuous = true;
  double t_prime = 0.0;
};

CribPlan crib_plan(const DriveConfig& drive, const RamanEnsemble& ensemble, double t_prime);

// Drive parameters of the echo system implied by a plan.
DriveConfig echo_drive(const CribPlan& plan, const DriveConfig& drive);

struct PhaseMatch {
  std::array<double, 2> K_ce{};
  double residual = 0.0;          // relative residual of the vector equation
  double magnitude_mismatch = 0.0;  // | |K_ce| - k_expected | / k_expected, 0 if unchecked
  double angle = 0.0;             // direction of K_ce, rad
  bool feasible = true;
};

// c (K_ce - K_cp) = (n_p omega_p + n_e omega_e) e_x. When k_expected > 0 the
// magnitude of K_ce is compared with it at relative tolerance `tolerance`.
PhaseMatch phase_match(const std::array<double, 2>& K_cp, double n_p, double n_e, double omega_p,
                       double omega_e, double k_expected = 0.0, double tolerance = 1e-3);

// Re(K) c / omega, the default n_p / n_e.
double effective_index(const SppMode& mode);

}  // namespace sppqm
