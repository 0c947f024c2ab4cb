#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sppqm/materials.hpp"

namespace sppqm {

// Dielectric (z > 0) on top of the metamaterial (z < 0).
struct InterfaceSpec {
  DielectricParams dielectric;
  MaterialPoint nimm;
  double lambda_o = 285e-9;  // free wavelength inside the dielectric, m
  // Background constants of the metamaterial; they enter the quantization
  // length. Taken from `drude` when present.
  double eps_inf = 2.0;
  double mu_inf = 2.0;
  // When set, nimm.eps2 follows this model in frequency (used for v_g).
  std::optional<DrudeModel> drude;

  // Builds a spec whose eps2 comes from the Drude model at the frequency
  // implied by lambda_o. mu2 is frozen at 0 (the operating point).
  static InterfaceSpec from_drude(const DielectricParams& dielectric, const DrudeModel& model,
                                  double lambda_o);

  double omega() const;  // rad/s
  double k0() const;     // 2 pi / lambda_o
  double background_eps() const { return drude ? drude->eps_inf : eps_inf; }
  double background_mu() const { return drude ? drude->mu_inf : mu_inf; }

  void validate() const;
};

enum class VgPolicy { kFiniteDifference, kPhaseVelocity };
std::string vg_policy_name(VgPolicy policy);

struct SppMode {
  cdouble K{0.0, 0.0};  // complex in-plane wavevector, 1/m
  double k_par = 0.0;   // Re K
  double kappa = 0.0;   // Im K
  cdouble k1{0.0, 0.0};
  cdouble k2{0.0, 0.0};
  double xi1 = 0.0;     // 1 / Re k1
  double xi2 = 0.0;     // 1 / |k2|
  double lambda_par = 0.0;
  double l_x = 0.0;     // 1 / kappa, +inf when lossless
  double Lz = 0.0;      // quantization length
  double omega = 0.0;
  double v_phase = 0.0;
  double v_group = 0.0;
  VgPolicy vg_policy = VgPolicy::kPhaseVelocity;
};

cdouble dispersion_exact(const InterfaceSpec& spec);

struct ApproxDispersion {
  cdouble K;
  double u;
};
ApproxDispersion dispersion_approx(const InterfaceSpec& spec);

struct LowLossDiagnostics {
  double r1;  // eps_i / |eps_r|
  double r2;  // |eps_r + eps1| / |eps_r|
  bool pass;
};
LowLossDiagnostics low_loss_check(const InterfaceSpec& spec, double margin);

SppMode solve_mode(const InterfaceSpec& spec);

struct FieldSample {
  cdouble ex;
  cdouble ez;
  cdouble hy;  // Gaussian-style units, same scale as E
};
// Field normalised to E_x(0) = 1.
FieldSample field_profile(const SppMode& mode, const InterfaceSpec& spec, double z);

// |H_y(0)| / (|E_x(0)| sqrt(eps1/mu1)), which reduces to 2 pi xi1 / lambda_o.
double magnetic_suppression(const SppMode& mode, const InterfaceSpec& spec);

double quantization_length(const InterfaceSpec& spec, double xi1, double xi2);

struct QuantizationLimit {
  double form_a;  // 4 (eps_o + eps1) xi
  double form_b;  // 4 mu_o (omega_e / omega_mu)^2 xi
};
QuantizationLimit quantization_length_limit(const DrudeModel& model, const InterfaceSpec& spec,
                                            double xi);

struct SweepRow {
  double eps_r;
  double eps_i;
  double value;  // l_x / lambda_o or xi1 / lambda_o; NaN on error
  std::string error;
};

struct SweepGrid {
  double eps_r_start = -1.60;
  double eps_r_stop = -1.315;
  double eps_r_step = 0.0025;
  std::vector<double> eps_i{1e-3, 0.031622776601683794, 1e-2};

  std::vector<double> eps_r_values() const;
};

// Rows are ordered by eps_r ascending, then eps_i ascending.
std::vector<SweepRow> sweep_figure1(const SweepGrid& grid, const InterfaceSpec& base);
std::vector<SweepRow> sweep_figure2(const SweepGrid& grid, const InterfaceSpec& base);

}  // namespace sppqm
