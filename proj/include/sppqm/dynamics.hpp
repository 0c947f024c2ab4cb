#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sppqm/kernels.hpp"
#include "sppqm/memory.hpp"

namespace sppqm {

struct SimGrid {
  std::size_t n_x = 16;
  double L_x = 0.0;          // m
  std::size_t n_z = 32;      // layers across 0 < z < z_o
  double z_o = 0.0;          // m, must match the ensemble
  double dt = 0.0;           // s
  double T = 0.0;            // s, storage window with the control on
  std::size_t n_classes = 5;  // detuning classes per broadened axis

  void validate() const;
};

enum class EnvelopeShape { kGaussian, kSquare, kCustom };
std::string envelope_name(EnvelopeShape shape);
EnvelopeShape parse_envelope(const std::string& name);

struct PulseSpec {
  EnvelopeShape shape = EnvelopeShape::kGaussian;
  double width = 0.0;   // Gaussian: rms width of the amplitude; square: full length
  double center = 0.0;  // s
  double peak = 1.0;
  double carrier_offset = 0.0;  // rad/s, the envelope carries exp(-i offset t)
  std::vector<cdouble> samples;  // custom shape, sampled from t = 0
  double sample_dt = 0.0;

  cdouble amplitude(double t) const;
  double bandwidth() const;  // rad/s
  void validate() const;
};

enum class Phase { kStorage, kHold, kRetrieval };
std::string phase_name(Phase phase);

struct Record {
  double t;
  cdouble a_in;
  cdouble a_out;
  double stored_excitation;
};

struct StorageOptions {
  double ramp_time = 0.0;  // control switched off linearly over this time after grid.T
  KernelChoice kernel = KernelChoice::kAuto;
};

// Atomic coherences on an n_x by columns grid. Columns are (layer, class)
// pairs with index iz * n_classes_total + ic.
struct SimState {
  SimGrid grid;
  Phase phase = Phase::kStorage;
  MemoryContext ctx;
  PulseSpec pulse;
  StorageOptions options;

  std::size_t columns = 0;
  std::vector<double> z;         // per column
  std::vector<double> weight;    // layer measure times class weight
  std::vector<double> delta21;   // per column
  std::vector<double> delta31;

  std::vector<double> s13r, s13i, s12r, s12i;  // n_x * columns, row-major in x

  std::vector<Record> records;
  double storage_duration = 0.0;  // grid.T + ramp
  double input_energy = 0.0;
  double transmitted_energy = 0.0;
  double emitted_energy = 0.0;
  double discarded_energy = 0.0;  // |S13|^2 dropped at the switch
  double s13_at_switch = 0.0;
  double stored_at_switch = 0.0;
  double hold_time = 0.0;
  double max_s13 = 0.0;
  // max over storage of (max ce |Abar| + |Omega| max |S12|) / |Delta_p|
  double adiabatic_bound = 0.0;
  std::string kernel_name;

  double excitation() const;      // weighted sum of |S13|^2 + |S12|^2
  double s13_excitation() const;
};

struct EchoMetrics {
  double stored_fraction = 0.0;
  double transmitted_fraction = 0.0;
  double efficiency = 0.0;
  double fidelity = 0.0;
  double conservation_residual = 0.0;
};

struct EchoTrace {
  std::vector<double> t;        // echo-frame time
  std::vector<cdouble> echo;    // reported echo amplitude at x = 0
  std::vector<cdouble> reference;  // time-reversed input A_in(T_s - t)
};

SimState run_storage(const SimGrid& grid, const MemoryContext& ctx, const PulseSpec& pulse,
                     const StorageOptions& options = {});

// Free evolution with the control off, split evenly between the storage and
// echo detuning frames. Applies condition 5: S13 is discarded at the switch
// unless the switch is instantaneous with no hold.
void apply_hold(SimState& state, const CribPlan& plan, double hold_time);

struct RetrievalResult {
  SimState state;
  EchoMetrics metrics;
  EchoTrace trace;
};

RetrievalResult run_retrieval(const SimState& state, const CribPlan& plan);

struct TransmissionSpectrum {
  std::vector<double> nu;
  std::vector<cdouble> transmission;
  bool leakage_warning = false;
};

// Storage-only run followed by a direct Fourier transform of the boundary
// records, T(nu) = out(nu) / in(nu).
TransmissionSpectrum transmission_spectrum(const SimGrid& grid, const MemoryContext& ctx,
                                           const PulseSpec& pulse, const std::vector<double>& nu,
                                           const StorageOptions& options = {});

// |E_in - (transmitted + stored + emitted + discarded)| / E_in
double conservation_audit(const SimState& state);

// Layer length for a target optical density at probe offset nu.
double length_for_optical_density(const MemoryContext& ctx, double nu, double od);

// Largest rate in the discretised equations; dt must stay below 0.1 / rate.
double max_rate(const SimGrid& grid, const MemoryContext& ctx, const PulseSpec& pulse);

}  // namespace sppqm
