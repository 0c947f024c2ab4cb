#include "sppqm/dynamics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <functional>
#include <sstream>

#include "sppqm/errors.hpp"
#include "sppqm/units.hpp"

namespace sppqm {

namespace {

constexpr double kCourant = 0.1;
constexpr double kMinSamplesPerWidth = 8.0;
const cdouble kI(0.0, 1.0);

double trapezoid(const std::vector<double>& f, double dt) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * dt;
}

cdouble trapezoid(const std::vector<cdouble>& f, double dt) {
  if (f.size() < 2) return {0.0, 0.0};
  cdouble s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * dt;
}

// Equal-probability nodes of a centred Gaussian.
std::vector<double> gaussian_classes(double sigma, std::size_t n) {
  if (sigma <= 0.0 || n <= 1) return {0.0};
  const boost::math::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> nodes(n);
  for (std::size_t k = 0; k < n; ++k) {
    nodes[k] = boost::math::quantile(dist, (static_cast<double>(k) + 0.5) / static_cast<double>(n));
  }
  return nodes;
}

void setup_columns(SimState& s) {
  const auto& ens = s.ctx.ensemble;
  const double xi_c = s.ctx.drive.xi1_cp;
  const std::size_t nz = s.grid.n_z;

  std::vector<double> d21_nodes{0.0};
  std::vector<double> d31_nodes{0.0};
  if (const auto* g = std::get_if<GaussianBroadening>(&ens.broadening)) {
    d21_nodes = gaussian_classes(g->sigma21, s.grid.n_classes);
    d31_nodes = gaussian_classes(g->sigma31, s.grid.n_classes);
  }
  const std::size_t n_cls = d21_nodes.size() * d31_nodes.size();
  const double class_weight = 1.0 / static_cast<double>(n_cls);

  // Layers sit at midpoints of a uniform grid in w = exp(-2 z / xi_c). The
  // Stark shift is linear in w, so the layers sample the shifted Raman lines
  // evenly across the absorption window.
  const double w0 = std::exp(-2.0 * s.grid.z_o / xi_c);
  const double dw = (1.0 - w0) / static_cast<double>(nz);

  s.columns = nz * n_cls;
  s.z.resize(s.columns);
  s.weight.resize(s.columns);
  s.delta21.resize(s.columns);
  s.delta31.resize(s.columns);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double w = w0 + (static_cast<double>(iz) + 0.5) * dw;
    const double z = -0.5 * xi_c * std::log(w);
    const double dz = 0.5 * xi_c * dw / w;
    std::size_t ic = 0;
    for (double d21 : d21_nodes) {
      for (double d31 : d31_nodes) {
        const std::size_t j = iz * n_cls + ic++;
        s.z[j] = z;
        s.weight[j] = dz * class_weight;
        s.delta21[j] = d21;
        s.delta31[j] = d31;
      }
    }
  }
  const std::size_t n = s.grid.n_x * s.columns;
  s.s13r.assign(n, 0.0);
  s.s13i.assign(n, 0.0);
  s.s12r.assign(n, 0.0);
  s.s12i.assign(n, 0.0);
}

// Coefficients of one propagation system (storage or echo).
struct SystemCoefficients {
  std::vector<double> d13, d12, ce, cc, wce;
  double g13 = 0.0;
  double g12 = 0.0;
  int direction = +1;  // +1: field enters at X = 0, -1: field enters at X = L

  ColumnParams params() const { return {d13.data(), d12.data(), ce.data(), cc.data(), g13, g12}; }
};

SystemCoefficients coefficients(const SimState& s, double delta_p, double delta_R, double xi_p,
                                double xi_c, bool flip21, bool flip31, int direction) {
  SystemCoefficients c;
  const std::size_t m = s.columns;
  c.d13.resize(m);
  c.d12.resize(m);
  c.ce.resize(m);
  c.cc.resize(m);
  c.wce.resize(m);
  const double root_chi = std::sqrt(s.ctx.chi);
  for (std::size_t j = 0; j < m; ++j) {
    c.d13[j] = (flip31 ? -s.delta31[j] : s.delta31[j]) + delta_p;
    c.d12[j] = (flip21 ? -s.delta21[j] : s.delta21[j]) + delta_R;
    c.ce[j] = root_chi * std::exp(-s.z[j] / xi_p);
    c.cc[j] = std::exp(-s.z[j] / xi_c);
    c.wce[j] = s.weight[j] * c.ce[j];
  }
  c.g13 = s.ctx.ensemble.gamma31;
  c.g12 = s.ctx.ensemble.gamma21;
  c.direction = direction;
  return c;
}

struct StateView {
  double* r13;
  double* i13;
  double* r12;
  double* i12;
};

class Integrator {
 public:
  Integrator(const SimState& s, const SystemCoefficients& coef, const KernelTable& k)
      : nx_(s.grid.n_x), m_(s.columns), dx_(s.grid.L_x / static_cast<double>(s.grid.n_x)),
        coef_(coef), k_(k) {
    const std::size_t n = nx_ * m_;
    for (auto& stage : stages_) {
      for (auto& a : stage) a.assign(n, 0.0);
    }
    for (auto& a : tmp_) a.assign(n, 0.0);
    abar_.assign(nx_, cdouble{});
  }

  // Field sweep plus atomic derivatives; returns the field leaving the layer.
  cdouble rhs(const StateView& y, cdouble a_in, cdouble omega, std::vector<double>* out) {
    const std::size_t m = m_;
    const ColumnParams p = coef_.params();
    cdouble a = a_in;
    for (std::size_t step = 0; step < nx_; ++step) {
      const std::size_t i = coef_.direction > 0 ? step : nx_ - 1 - step;
      const std::size_t off = i * m;
      double sr = 0.0;
      double si = 0.0;
      k_.weighted_source(coef_.wce.data(), y.r13 + off, y.i13 + off, m, &sr, &si);
      const cdouble src = kI * dx_ * cdouble(sr, si);
      abar_[i] = a + 0.5 * src;
      a += src;
      k_.atomic_rhs(p, m, abar_[i].real(), abar_[i].imag(), omega.real(), omega.imag(), y.r13 + off,
                    y.i13 + off, y.r12 + off, y.i12 + off, out[0].data() + off,
                    out[1].data() + off, out[2].data() + off, out[3].data() + off);
    }
    return a;
  }

  // Field leaving the layer for the current state, without derivatives.
  cdouble field_out(const StateView& y, cdouble a_in) const {
    cdouble a = a_in;
    for (std::size_t step = 0; step < nx_; ++step) {
      const std::size_t i = coef_.direction > 0 ? step : nx_ - 1 - step;
      double sr = 0.0;
      double si = 0.0;
      k_.weighted_source(coef_.wce.data(), y.r13 + i * m_, y.i13 + i * m_, m_, &sr, &si);
      a += kI * dx_ * cdouble(sr, si);
    }
    return a;
  }

  double max_abar() const {
    double v = 0.0;
    for (const auto& a : abar_) v = std::max(v, std::abs(a));
    return v;
  }

  // One classical RK4 step; returns the outgoing field at the step start.
  cdouble step(SimState& s, double dt, cdouble a0, cdouble ah, cdouble a1, cdouble o0, cdouble oh,
               cdouble o1) {
    const std::size_t n = nx_ * m_;
    StateView y{s.s13r.data(), s.s13i.data(), s.s12r.data(), s.s12i.data()};
    StateView t{tmp_[0].data(), tmp_[1].data(), tmp_[2].data(), tmp_[3].data()};
    std::vector<double>* src[4] = {&s.s13r, &s.s13i, &s.s12r, &s.s12i};

    const cdouble out = rhs(y, a0, o0, stages_[0]);
    last_abar_max_ = max_abar();
    for (int c = 0; c < 4; ++c) k_.axpy(n, 0.5 * dt, stages_[0][c].data(), src[c]->data(), tmp_[c].data());
    rhs(t, ah, oh, stages_[1]);
    for (int c = 0; c < 4; ++c) k_.axpy(n, 0.5 * dt, stages_[1][c].data(), src[c]->data(), tmp_[c].data());
    rhs(t, ah, oh, stages_[2]);
    for (int c = 0; c < 4; ++c) k_.axpy(n, dt, stages_[2][c].data(), src[c]->data(), tmp_[c].data());
    rhs(t, a1, o1, stages_[3]);
    for (int c = 0; c < 4; ++c) {
      k_.rk4_accumulate(n, dt, stages_[0][c].data(), stages_[1][c].data(), stages_[2][c].data(),
                        stages_[3][c].data(), src[c]->data());
    }
    return out;
  }

  double last_abar_max() const { return last_abar_max_; }
  double dx() const { return dx_; }

 private:
  std::size_t nx_;
  std::size_t m_;
  double dx_;
  const SystemCoefficients& coef_;
  const KernelTable& k_;
  std::vector<double> stages_[4][4];
  std::vector<double> tmp_[4];
  std::vector<cdouble> abar_;
  double last_abar_max_ = 0.0;
};

StateView view(SimState& s) { return {s.s13r.data(), s.s13i.data(), s.s12r.data(), s.s12i.data()}; }

double weighted_norm(const SimState& s, const std::vector<double>& re, const std::vector<double>& im) {
  const double dx = s.grid.L_x / static_cast<double>(s.grid.n_x);
  double total = 0.0;
  for (std::size_t i = 0; i < s.grid.n_x; ++i) {
    for (std::size_t j = 0; j < s.columns; ++j) {
      const std::size_t k = i * s.columns + j;
      total += s.weight[j] * (re[k] * re[k] + im[k] * im[k]);
    }
  }
  return total * dx;
}

double max_abs(const std::vector<double>& re, const std::vector<double>& im) {
  double v = 0.0;
  for (std::size_t k = 0; k < re.size(); ++k) v = std::max(v, std::hypot(re[k], im[k]));
  return v;
}

// Control envelope: on until T, then a linear ramp to zero.
double control_profile(double t, double T, double ramp) {
  if (t <= T) return 1.0;
  if (ramp <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - (t - T) / ramp);
}

std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

}  // namespace

void SimGrid::validate() const {
  if (n_x < 1 || n_z < 1) throw ConfigError("grid: n_x and n_z must be at least 1");
  if (!(L_x > 0.0)) throw ConfigError("grid: L_x must be positive");
  if (!(z_o > 0.0)) throw ConfigError("grid: z_o must be positive");
  if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("grid: dt and T must be positive");
  if (dt > T) throw ConfigError("grid: dt exceeds the run time");
  if (n_classes < 1) throw ConfigError("grid: n_classes must be at least 1");
}

std::string envelope_name(EnvelopeShape shape) {
  switch (shape) {
    case EnvelopeShape::kGaussian: return "gaussian";
    case EnvelopeShape::kSquare: return "square";
    case EnvelopeShape::kCustom: return "custom";
  }
  return "gaussian";
}

EnvelopeShape parse_envelope(const std::string& name) {
  if (name == "gaussian") return EnvelopeShape::kGaussian;
  if (name == "square") return EnvelopeShape::kSquare;
  if (name == "custom") return EnvelopeShape::kCustom;
  throw ConfigError("unknown pulse envelope '" + name + "'");
}

cdouble PulseSpec::amplitude(double t) const {
  const cdouble carrier = std::exp(-kI * carrier_offset * t);
  switch (shape) {
    case EnvelopeShape::kGaussian: {
      const double u = (t - center) / width;
      return peak * std::exp(-0.5 * u * u) * carrier;
    }
    case EnvelopeShape::kSquare:
      return std::abs(t - center) <= 0.5 * width ? peak * carrier : cdouble{};
    case EnvelopeShape::kCustom: {
      if (samples.empty() || t < 0.0) return {};
      const double pos = t / sample_dt;
      const auto k = static_cast<std::size_t>(std::floor(pos));
      const double f = pos - static_cast<double>(k);
      if (k + 1 >= samples.size()) {
        return (k + 1 == samples.size() && f == 0.0) ? peak * samples[k] * carrier : cdouble{};
      }
      return peak * ((1.0 - f) * samples[k] + f * samples[k + 1]) * carrier;
    }
  }
  return {};
}

double PulseSpec::bandwidth() const {
  switch (shape) {
    case EnvelopeShape::kGaussian: return 1.0 / width;
    case EnvelopeShape::kSquare: return 2.0 * constants::kPi / width;
    case EnvelopeShape::kCustom: {
      double m0 = 0.0, m1 = 0.0, m2 = 0.0;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const double t = static_cast<double>(k) * sample_dt;
        const double p = std::norm(samples[k]);
        m0 += p;
        m1 += p * t;
        m2 += p * t * t;
      }
      if (m0 == 0.0) return 0.0;
      const double var = m2 / m0 - (m1 / m0) * (m1 / m0);
      return var > 0.0 ? 1.0 / std::sqrt(2.0 * var) : 1.0 / sample_dt;
    }
  }
  return 0.0;
}

void PulseSpec::validate() const {
  if (shape == EnvelopeShape::kCustom) {
    if (samples.size() < 2 || !(sample_dt > 0.0)) {
      throw ConfigError("pulse: custom envelope needs at least two samples and sample_dt > 0");
    }
  } else if (!(width > 0.0)) {
    throw ConfigError("pulse: width must be positive");
  }
}

std::string phase_name(Phase phase) {
  switch (phase) {
    case Phase::kStorage: return "storage";
    case Phase::kHold: return "hold";
    case Phase::kRetrieval: return "retrieval";
  }
  return "storage";
}

double SimState::excitation() const {
  return weighted_norm(*this, s13r, s13i) + weighted_norm(*this, s12r, s12i);
}

double SimState::s13_excitation() const { return weighted_norm(*this, s13r, s13i); }

double max_rate(const SimGrid& grid, const MemoryContext& ctx, const PulseSpec& pulse) {
  const auto& d = ctx.drive;
  double spread21 = 0.0;
  double spread31 = 0.0;
  if (const auto* g = std::get_if<GaussianBroadening>(&ctx.ensemble.broadening)) {
    spread21 = 3.0 * g->sigma21;
    spread31 = 3.0 * g->sigma31;
  }
  // Self-coupling of S13 through the half-cell field update.
  const double dx = grid.L_x / static_cast<double>(grid.n_x);
  const double coupling = 0.5 * dx * ctx.chi * 0.5 * d.xi1_p;
  return std::max({std::abs(d.delta_p) + spread31, std::abs(d.omega_cp),
                   std::abs(d.delta_pR) + spread21 + std::norm(d.omega_cp) / std::max(std::abs(d.delta_p), 1e-300),
                   pulse.bandwidth() + std::abs(pulse.carrier_offset), coupling,
                   ctx.ensemble.gamma21, ctx.ensemble.gamma31});
}

SimState run_storage(const SimGrid& grid, const MemoryContext& ctx, const PulseSpec& pulse,
                     const StorageOptions& options) {
  grid.validate();
  pulse.validate();
  ctx.ensemble.validate();
  ctx.drive.validate();
  if (std::abs(grid.z_o - ctx.ensemble.z_o) > 1e-12 * ctx.ensemble.z_o) {
    throw ConfigError("run_storage: grid z_o differs from the ensemble layer thickness");
  }
  if (!(options.ramp_time >= 0.0)) throw ConfigError("run_storage: ramp time must be >= 0");
  const double rate = max_rate(grid, ctx, pulse);
  if (grid.dt * rate > kCourant * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "run_storage: dt = " << grid.dt << " s exceeds " << kCourant << " / " << rate
        << " rad/s; reduce dt";
    throw ConfigError(msg.str());
  }
  if (pulse.shape != EnvelopeShape::kCustom && pulse.width / grid.dt < kMinSamplesPerWidth) {
    throw ConfigError("run_storage: dt does not resolve the pulse (need 8 samples per width)");
  }

  SimState s;
  s.grid = grid;
  s.ctx = ctx;
  s.pulse = pulse;
  s.options = options;
  s.phase = Phase::kStorage;
  setup_columns(s);

  const KernelTable& kt = select_kernels(options.kernel);
  s.kernel_name = kt.name;
  const auto& d = ctx.drive;
  const SystemCoefficients coef =
      coefficients(s, d.delta_p, d.delta_pR, d.xi1_p, d.xi1_cp, false, false, +1);
  Integrator integ(s, coef, kt);

  s.storage_duration = grid.T + options.ramp_time;
  const std::size_t n = step_count(s.storage_duration, grid.dt);
  const double dt = s.storage_duration / static_cast<double>(n);
  auto omega = [&](double t) { return d.omega_cp * control_profile(t, grid.T, options.ramp_time); };
  const double ce_max = *std::max_element(coef.ce.begin(), coef.ce.end());
  const double abs_delta = std::abs(d.delta_p);

  s.records.reserve(n + 1);
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    // pin the last stage to the end of the window; k * dt can round past grid.T
    const double t1 = k + 1 == n ? s.storage_duration : t + dt;
    const double th = 0.5 * (t + t1);
    const cdouble a0 = pulse.amplitude(t);
    const double stored = s.excitation();
    const double s12_max = max_abs(s.s12r, s.s12i);
    s.max_s13 = std::max(s.max_s13, max_abs(s.s13r, s.s13i));
    const cdouble out = integ.step(s, dt, a0, pulse.amplitude(th), pulse.amplitude(t1), omega(t), omega(th),
                                   omega(t1));
    bound = std::max(bound, (ce_max * integ.last_abar_max() + std::abs(omega(t)) * s12_max) / abs_delta);
    s.records.push_back({t, a0, out, stored});
  }
  const cdouble a_end = pulse.amplitude(s.storage_duration);
  s.records.push_back({s.storage_duration, a_end, integ.field_out(view(s), a_end), s.excitation()});
  s.max_s13 = std::max(s.max_s13, max_abs(s.s13r, s.s13i));
  s.adiabatic_bound = bound;

  std::vector<double> in(s.records.size()), out(s.records.size());
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    in[k] = std::norm(s.records[k].a_in);
    out[k] = std::norm(s.records[k].a_out);
  }
  s.input_energy = trapezoid(in, dt);
  s.transmitted_energy = trapezoid(out, dt);
  s.stored_at_switch = s.excitation();
  s.s13_at_switch = s.s13_excitation();
  return s;
}

void apply_hold(SimState& state, const CribPlan& plan, double hold_time) {
  if (state.phase != Phase::kStorage) throw ConfigError("apply_hold: state is not at the end of storage");
  if (!(hold_time >= 0.0)) throw ConfigError("apply_hold: hold time must be >= 0");

  state.s13_at_switch = state.s13_excitation();
  state.stored_at_switch = state.excitation();
  // With the control still on at the switch (no ramp, no hold) S13 is part of
  // the adiabatic dressed state and is handed over unchanged.
  if (hold_time > 0.0 || state.options.ramp_time > 0.0) {
    state.discarded_energy = state.s13_at_switch;
    std::fill(state.s13r.begin(), state.s13r.end(), 0.0);
    std::fill(state.s13i.begin(), state.s13i.end(), 0.0);
  }

  if (hold_time > 0.0) {
    const auto& d = state.ctx.drive;
    const double g = state.ctx.ensemble.gamma21;
    const double half = 0.5 * hold_time;
    for (std::size_t j = 0; j < state.columns; ++j) {
      const double d12_p = state.delta21[j] + d.delta_pR;
      const double d12_e = (plan.invert_delta21 ? -state.delta21[j] : state.delta21[j]) + plan.delta_eR;
      const cdouble f = std::exp(-(kI * d12_p + g) * half) * std::exp(-(kI * d12_e + g) * half);
      for (std::size_t i = 0; i < state.grid.n_x; ++i) {
        const std::size_t k = i * state.columns + j;
        const cdouble v = f * cdouble(state.s12r[k], state.s12i[k]);
        state.s12r[k] = v.real();
        state.s12i[k] = v.imag();
      }
    }
  }
  state.hold_time = hold_time;
  state.phase = Phase::kHold;
}

RetrievalResult run_retrieval(const SimState& stored, const CribPlan& plan) {
  if (stored.phase != Phase::kHold) throw ConfigError("run_retrieval: state must come from apply_hold");
  if (std::abs(plan.t_prime - stored.storage_duration) > 1e-9 * stored.storage_duration) {
    throw ConfigError("run_retrieval: plan switch time does not match the stored state");
  }
  if (!(plan.xi1_e > 0.0) || !(plan.xi1_ce > 0.0)) throw ConfigError("run_retrieval: plan confinements unset");

  RetrievalResult result{stored, {}, {}};
  SimState& s = result.state;
  s.phase = Phase::kRetrieval;
  s.records.clear();

  const KernelTable& kt = select_kernels(s.options.kernel);
  s.kernel_name = kt.name;
  const SystemCoefficients coef = coefficients(s, plan.delta_e, plan.delta_eR, plan.xi1_e, plan.xi1_ce,
                                               plan.invert_delta21, plan.invert_delta31, -1);
  Integrator integ(s, coef, kt);

  const double Ts = stored.storage_duration;
  const std::size_t n = stored.records.size() - 1;
  const double dt = Ts / static_cast<double>(n);
  const cdouble omega_cp = stored.ctx.drive.omega_cp;
  const double T = stored.grid.T;
  const double ramp = stored.options.ramp_time;
  auto omega = [&](double tau) { return plan.control_sign * omega_cp * control_profile(Ts - tau, T, ramp); };
  const double sign = plan.amplitude_sign_flip ? -1.0 : 1.0;

  EchoTrace& tr = result.trace;
  tr.t.reserve(n + 1);
  tr.echo.reserve(n + 1);
  tr.reference.reserve(n + 1);
  s.records.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k) * dt;
    const double excitation = s.excitation();
    const cdouble out = integ.step(s, dt, {}, {}, {}, omega(tau), omega(tau + 0.5 * dt), omega(tau + dt));
    tr.t.push_back(tau);
    tr.echo.push_back(sign * out);
    tr.reference.push_back(stored.records[n - k].a_in);
    s.records.push_back({tau, {}, sign * out, excitation});
  }
  const cdouble last = sign * integ.field_out(view(s), {});
  tr.t.push_back(Ts);
  tr.echo.push_back(last);
  tr.reference.push_back(stored.records[0].a_in);
  s.records.push_back({Ts, {}, last, s.excitation()});

  std::vector<double> pe(tr.echo.size()), pr(tr.echo.size());
  std::vector<cdouble> ov(tr.echo.size());
  for (std::size_t k = 0; k < tr.echo.size(); ++k) {
    pe[k] = std::norm(tr.echo[k]);
    pr[k] = std::norm(tr.reference[k]);
    ov[k] = std::conj(tr.echo[k]) * tr.reference[k];
  }
  const double e_echo = trapezoid(pe, dt);
  const double e_ref = trapezoid(pr, dt);
  s.emitted_energy = e_echo;

  EchoMetrics& m = result.metrics;
  const double e_in = stored.input_energy;
  m.stored_fraction = e_in > 0.0 ? stored.stored_at_switch / e_in : 0.0;
  m.transmitted_fraction = e_in > 0.0 ? stored.transmitted_energy / e_in : 0.0;
  m.efficiency = e_in > 0.0 ? e_echo / e_in : 0.0;
  m.fidelity = (e_echo > 0.0 && e_ref > 0.0) ? std::norm(trapezoid(ov, dt)) / (e_echo * e_ref) : 0.0;
  m.conservation_residual = conservation_audit(s);
  return result;
}

TransmissionSpectrum transmission_spectrum(const SimGrid& grid, const MemoryContext& ctx,
                                           const PulseSpec& pulse, const std::vector<double>& nu,
                                           const StorageOptions& options) {
  const SimState s = run_storage(grid, ctx, pulse, options);
  const auto& rec = s.records;

  TransmissionSpectrum out;
  out.nu = nu;
  out.transmission.resize(nu.size());
  for (std::size_t q = 0; q < nu.size(); ++q) {
    cdouble fin{};
    cdouble fout{};
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const double w = (k == 0 || k + 1 == rec.size()) ? 0.5 : 1.0;
      const cdouble phase = std::exp(kI * nu[q] * rec[k].t);
      fin += w * rec[k].a_in * phase;
      fout += w * rec[k].a_out * phase;
    }
    out.transmission[q] = fout / fin;
  }

  double peak_in = 0.0, peak_out = 0.0;
  for (const auto& r : rec) {
    peak_in = std::max(peak_in, std::abs(r.a_in));
    peak_out = std::max(peak_out, std::abs(r.a_out));
  }
  const double tail = 1e-6;
  out.leakage_warning = std::abs(rec.front().a_in) > tail * peak_in ||
                        std::abs(rec.back().a_in) > tail * peak_in ||
                        std::abs(rec.back().a_out) > tail * std::max(peak_in, peak_out);
  return out;
}

double conservation_audit(const SimState& state) {
  if (!(state.input_energy > 0.0)) {
    return std::abs(state.excitation() + state.transmitted_energy + state.emitted_energy);
  }
  const double accounted = state.transmitted_energy + state.excitation() + state.emitted_energy +
                           state.discarded_energy;
  return std::abs(state.input_energy - accounted) / state.input_energy;
}

double length_for_optical_density(const MemoryContext& ctx, double nu, double od) {
  if (!(od > 0.0)) throw DomainError("length_for_optical_density: target must be positive");
  const cdouble a = closed_form_applicable(ctx) ? alpha_closed(nu, ctx) : alpha_effective_numeric(nu, ctx);
  if (!(a.real() > 0.0)) {
    throw DomainError("length_for_optical_density: no absorption at this probe offset");
  }
  return od / a.real();
}

}  // namespace sppqm
