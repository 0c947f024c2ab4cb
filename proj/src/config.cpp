#include "sppqm/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sppqm/errors.hpp"
#include "sppqm/units.hpp"

namespace sppqm {

using nlohmann::json;

namespace {

// Keys whose default is a number but which also accept null.
const std::set<std::string> kNullable = {
    "/memory/lz_over_lambda",
    "/dynamics/l_x_m",
};

std::string type_label(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config: " + (path.empty() ? "/" : path) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key_path = path + "/" + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key " + key_path);
    json& slot = base[it.key()];
    const json& v = it.value();
    if (slot.is_object()) {
      overlay(slot, v, key_path);
      continue;
    }
    const bool nullable = kNullable.count(key_path) > 0;
    const bool ok = (v.is_null() && nullable) ||
                    (slot.is_null() && nullable && v.is_number()) ||
                    (slot.is_number() && v.is_number()) ||
                    (slot.is_boolean() && v.is_boolean()) ||
                    (slot.is_string() && v.is_string()) ||
                    (slot.is_array() && v.is_array());
    if (!ok) {
      throw ConfigError("config: " + key_path + " expects " + type_label(slot) + ", got " + type_label(v));
    }
    slot = v;
  }
}

double number(const json& j, const char* key, const char* section) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config: /") + section + "/" + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("config: /") + section + "/" + key + " is not finite");
  return x;
}

Broadening broadening_from(const json& b, const char* section) {
  const std::string type = b.at("type").get<std::string>();
  if (type == "homogeneous") return Homogeneous{};
  if (type == "gaussian") {
    GaussianBroadening g;
    g.sigma21 = number(b, "sigma21", section);
    g.sigma31 = number(b, "sigma31", section);
    return g;
  }
  throw ConfigError(std::string("config: /") + section + "/broadening/type must be homogeneous or gaussian");
}

void check_sections(const json& cfg) {
  const auto& m = cfg.at("materials");
  if (m.at("eps2").size() != 2 || !m.at("eps2")[0].is_number() || !m.at("eps2")[1].is_number()) {
    throw ConfigError("config: /materials/eps2 must be [re, im]");
  }
  for (const auto& v : cfg.at("sweep").at("eps_i")) {
    if (!v.is_number()) throw ConfigError("config: /sweep/eps_i must hold numbers");
  }
  for (const auto& v : cfg.at("output").at("formats")) {
    if (!v.is_string() || (v != "csv" && v != "json")) {
      throw ConfigError("config: /output/formats entries must be \"csv\" or \"json\"");
    }
  }
  const auto& mem = cfg.at("memory");
  if (mem.at("nu_points").get<double>() < 2 || mem.at("zo_points").get<double>() < 1) {
    throw ConfigError("config: /memory needs nu_points >= 2 and zo_points >= 1");
  }
  const auto& dyn = cfg.at("dynamics");
  for (const char* k : {"n_x", "n_z", "n_classes"}) {
    const double v = dyn.at(k).get<double>();
    if (v < 1 || v != std::floor(v)) throw ConfigError(std::string("config: /dynamics/") + k + " must be a positive integer");
  }
  if (cfg.at("output").at("record_stride").get<double>() < 1) {
    throw ConfigError("config: /output/record_stride must be >= 1");
  }
}

}  // namespace

json default_config() {
  return json{
      {"materials",
       {{"lambda_o_m", 285e-9},
        {"eps1", 1.31},
        {"mu1", 1.0},
        {"eps2", {-1.34, 1e-4}},
        {"mu2", 0.0},
        {"eps_inf", 2.0},
        {"mu_inf", 2.0},
        {"drude",
         {{"enabled", false},
          {"eps_inf", 2.0},
          {"omega_e", 1.37e16},
          {"gamma_e", 0.0},
          {"mu_inf", 2.0},
          {"omega_mu", 1.37e16 / 1.67}}}}},
      {"sweep",
       {{"eps_r_start", -1.60},
        {"eps_r_stop", -1.315},
        {"eps_r_step", 0.0025},
        {"eps_i", {1e-3, 0.031622776601683794, 1e-2}}}},
      {"memory",
       {{"n_o_per_cm3", 2e19},
        {"d13_e_a0", 1e-3},
        {"gamma21", 1e4},
        {"gamma31", 0.0},
        {"z_o_over_lambda", 0.3},
        {"broadening", {{"type", "homogeneous"}, {"sigma21", 0.0}, {"sigma31", 0.0}}},
        {"omega_cp", 1e7},
        {"delta_p", 1e7},
        {"delta_pR", 7e7},
        {"xi1_p_over_lambda", 0.025},
        {"xi1_cp_over_lambda", 0.025},
        {"lz_over_lambda", 0.55},
        {"lx_fraction", 0.1},
        {"normalization", "si"},
        {"nu_min", 0.0},
        {"nu_max", 1e8},
        {"nu_points", 200},
        {"zo_max_over_lambda", 0.5},
        {"zo_points", 50},
        {"od_threshold", 3.0}}},
      {"dynamics",
       {{"delta_p", 1e8},
        {"omega_cp", 2e7},
        {"stark_fraction", 0.5},
        {"optical_density", 3.0},
        {"l_x_m", nullptr},
        {"zo_over_xi", 10.0},
        {"bandwidth_fraction", 0.1},
        {"carrier_offset", 0.0},
        {"envelope", "gaussian"},
        {"gamma21", 0.0},
        {"gamma31", 0.0},
        {"broadening", {{"type", "homogeneous"}, {"sigma21", 0.0}, {"sigma31", 0.0}}},
        {"hold_time", 0.0},
        {"ramp_time", 0.0},
        {"n_x", 16},
        {"n_z", 32},
        {"n_classes", 5},
        {"courant", 0.1},
        {"kernel", "auto"}}},
      {"output", {{"directory", "out"}, {"formats", {"csv", "json"}}, {"record_stride", 10}}},
  };
}

json resolve_config(const json& user) {
  json cfg = default_config();
  if (!user.is_null()) overlay(cfg, user, "");
  check_sections(cfg);
  return cfg;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + " is not valid JSON (" + e.what() + ")");
  }
}

std::string config_sha256(const json& resolved) {
  const std::string text = resolved.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config: SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

InterfaceSpec interface_from_config(const json& cfg) {
  const auto& m = cfg.at("materials");
  DielectricParams d{number(m, "eps1", "materials"), number(m, "mu1", "materials")};
  const double lambda = number(m, "lambda_o_m", "materials");
  const auto& dr = m.at("drude");
  InterfaceSpec spec;
  if (dr.at("enabled").get<bool>()) {
    DrudeModel model{number(dr, "eps_inf", "materials/drude"), number(dr, "omega_e", "materials/drude"),
                     number(dr, "gamma_e", "materials/drude"), number(dr, "mu_inf", "materials/drude"),
                     number(dr, "omega_mu", "materials/drude")};
    model.validate();
    spec = InterfaceSpec::from_drude(d, model, lambda);
  } else {
    spec.dielectric = d;
    spec.lambda_o = lambda;
    spec.nimm.eps2 = cdouble(m.at("eps2")[0].get<double>(), m.at("eps2")[1].get<double>());
    spec.nimm.mu2 = number(m, "mu2", "materials");
    spec.eps_inf = number(m, "eps_inf", "materials");
    spec.mu_inf = number(m, "mu_inf", "materials");
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

SweepGrid sweep_from_config(const json& cfg) {
  const auto& s = cfg.at("sweep");
  SweepGrid g;
  g.eps_r_start = number(s, "eps_r_start", "sweep");
  g.eps_r_stop = number(s, "eps_r_stop", "sweep");
  g.eps_r_step = number(s, "eps_r_step", "sweep");
  g.eps_i = s.at("eps_i").get<std::vector<double>>();
  if (g.eps_i.empty()) throw ConfigError("config: /sweep/eps_i is empty");
  if (!(g.eps_r_step > 0.0) || g.eps_r_stop < g.eps_r_start) {
    throw ConfigError("config: /sweep eps_r range is empty");
  }
  return g;
}

RamanEnsemble ensemble_from_config(const json& cfg, double lambda_o) {
  const auto& m = cfg.at("memory");
  RamanEnsemble e;
  e.n_o = convert_units(number(m, "n_o_per_cm3", "memory"), Unit::kPerCubicCentimetre, Unit::kPerCubicMetre);
  e.d13 = convert_units(number(m, "d13_e_a0", "memory"), Unit::kElectronBohr, Unit::kCoulombMetre);
  e.gamma21 = number(m, "gamma21", "memory");
  e.gamma31 = number(m, "gamma31", "memory");
  e.z_o = number(m, "z_o_over_lambda", "memory") * lambda_o;
  e.broadening = broadening_from(m.at("broadening"), "memory");
  try {
    e.validate();
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return e;
}

DriveConfig drive_from_config(const json& cfg, double lambda_o) {
  const auto& m = cfg.at("memory");
  DriveConfig d;
  d.omega_cp = number(m, "omega_cp", "memory");
  d.delta_p = number(m, "delta_p", "memory");
  d.delta_pR = number(m, "delta_pR", "memory");
  d.xi1_p = number(m, "xi1_p_over_lambda", "memory") * lambda_o;
  d.xi1_cp = number(m, "xi1_cp_over_lambda", "memory") * lambda_o;
  try {
    d.validate();
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return d;
}

FieldNormalization normalization_from_config(const json& cfg) {
  return parse_field_normalization(cfg.at("memory").at("normalization").get<std::string>());
}

SppMode memory_mode_from_config(const json& cfg, const InterfaceSpec& spec) {
  SppMode mode = solve_mode(spec);
  const json& lz = cfg.at("memory").at("lz_over_lambda");
  if (!lz.is_null()) mode.Lz = lz.get<double>() * spec.lambda_o;
  return mode;
}

DynamicsSetup dynamics_from_config(const json& cfg) {
  const InterfaceSpec spec = interface_from_config(cfg);
  const SppMode mode = memory_mode_from_config(cfg, spec);
  const auto& dy = cfg.at("dynamics");

  DriveConfig drive = drive_from_config(cfg, spec.lambda_o);
  drive.delta_p = number(dy, "delta_p", "dynamics");
  drive.omega_cp = number(dy, "omega_cp", "dynamics");
  if (drive.delta_p == 0.0) throw ConfigError("config: /dynamics/delta_p must be non-zero");
  const double window = std::norm(drive.omega_cp) / std::abs(drive.delta_p);
  if (!(window > 0.0)) throw ConfigError("config: /dynamics/omega_cp must be non-zero");
  drive.delta_pR = number(dy, "stark_fraction", "dynamics") * window;

  RamanEnsemble ens = ensemble_from_config(cfg, spec.lambda_o);
  ens.gamma21 = number(dy, "gamma21", "dynamics");
  ens.gamma31 = number(dy, "gamma31", "dynamics");
  ens.broadening = broadening_from(dy.at("broadening"), "dynamics");
  ens.z_o = number(dy, "zo_over_xi", "dynamics") * drive.xi1_p;

  const double bf = number(dy, "bandwidth_fraction", "dynamics");
  if (!(bf > 0.0)) throw ConfigError("config: /dynamics/bandwidth_fraction must be positive");
  const double sigma_w = bf * window;

  DynamicsSetup s;
  s.pulse.shape = parse_envelope(dy.at("envelope").get<std::string>());
  if (s.pulse.shape == EnvelopeShape::kCustom) {
    throw ConfigError("config: custom envelopes are only available through the library API");
  }
  s.pulse.width = s.pulse.shape == EnvelopeShape::kGaussian ? 1.0 / sigma_w : 2.0 * constants::kPi / sigma_w;
  s.pulse.carrier_offset = number(dy, "carrier_offset", "dynamics");
  drive.probe_bandwidth = s.pulse.bandwidth();
  s.ctx = make_context(mode, ens, drive, spec.omega(), normalization_from_config(cfg));

  s.grid.n_x = dy.at("n_x").get<std::size_t>();
  s.grid.n_z = dy.at("n_z").get<std::size_t>();
  s.grid.n_classes = dy.at("n_classes").get<std::size_t>();
  s.grid.z_o = ens.z_o;
  const json& lx = dy.at("l_x_m");
  s.grid.L_x = lx.is_null()
                   ? length_for_optical_density(s.ctx, s.pulse.carrier_offset, number(dy, "optical_density", "dynamics"))
                   : lx.get<double>();
  s.grid.T = 12.0 / sigma_w;
  s.pulse.center = 0.5 * s.grid.T;
  s.options.ramp_time = number(dy, "ramp_time", "dynamics");
  s.options.kernel = parse_kernel_choice(dy.at("kernel").get<std::string>());
  s.hold_time = number(dy, "hold_time", "dynamics");
  s.grid.dt = number(dy, "courant", "dynamics") / max_rate(s.grid, s.ctx, s.pulse);
  return s;
}

}  // namespace sppqm
