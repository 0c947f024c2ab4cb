#include "sppqm/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include "sppqm/config.hpp"
#include "sppqm/dynamics.hpp"
#include "sppqm/errors.hpp"
#include "sppqm/memory.hpp"
#include "sppqm/output.hpp"
#include "sppqm/sppmode.hpp"

namespace sppqm {

using nlohmann::json;

namespace {

const std::string kToolVersion = std::string("sppqm ") + SPPQM_VERSION;
constexpr double kSweepSuccessFraction = 0.9;

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> od_threshold;
  bool no_retrieval = false;
  std::optional<long long> seed;  // reserved: no stochastic path yet
};

struct RunContext {
  json cfg;
  std::string sha;
  std::filesystem::path dir;
  bool csv = true;
  bool json_out = true;

  Provenance provenance(const std::string& vg_policy) const {
    return {kToolVersion, sha, vg_policy, cfg};
  }
  std::string path(const char* name) const { return (dir / name).string(); }
};

RunContext prepare(const CliOptions& opt) {
  json user = opt.config_path.empty() ? json::object() : load_config_file(opt.config_path);
  if (opt.out_dir) user["output"]["directory"] = *opt.out_dir;
  if (opt.od_threshold) user["memory"]["od_threshold"] = *opt.od_threshold;
  RunContext rc;
  rc.cfg = resolve_config(user);
  rc.sha = config_sha256(rc.cfg);
  rc.dir = rc.cfg.at("output").at("directory").get<std::string>();
  rc.csv = false;
  rc.json_out = false;
  for (const auto& f : rc.cfg.at("output").at("formats")) {
    if (f == "csv") rc.csv = true;
    if (f == "json") rc.json_out = true;
  }
  std::error_code ec;
  std::filesystem::create_directories(rc.dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + rc.dir.string() + ": " + ec.message());
  return rc;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 1) return {hi};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return v;
}

json nullable(double v, bool present) { return present ? json(v) : json(nullptr); }

int cmd_sweep(const CliOptions& opt, std::ostream& out, bool figure1) {
  const RunContext rc = prepare(opt);
  const SweepGrid grid = sweep_from_config(rc.cfg);
  InterfaceSpec base = interface_from_config(rc.cfg);
  const auto rows = figure1 ? sweep_figure1(grid, base) : sweep_figure2(grid, base);

  CsvWriter csv(rc.provenance(vg_policy_name(VgPolicy::kPhaseVelocity)),
                {"eps_r", "eps_im", figure1 ? "lx_over_lambda" : "xi1_over_lambda"});
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) {
      ++ok;
    } else {
      csv.add_comment("error: eps_r=" + format_number(r.eps_r) + " eps_im=" + format_number(r.eps_i) +
                      ": " + r.error);
    }
    csv.add_row({r.eps_r, r.eps_i, r.value});
  }
  const char* name = figure1 ? "fig1.csv" : "fig2.csv";
  if (rc.csv) csv.write(rc.path(name));
  out << name << ": " << ok << "/" << rows.size() << " grid points solved\n";
  return static_cast<double>(ok) >= kSweepSuccessFraction * static_cast<double>(rows.size()) ? kExitOk
                                                                                            : kExitNumeric;
}

int cmd_fig6(const CliOptions& opt, std::ostream& out) {
  const RunContext rc = prepare(opt);
  const auto& m = rc.cfg.at("memory");
  const InterfaceSpec spec = interface_from_config(rc.cfg);
  const SppMode mode = memory_mode_from_config(rc.cfg, spec);
  if (!std::isfinite(mode.l_x)) throw ConfigError("fig6: lossless mode has no propagation length to scale L_x");
  const RamanEnsemble ens = ensemble_from_config(rc.cfg, spec.lambda_o);
  const DriveConfig drive = drive_from_config(rc.cfg, spec.lambda_o);
  const MemoryContext ctx = make_context(mode, ens, drive, spec.omega(), normalization_from_config(rc.cfg));
  const double L_x = m.at("lx_fraction").get<double>() * mode.l_x;
  const double threshold = m.at("od_threshold").get<double>();
  if (!(threshold > 0.0)) throw ConfigError("fig6: od threshold must be positive");

  const auto nu = linspace(m.at("nu_min").get<double>(), m.at("nu_max").get<double>(),
                           m.at("nu_points").get<std::size_t>());
  const auto zo = linspace(0.0, m.at("zo_max_over_lambda").get<double>() * spec.lambda_o,
                           m.at("zo_points").get<std::size_t>());
  const OdMap map = optical_density_map(nu, zo, ctx, L_x);
  const OdSummary sum = summarize_od_map(map, ens.gamma21, threshold);

  const Provenance prov = rc.provenance(vg_policy_name(mode.vg_policy));
  CsvWriter csv(prov, {"nu_rad_per_s", "zo_over_lambda", "od"});
  std::size_t failed = 0;
  for (std::size_t iz = 0; iz < zo.size(); ++iz) {
    for (std::size_t k = 0; k < nu.size(); ++k) {
      const std::size_t idx = iz * nu.size() + k;
      if (!map.cell_error[idx].empty()) {
        ++failed;
        csv.add_comment("error: nu=" + format_number(nu[k]) + " zo_over_lambda=" +
                        format_number(zo[iz] / spec.lambda_o) + ": " + map.cell_error[idx]);
      }
      csv.add_row({nu[k], zo[iz] / spec.lambda_o, map.od[idx]});
    }
  }
  if (rc.csv) csv.write(rc.path("od_map.csv"));

  const bool min_found = sum.od_gt_threshold_min_zo >= 0.0;
  json doc{
      {"window_lo", nullable(sum.window.lo, sum.window.found)},
      {"window_hi", nullable(sum.window.hi, sum.window.found)},
      {"window_width", sum.window.width()},
      {"max_od", sum.max_od},
      {"capacity", sum.capacity},
      {"od_gt3_min_zo", nullable(sum.od_gt_threshold_min_zo, min_found)},
      {"od_gt3_min_zo_over_lambda", nullable(sum.od_gt_threshold_min_zo / spec.lambda_o, min_found)},
      {"od_threshold", threshold},
      {"chi", ctx.chi},
      {"field_normalization", field_normalization_name(normalization_from_config(rc.cfg))},
      {"l_x", L_x},
      {"failed_cells", failed},
  };
  if (rc.json_out) write_json(rc.path("fig6_summary.json"), with_provenance(doc, prov));
  out << "fig6: max OD " << sum.max_od << ", window width " << sum.window.width() << " rad/s, capacity "
      << sum.capacity << "\n";
  return failed == 0 ? kExitOk : kExitNumeric;
}

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

int cmd_dispersion(const CliOptions& opt, std::ostream& out) {
  const RunContext rc = prepare(opt);
  const InterfaceSpec spec = interface_from_config(rc.cfg);
  const SppMode mode = solve_mode(spec);
  const double lam = spec.lambda_o;
  json doc{
      {"lambda_o", lam},
      {"omega", mode.omega},
      {"eps2", complex_json(spec.nimm.eps2)},
      {"K_exact_over_k0", complex_json(mode.K / spec.k0())},
      {"xi1_over_lambda", mode.xi1 / lam},
      {"xi2_over_lambda", mode.xi2 / lam},
      {"lambda_par_over_lambda", mode.lambda_par / lam},
      {"lx_over_lambda", std::isfinite(mode.l_x) ? json(mode.l_x / lam) : json(nullptr)},
      {"k1_over_k0", complex_json(mode.k1 / spec.k0())},
      {"k2_over_k0", complex_json(mode.k2 / spec.k0())},
      {"magnetic_suppression", magnetic_suppression(mode, spec)},
      {"lz_over_lambda", mode.Lz / lam},
      {"v_phase", mode.v_phase},
      {"v_group", mode.v_group},
  };
  try {
    const ApproxDispersion ap = dispersion_approx(spec);
    doc["K_approx_over_k0"] = complex_json(ap.K / spec.k0());
    doc["u"] = ap.u;
  } catch (const DomainError& e) {
    doc["K_approx_over_k0"] = nullptr;
    doc["approx_error"] = e.what();
  }
  const LowLossDiagnostics ll = low_loss_check(spec, 0.1);
  doc["low_loss"] = {{"r1", ll.r1}, {"r2", ll.r2}, {"margin", 0.1}, {"pass", ll.pass}};
  if (spec.drude) {
    const QuantizationLimit q = quantization_length_limit(*spec.drude, spec, mode.xi1);
    doc["lz_limit_over_lambda"] = {{"form_a", q.form_a / lam}, {"form_b", q.form_b / lam}};
  }
  const Provenance prov = rc.provenance(vg_policy_name(mode.vg_policy));
  if (rc.json_out) write_json(rc.path("dispersion.json"), with_provenance(doc, prov));
  out << "dispersion: K/k0 = " << mode.K.real() / spec.k0() << " + " << mode.K.imag() / spec.k0() << "i\n";
  return kExitOk;
}

json metrics_json(const SimState& storage, const EchoMetrics* m) {
  const double e_in = storage.input_energy;
  json doc{
      {"stored_fraction", e_in > 0 ? storage.stored_at_switch / e_in : 0.0},
      {"transmitted_fraction", e_in > 0 ? storage.transmitted_energy / e_in : 0.0},
      {"efficiency", m ? json(m->efficiency) : json(nullptr)},
      {"fidelity", m ? json(m->fidelity) : json(nullptr)},
      {"conservation_residual", m ? m->conservation_residual : conservation_audit(storage)},
      {"kernel", storage.kernel_name},
      {"grid",
       {{"n_x", storage.grid.n_x},
        {"n_z", storage.grid.n_z},
        {"L_x", storage.grid.L_x},
        {"z_o", storage.grid.z_o},
        {"dt", storage.grid.dt},
        {"T", storage.grid.T}}},
      {"chi", storage.ctx.chi},
      {"hold_time", storage.hold_time},
  };
  return doc;
}

int cmd_simulate(const CliOptions& opt, std::ostream& out, bool demo) {
  if (demo && opt.no_retrieval) throw ConfigError("crib-demo always runs the retrieval; drop --no-retrieval");
  const RunContext rc = prepare(opt);
  const DynamicsSetup setup = dynamics_from_config(rc.cfg);
  const std::size_t stride = rc.cfg.at("output").at("record_stride").get<std::size_t>();
  const InterfaceSpec spec = interface_from_config(rc.cfg);
  const Provenance prov = rc.provenance(vg_policy_name(memory_mode_from_config(rc.cfg, spec).vg_policy));

  SimState storage = run_storage(setup.grid, setup.ctx, setup.pulse, setup.options);
  std::optional<RetrievalResult> ret;
  if (!opt.no_retrieval) {
    const CribPlan plan = crib_plan(setup.ctx.drive, setup.ctx.ensemble, storage.storage_duration);
    SimState held = storage;
    apply_hold(held, plan, setup.hold_time);
    ret = run_retrieval(held, plan);
    storage.hold_time = held.hold_time;
  }
  const EchoMetrics* metrics = ret ? &ret->metrics : nullptr;

  if (rc.csv && !demo) {
    CsvWriter csv(prov, {"t", "re_a_in", "im_a_in", "re_a_out", "im_a_out", "stored_excitation"});
    const auto& rec = storage.records;
    for (std::size_t k = 0; k < rec.size(); k += stride) {
      csv.add_row({rec[k].t, rec[k].a_in.real(), rec[k].a_in.imag(), rec[k].a_out.real(), rec[k].a_out.imag(),
                   rec[k].stored_excitation});
    }
    if (ret) {
      const double offset = storage.storage_duration + setup.hold_time;
      const auto& er = ret->state.records;
      for (std::size_t k = 0; k < er.size(); k += stride) {
        csv.add_row({offset + er[k].t, 0.0, 0.0, er[k].a_out.real(), er[k].a_out.imag(), er[k].stored_excitation});
      }
    }
    csv.write(rc.path("records.csv"));
  }
  if (rc.csv && demo) {
    CsvWriter csv(prov, {"t", "re_a_in", "im_a_in", "re_a_out", "im_a_out", "re_echo", "im_echo",
                         "re_reference", "im_reference"});
    const auto& rec = storage.records;
    const auto& tr = ret->trace;
    for (std::size_t k = 0; k < rec.size() && k < tr.t.size(); k += stride) {
      csv.add_row({rec[k].t, rec[k].a_in.real(), rec[k].a_in.imag(), rec[k].a_out.real(), rec[k].a_out.imag(),
                   tr.echo[k].real(), tr.echo[k].imag(), tr.reference[k].real(), tr.reference[k].imag()});
    }
    csv.write(rc.path("crib_demo.csv"));
  }
  if (rc.json_out) write_json(rc.path("metrics.json"), with_provenance(metrics_json(storage, metrics), prov));

  if (metrics) {
    out << (demo ? "crib-demo" : "simulate") << ": efficiency " << metrics->efficiency << ", fidelity "
        << metrics->fidelity << "\n";
  } else {
    out << "simulate: stored fraction " << storage.stored_at_switch / storage.input_energy
        << " (retrieval skipped)\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SPP mode solver and Raman-echo memory simulator"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "output directory (shadows output.directory)");
  app.add_option("--od-threshold", opt.od_threshold, "optical-density threshold (shadows memory.od_threshold)");
  app.add_flag("--no-retrieval", opt.no_retrieval, "stop after storage");
  app.add_option("--seed", opt.seed, "reserved; no stochastic path uses it yet");

  auto* fig1 = app.add_subcommand("fig1", "propagation length sweep");
  auto* fig2 = app.add_subcommand("fig2", "confinement sweep");
  auto* fig6 = app.add_subcommand("fig6", "optical density map and window summary");
  auto* disp = app.add_subcommand("dispersion", "solve one SPP mode");
  auto* sim = app.add_subcommand("simulate", "storage, hold and echo retrieval");
  auto* demo = app.add_subcommand("crib-demo", "echo beside the time-reversed input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fig1->parsed()) return cmd_sweep(opt, out, true);
    if (fig2->parsed()) return cmd_sweep(opt, out, false);
    if (fig6->parsed()) return cmd_fig6(opt, out);
    if (disp->parsed()) return cmd_dispersion(opt, out);
    if (sim->parsed()) return cmd_simulate(opt, out, false);
    if (demo->parsed()) return cmd_simulate(opt, out, true);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

}  // namespace sppqm
