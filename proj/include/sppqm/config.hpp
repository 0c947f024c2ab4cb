#pragma once

#include <json.hpp>
#include <string>

#include "sppqm/dynamics.hpp"
#include "sppqm/memory.hpp"
#include "sppqm/sppmode.hpp"

namespace sppqm {

// Full configuration with every default filled in.
nlohmann::json default_config();

// Overlays `user` on the defaults. Unknown keys and type mismatches throw
// ConfigError naming the offending path.
nlohmann::json resolve_config(const nlohmann::json& user);

nlohmann::json load_config_file(const std::string& path);

// SHA-256 (hex) of the compact serialisation of a resolved config.
std::string config_sha256(const nlohmann::json& resolved);

InterfaceSpec interface_from_config(const nlohmann::json& cfg);
SweepGrid sweep_from_config(const nlohmann::json& cfg);
RamanEnsemble ensemble_from_config(const nlohmann::json& cfg, double lambda_o);
DriveConfig drive_from_config(const nlohmann::json& cfg, double lambda_o);
FieldNormalization normalization_from_config(const nlohmann::json& cfg);

// Mode used by the memory and dynamics commands: solved from the materials
// section, with L_z replaced by memory.lz_over_lambda when that is set.
SppMode memory_mode_from_config(const nlohmann::json& cfg, const InterfaceSpec& spec);

// Everything needed for one storage / hold / retrieval run.
struct DynamicsSetup {
  SimGrid grid;
  MemoryContext ctx;
  PulseSpec pulse;
  StorageOptions options;
  double hold_time = 0.0;
};

DynamicsSetup dynamics_from_config(const nlohmann::json& cfg);

}  // namespace sppqm
