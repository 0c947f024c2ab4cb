#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace sppqm {

// Provenance stamped on every artifact.
struct Provenance {
  std::string tool_version;
  std::string config_sha256;
  std::string vg_policy;
  nlohmann::json config;  // resolved, embedded verbatim
};

// Shortest round-trip decimal, locale independent; non-finite values print
// as nan / inf / -inf.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(Provenance provenance, std::vector<std::string> header);

  void add_comment(const std::string& line);  // emitted as "# line" before the header
  void add_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  Provenance prov_;
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::string body_;
};

// Adds tool_version, config_sha256, vg_policy and config to `doc`.
nlohmann::json with_provenance(nlohmann::json doc, const Provenance& provenance);

void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace sppqm
