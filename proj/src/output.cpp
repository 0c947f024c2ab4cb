#include "sppqm/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "sppqm/errors.hpp"

namespace sppqm {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(Provenance provenance, std::vector<std::string> header)
    : prov_(std::move(provenance)), header_(std::move(header)) {}

void CsvWriter::add_comment(const std::string& line) { comments_.push_back(line); }

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw Error("csv: row width does not match header");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) body_.push_back(',');
    body_ += format_number(values[k]);
  }
  body_.push_back('\n');
}

std::string CsvWriter::str() const {
  std::string out;
  out += "# tool_version: " + prov_.tool_version + "\n";
  out += "# config_sha256: " + prov_.config_sha256 + "\n";
  out += "# vg_policy: " + prov_.vg_policy + "\n";
  out += "# config: " + prov_.config.dump() + "\n";
  for (const auto& c : comments_) out += "# " + c + "\n";
  for (std::size_t k = 0; k < header_.size(); ++k) {
    if (k) out.push_back(',');
    out += header_[k];
  }
  out.push_back('\n');
  out += body_;
  return out;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << str();
}

nlohmann::json with_provenance(nlohmann::json doc, const Provenance& p) {
  doc["tool_version"] = p.tool_version;
  doc["config_sha256"] = p.config_sha256;
  doc["vg_policy"] = p.vg_policy;
  doc["config"] = p.config;
  return doc;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << doc.dump(2) << '\n';
}

}  // namespace sppqm
