#include "spinsq/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "spinsq/error.hpp"

namespace spinsq {

namespace {

bool run_local(const std::string &key) {
  return key == "output.dir" || key == "output.cache" || key == "output.jobs";
}

std::ofstream open_out(const std::filesystem::path &path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Metadata &Metadata::note(const std::string &key, const std::string &value) {
  notes.emplace_back(key, value);
  return *this;
}

Metadata &Metadata::note(const std::string &key, double value) {
  return note(key, format_double(value));
}

Metadata make_metadata(const ScenarioConfig &config, const std::string &kind) {
  Metadata m;
  m.kind = kind;
  m.config_hash = config.hash();
  for (const auto &kv : config.echo)
    if (!run_local(kv.first)) m.echo.push_back(kv);
  for (const auto &k : config.defaulted)
    if (!run_local(k)) m.defaulted.push_back(k);
  return m;
}

void write_csv(const std::filesystem::path &path, const Metadata &meta,
               const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &columns) {
  require(!header.empty() && header.size() == columns.size(), ErrorKind::Domain,
          "csv header and column count differ");
  const auto rows = columns.front().size();
  for (const auto &c : columns)
    require(c.size() == rows, ErrorKind::Domain, "csv columns differ in length");

  auto out = open_out(path);
  out << "# spinsq " << tool_version << '\n';
  out << "# kind: " << meta.kind << '\n';
  out << "# config_hash: " << meta.config_hash << '\n';
  for (const auto &[k, v] : meta.echo) {
    const bool dflt = std::find(meta.defaulted.begin(), meta.defaulted.end(), k) !=
                      meta.defaulted.end();
    out << "# " << k << " = " << v << (dflt ? " (default)" : "") << '\n';
  }
  for (const auto &[k, v] : meta.notes) out << "# note " << k << ": " << v << '\n';
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j)
      out << (j ? "," : "") << format_double(columns[j][i]);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Config, "write failed for " + path.string());
}

void write_json(const std::filesystem::path &path, const Metadata &meta,
                nlohmann::json body) {
  nlohmann::json m;
  m["version"] = tool_version;
  m["kind"] = meta.kind;
  m["config_hash"] = meta.config_hash;
  nlohmann::json params = nlohmann::json::object();
  for (const auto &[k, v] : meta.echo) params[k] = v;
  m["parameters"] = params;
  m["defaulted"] = meta.defaulted;
  nlohmann::json notes = nlohmann::json::object();
  for (const auto &[k, v] : meta.notes) notes[k] = v;
  m["notes"] = notes;
  body["metadata"] = m;
  auto out = open_out(path);
  out << body.dump(2) << '\n';
  if (!out) fail(ErrorKind::Config, "write failed for " + path.string());
}

}  // namespace spinsq
