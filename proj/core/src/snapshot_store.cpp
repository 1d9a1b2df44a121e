#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "romforge/errors.hpp"
#include "romforge/fom.hpp"
#include "romforge/hash.hpp"
#include "romforge/io.hpp"

namespace romforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string snapshot_hash(const SnapshotSet& set) {
  Fnv1a h;
  for (std::size_t n = 0; n < set.size(); ++n) {
    h.update_value(set.times[n]);
    h.update(std::as_bytes(set.velocity[n].data()));
    h.update(std::as_bytes(set.pressure[n].data()));
  }
  for (const auto& [name, trace] : set.bc_trace) {
    h.update(name);
    for (const Vec2& v : trace) {
      h.update_value(v.x);
      h.update_value(v.y);
    }
  }
  return h.hex();
}

void write_snapshots(const std::string& dir, const SnapshotSet& set, const std::string& config_json) {
  fs::create_directories(dir);
  json j;
  j["count"] = set.size();
  j["times"] = set.times;
  j["config_hash"] = set.config_hash;
  j["hash"] = snapshot_hash(set);
  if (!set.size()) throw ConfigError("refusing to write an empty snapshot set");
  j["mesh_fingerprint"] = to_hex(set.velocity.front().mesh().fingerprint());
  json trace = json::object();
  for (const auto& [name, values] : set.bc_trace) {
    json arr = json::array();
    for (const Vec2& v : values) arr.push_back({v.x, v.y});
    trace[name] = arr;
  }
  j["bc_trace"] = trace;
  double max_div = 0.0, max_imbalance = 0.0;
  for (double d : set.continuity_residual) max_div = std::max(max_div, d);
  for (double d : set.mass_imbalance) max_imbalance = std::max(max_imbalance, d);
  j["max_continuity_residual"] = max_div;
  j["max_mass_imbalance"] = max_imbalance;
  if (!config_json.empty()) {
    try {
      j["config"] = json::parse(config_json);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("snapshot config is not JSON: ") + e.what());
    }
  }
  for (std::size_t n = 0; n < set.size(); ++n) {
    char u[32], p[32];
    std::snprintf(u, sizeof u, "u_%04zu.field", n);
    std::snprintf(p, sizeof p, "p_%04zu.field", n);
    write_field(set.velocity[n], fs::path(dir) / u);
    write_field(set.pressure[n], fs::path(dir) / p);
  }
  std::ofstream os(fs::path(dir) / "manifest.json");
  if (!os) throw ConfigError("cannot write snapshot manifest in '" + dir + "'");
  os << j.dump(2) << '\n';
}

SnapshotSet read_snapshots(const std::string& dir, const MeshPtr& mesh) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) throw ConfigError("no snapshot manifest in '" + dir + "'");
  try {
    json j;
    is >> j;
    SnapshotSet set;
    set.times = j.at("times").get<std::vector<double>>();
    set.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [name, arr] : j.at("bc_trace").items())
      for (const auto& v : arr) set.bc_trace[name].push_back({v[0].get<double>(), v[1].get<double>()});
    for (std::size_t n = 0; n < set.times.size(); ++n) {
      char u[32], p[32];
      std::snprintf(u, sizeof u, "u_%04zu.field", n);
      std::snprintf(p, sizeof p, "p_%04zu.field", n);
      set.velocity.push_back(read_field(fs::path(dir) / u, mesh));
      set.pressure.push_back(read_field(fs::path(dir) / p, mesh));
    }
    if (snapshot_hash(set) != j.at("hash").get<std::string>())
      throw ConfigError("snapshots in '" + dir + "' do not match their manifest hash");
    return set;
  } catch (const json::exception& e) {
    throw ConfigError("malformed snapshot manifest in '" + dir + "': " + e.what());
  }
}

}  // namespace romforge
