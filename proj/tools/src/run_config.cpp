#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hjb::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

GridSpec parse_grid(const json& g, const std::string& where) {
  reject_unknown(g, {"t_nodes", "x_lo", "x_hi", "x_nodes", "v_nodes", "stagger"}, where);
  GridSpec spec;
  if (g.contains("t_nodes")) spec.t_nodes = g.at("t_nodes").get<int>();
  if (g.contains("x_lo")) spec.x_lo = g.at("x_lo").get<double>();
  if (g.contains("x_hi")) spec.x_hi = g.at("x_hi").get<double>();
  if (g.contains("x_nodes")) spec.x_nodes = g.at("x_nodes").get<int>();
  if (g.contains("v_nodes")) spec.v_nodes = g.at("v_nodes").get<int>();
  if (g.contains("stagger")) spec.stagger = g.at("stagger").get<double>();
  return spec;
}

}  // namespace

RunConfig::RunConfig() : levels(default_levels()) {}

std::vector<GridSpec> default_levels() {
  GridSpec l1{201, -5.0, 7.0, 1201, 41, 0.25};
  GridSpec l2{401, -5.0, 7.0, 2401, 81, 0.25};
  GridSpec l3{801, -5.0, 7.0, 4801, 161, 0.25};
  return {l1, l2, l3};
}

void apply_json_text(RunConfig& config, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(doc,
                 {"horizon", "variant", "seed", "workers", "out_dir", "grid", "levels",
                  "region", "approx_list", "tolerances", "duality", "verify"},
                 "config root");
  try {
    if (doc.contains("horizon")) {
      config.horizon.T = doc.at("horizon").get<double>();
      if (!(config.horizon.T > 0.0)) throw ConfigError("horizon must be > 0");
    }
    if (doc.contains("variant")) config.variant = parse_variant(doc.at("variant").get<std::string>());
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("workers")) config.workers = doc.at("workers").get<int>();
    if (doc.contains("out_dir")) config.out_dir = doc.at("out_dir").get<std::string>();
    if (doc.contains("grid")) config.grid = parse_grid(doc.at("grid"), "grid");
    if (doc.contains("levels")) {
      config.levels.clear();
      for (const auto& g : doc.at("levels")) config.levels.push_back(parse_grid(g, "levels[]"));
      if (config.levels.empty()) throw ConfigError("levels must not be empty");
    }
    if (doc.contains("region")) {
      const auto& r = doc.at("region");
      if (!r.is_array() || r.size() != 2) throw ConfigError("region must be [lo, hi]");
      config.region = {r[0].get<double>(), r[1].get<double>()};
      if (!(config.region.lo < config.region.hi)) throw ConfigError("region lo must be < hi");
    }
    if (doc.contains("approx_list")) {
      config.approx_list = doc.at("approx_list").get<std::vector<int>>();
      for (int n : config.approx_list)
        if (n < 1) throw ConfigError("approx_list entries must be >= 1");
    }
    if (doc.contains("tolerances")) {
      const auto& t = doc.at("tolerances");
      reject_unknown(t, {"duality_gap", "residual_interior", "residual_boundary"}, "tolerances");
      if (t.contains("duality_gap")) config.tol_duality = t.at("duality_gap").get<double>();
      if (t.contains("residual_interior"))
        config.verify.interior_tol = t.at("residual_interior").get<double>();
      if (t.contains("residual_boundary"))
        config.verify.boundary_tol = t.at("residual_boundary").get<double>();
    }
    if (doc.contains("duality")) {
      const auto& d = doc.at("duality");
      reject_unknown(d, {"battery_points", "p_nodes", "v_nodes", "p_max"}, "duality");
      if (d.contains("battery_points")) config.duality_battery = d.at("battery_points").get<int>();
      if (d.contains("p_nodes")) config.duality_p_nodes = d.at("p_nodes").get<int>();
      if (d.contains("v_nodes")) config.duality_v_nodes = d.at("v_nodes").get<int>();
      if (d.contains("p_max")) config.duality_p_max = d.at("p_max").get<double>();
    }
    if (doc.contains("verify")) {
      const auto& v = doc.at("verify");
      reject_unknown(v, {"interior_points", "boundary_points", "kink_points"}, "verify");
      if (v.contains("interior_points"))
        config.verify.interior_points = v.at("interior_points").get<int>();
      if (v.contains("boundary_points"))
        config.verify.boundary_points = v.at("boundary_points").get<int>();
      if (v.contains("kink_points")) config.verify.kink_points = v.at("kink_points").get<int>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  config.verify.seed = config.seed;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_json_text(config, buf.str());
  return config;
}

}  // namespace hjb::cli
