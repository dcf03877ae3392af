#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smoothq/errors.hpp"
#include "smoothq/experiments.hpp"
#include "smoothq/model_spec.hpp"

namespace smoothq {

/// Experiment configuration file: a JSON object mirroring MonteCarloConfig.
/// Recognized keys: model (spec string), n, replications, master_seed,
/// h_grid, z_values, tau_values, fixed_z, workers, prices_csv.
struct ExperimentConfig {
  MonteCarloConfig mc;
  bool has_seed = false;
  std::string prices_csv;
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  auto grid = [&](const char* key) {
    std::vector<double> out;
    if (j.contains(key)) {
      for (const auto& v : j.at(key)) out.push_back(v.get<double>());
    }
    return out;
  };
  try {
    if (j.contains("model")) cfg.mc.model = parse_model_spec(j.at("model").get<std::string>());
    if (j.contains("n")) cfg.mc.n = j.at("n").get<std::size_t>();
    if (j.contains("replications")) cfg.mc.replications = j.at("replications").get<std::size_t>();
    if (j.contains("master_seed")) {
      cfg.mc.master_seed = j.at("master_seed").get<std::uint64_t>();
      cfg.has_seed = true;
    }
    cfg.mc.h_grid = grid("h_grid");
    cfg.mc.z_values = grid("z_values");
    cfg.mc.tau_values = grid("tau_values");
    if (j.contains("fixed_z")) cfg.mc.fixed_z = j.at("fixed_z").get<double>();
    if (j.contains("workers")) cfg.mc.workers = j.at("workers").get<unsigned>();
    if (j.contains("prices_csv")) cfg.prices_csv = j.at("prices_csv").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad experiment config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("cannot parse config '") + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace smoothq
