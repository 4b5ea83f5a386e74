#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjb/dp.hpp"
#include "hjb/subgradient.hpp"
#include "hjb/types.hpp"

namespace hjb::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run configuration: one JSON document, unknown keys rejected, command-line
// flags win over file values.
struct RunConfig {
  Horizon horizon{1.0};
  ModelVariant variant = ModelVariant::original();
  std::uint64_t seed = 20250810;
  int workers = 0;  // 0 = auto
  std::string out_dir = "out";

  GridSpec grid{};                 // single-grid commands (export-field)
  std::vector<GridSpec> levels{};  // refinement ladder for solve-dp
  Interval region{-1.0, 2.0};
  std::vector<int> approx_list{5, 10, 20, 40};

  double tol_duality = 1e-2;
  int duality_battery = 200;
  int duality_p_nodes = 1001;
  int duality_v_nodes = 4001;
  double duality_p_max = 5.0;

  VerifyPlan verify{};  // interior/boundary/kink point counts and tolerances

  RunConfig();
};

// Three refinement levels used by default (t x v): (201,1201,41),
// (401,2401,81), (801,4801,161) over x in [-5,7].
std::vector<GridSpec> default_levels();

RunConfig load_config(const std::string& path);
void apply_json_text(RunConfig& config, const std::string& json_text);

}  // namespace hjb::cli
