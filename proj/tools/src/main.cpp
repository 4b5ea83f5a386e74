#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "suites.hpp"

namespace {

// exit codes: 0 suite passed, 1 suite failed, 2 configuration/usage error
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using hjb::cli::RunConfig;
  using hjb::cli::SuiteResult;

  CLI::App app{"Numerical laboratory for a nonuniqueness example in Hamilton-Jacobi-Bellman "
               "equations: closed-form solution checks, Legendre-Fenchel duality, subgradient "
               "residuals, regularity probes and a semi-Lagrangian value-function solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> variant_flag;
  std::optional<double> horizon_flag;
  std::optional<std::string> out_flag;
  std::optional<int> workers_flag;
  std::optional<std::uint64_t> seed_flag;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--variant", variant_flag, "original | hat | approx:<n>");
  app.add_option("--horizon", horizon_flag, "time horizon T (> 0)");
  app.add_option("--out", out_flag, "output directory for CSV/JSON artifacts");
  app.add_option("--workers", workers_flag, "worker threads (0 = auto)");
  app.add_option("--seed", seed_flag, "seed for sampling plans");

  const std::map<std::string, std::function<SuiteResult(const RunConfig&)>> commands = {
      {"verify-duality", hjb::cli::cmd_verify_duality},
      {"verify-solutions", hjb::cli::cmd_verify_solutions},
      {"demo-nonuniqueness", hjb::cli::cmd_demo_nonuniqueness},
      {"solve-dp", hjb::cli::cmd_solve_dp},
      {"probe-lipschitz", hjb::cli::cmd_probe},
      {"approx-sequence", hjb::cli::cmd_approx_sequence},
      {"export-field", hjb::cli::cmd_export_field},
  };
  const std::map<std::string, std::string> descriptions = {
      {"verify-duality", "Legendre-Fenchel conjugacy between H and L on a point battery"},
      {"verify-solutions", "subgradient residual classification for the closed-form solutions"},
      {"demo-nonuniqueness", "both solutions verify, same terminal data, positive gap"},
      {"solve-dp", "semi-Lagrangian value iteration vs the closed-form value function"},
      {"probe-lipschitz", "Lipschitz/Loewen-Rockafellar regularity scans"},
      {"approx-sequence", "monotone convergence of the approximating value functions"},
      {"export-field", "solve one grid and export the value field as CSV"},
  };
  for (const auto& [name, desc] : descriptions)
    app.add_subcommand(name, desc)->fallthrough();  // global flags after the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig config =
        config_path.empty() ? RunConfig{} : hjb::cli::load_config(config_path);
    if (variant_flag) config.variant = hjb::parse_variant(*variant_flag);
    if (horizon_flag) {
      if (!(*horizon_flag > 0.0)) throw hjb::cli::ConfigError("--horizon must be > 0");
      config.horizon.T = *horizon_flag;
    }
    if (out_flag) config.out_dir = *out_flag;
    if (workers_flag) config.workers = *workers_flag;
    if (seed_flag) {
      config.seed = *seed_flag;
      config.verify.seed = *seed_flag;
    }

    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) {
        const SuiteResult result = fn(config);
        hjb::cli::write_summary(result, config.out_dir);
        return result.pass ? kExitPass : kExitFail;
      }
    }
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const hjb::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
