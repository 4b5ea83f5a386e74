#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hjb/conjugate.hpp"
#include "hjb/io.hpp"
#include "hjb/parallel.hpp"
#include "hjb/probes.hpp"
#include "hjb/random.hpp"

namespace hjb::cli {

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string out_path(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  return (std::filesystem::path(config.out_dir) / name).string();
}

std::string point_str(SpacetimePoint pt) {
  std::ostringstream os;
  os << "(" << pt.t << ", " << pt.x << ")";
  return os.str();
}

// Battery of probe points: generic, near-diagonal, and exact-diagonal.
std::vector<SpacetimePoint> spacetime_battery(int count, Horizon horizon, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SpacetimePoint> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = rng.uniform(0.0, horizon.T);
    if (i % 5 == 4) {
      pts.push_back({t, t});
    } else if (i % 5 == 3) {
      const double gap = std::pow(10.0, rng.uniform(-6.0, -1.0));
      pts.push_back({t, rng.uniform01() < 0.5 ? t - gap : t + gap});
    } else {
      pts.push_back({t, rng.uniform(-2.0, 2.0 + horizon.T)});
    }
  }
  return pts;
}

}  // namespace

SuiteResult cmd_verify_duality(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "verify-duality";

  const Grid1D p_grid(-config.duality_p_max, config.duality_p_max, config.duality_p_nodes);
  const Grid1D v_grid(-2.0, 2.0, config.duality_v_nodes);
  const auto battery = spacetime_battery(config.duality_battery, config.horizon, config.seed);

  std::vector<double> gaps(battery.size());
  parallel_for(battery.size(), config.workers, [&](std::size_t i) {
    try {
      gaps[i] =
          duality_gap(battery[i], p_grid, v_grid, config.variant, config.horizon).sup_abs_gap;
    } catch (const std::exception&) {
      // e.g. a v-grid without the node v=0 leaves no finite Lagrangian sample
      // at diagonal points: an unusable grid is a failed check, not a crash
      gaps[i] = std::numeric_limits<double>::infinity();
    }
  });
  double sup_d = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > sup_d) {
      sup_d = gaps[i];
      argmax = i;
    }
  }
  result.checks += battery.size();
  if (sup_d > config.tol_duality) {
    ++result.failures;
    result.witnesses.push_back("duality gap " + std::to_string(sup_d) + " at " +
                               point_str(battery[argmax]));
  }

  // biconjugate direction on a smaller off-diagonal battery
  const Grid1D v_probe(-1.9, 1.9, 77);
  const Grid1D p_window(-10.0, 10.0, 4001);
  double sup_b = 0.0;
  SpacetimePoint worst_b{};
  int used = 0;
  for (const auto& pt : battery) {
    if (std::abs(pt.t - pt.x) < 0.05 || used >= 40) continue;
    ++used;
    const auto rep = biconjugate_gap(pt, v_probe, p_window, config.variant, config.horizon);
    if (rep.sup_abs_gap > sup_b) {
      sup_b = rep.sup_abs_gap;
      worst_b = pt;
    }
  }
  result.checks += static_cast<std::size_t>(used);
  if (sup_b > config.tol_duality) {
    ++result.failures;
    result.witnesses.push_back("biconjugate gap " + std::to_string(sup_b) + " at " +
                               point_str(worst_b));
  }

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

namespace {

void report_failures(const std::vector<ResidualReport>& reports, SuiteResult& result,
                     const std::string& label) {
  result.checks += reports.size();
  for (const auto& r : reports) {
    if (!r.pass) {
      ++result.failures;
      if (result.witnesses.size() < 8)
        result.witnesses.push_back(label + ": " + format_residual_report(r));
    }
  }
}

}  // namespace

SuiteResult cmd_verify_solutions(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "verify-solutions";

  if (config.variant.kind() == ModelVariant::Kind::Original) {
    const auto ru = verify_lsc_solution(SolutionId::u(), config.variant, config.verify,
                                        config.horizon);
    const auto rv = verify_lsc_solution(SolutionId::v(), config.variant, config.verify,
                                        config.horizon);
    write_residual_reports(ru, out_path(config, "residuals_U.csv"));
    write_residual_reports(rv, out_path(config, "residuals_V.csv"));
    report_failures(ru, result, "U");
    report_failures(rv, result, "V");
  } else if (config.variant.kind() == ModelVariant::Kind::Approx) {
    const int n = config.variant.approx_n();
    const auto rn = verify_lsc_solution(SolutionId::vn(n), config.variant, config.verify,
                                        config.horizon);
    write_residual_reports(rn, out_path(config, "residuals_Vn.csv"));
    report_failures(rn, result, "V_" + std::to_string(n));
  } else {
    throw ConfigError(
        "verify-solutions: no closed-form solution is available for variant 'hat'");
  }

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cmd_demo_nonuniqueness(const RunConfig& config) {
  if (config.variant.kind() != ModelVariant::Kind::Original)
    throw ConfigError("demo-nonuniqueness: the nonuniqueness example lives in variant 'original'");
  Timer timer;
  SuiteResult result;
  result.suite = "demo-nonuniqueness";
  const double T = config.horizon.T;

  const auto ru =
      verify_lsc_solution(SolutionId::u(), config.variant, config.verify, config.horizon);
  const auto rv =
      verify_lsc_solution(SolutionId::v(), config.variant, config.verify, config.horizon);
  report_failures(ru, result, "U");
  report_failures(rv, result, "V");

  // identical terminal slices, bit-exact
  double terminal_diff = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -2.0 - T + (4.0 + 2.0 * T) * i / 1000.0;
    terminal_diff = std::max(terminal_diff,
                             std::abs(eval_solution_U({T, x}, config.horizon) -
                                      eval_solution_V({T, x}, config.horizon)));
    terminal_diff = std::max(terminal_diff, std::abs(eval_solution_U({T, x}, config.horizon) -
                                                     eval_terminal_g(x, config.horizon)));
  }
  ++result.checks;
  if (terminal_diff != 0.0) {
    ++result.failures;
    result.witnesses.push_back("terminal slices differ by " + std::to_string(terminal_diff));
  }

  // gap table on the strip: U - V = exp(-2 sqrt(t-x)) there
  std::ofstream gap_csv(out_path(config, "nonuniqueness_gap.csv"));
  gap_csv << "t,x,gap\n";
  for (int k = 1; k <= 9; ++k) {
    const double t = T * k / 10.0;
    for (double alpha : {0.25, 0.5, 0.75}) {
      const double x = (2.0 * t - T) + alpha * (T - t);
      const double gap =
          eval_solution_U({t, x}, config.horizon) - eval_solution_V({t, x}, config.horizon);
      gap_csv << format_double(t) << ',' << format_double(x) << ',' << format_double(gap)
              << '\n';
      ++result.checks;
      if (std::abs(gap - std::exp(-2.0 * std::sqrt(t - x))) > 1e-12) {
        ++result.failures;
        result.witnesses.push_back("strip gap mismatch at " + point_str({t, x}));
      }
    }
  }
  const double witness_gap = eval_solution_U({T / 2.0, T / 4.0}, config.horizon) -
                             eval_solution_V({T / 2.0, T / 4.0}, config.horizon);
  result.witnesses.push_back("U-V at (T/2, T/4) = " + format_double(witness_gap));
  ++result.checks;
  if (std::abs(witness_gap - std::exp(-2.0 * std::sqrt(T / 4.0))) > 1e-12) {
    ++result.failures;
    result.witnesses.push_back("witness gap off exp(-2 sqrt(T/4))");
  }

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cmd_solve_dp(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "solve-dp";

  ReferenceSolution ref = ReferenceSolution::v();
  double finest_bound = 0.05;
  if (config.variant.kind() == ModelVariant::Kind::Approx) {
    ref = ReferenceSolution::vn(config.variant.approx_n());
    finest_bound = 0.02;
  } else if (config.variant.kind() == ModelVariant::Kind::Hat) {
    throw ConfigError("solve-dp: no closed-form reference solution for variant 'hat'");
  }

  const auto table = convergence_study(config.levels, config.variant, ref, config.horizon,
                                       config.region, config.workers);
  write_error_table_csv(table, out_path(config, "dp_errors_" + config.variant.name() + ".csv"));

  result.checks = table.size();
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].sup_err < table[i - 1].sup_err)) {
      ++result.failures;
      result.witnesses.push_back("sup error not decreasing at level " +
                                 std::to_string(table[i].level));
    }
  }
  if (!table.empty() && table.back().sup_err > finest_bound) {
    ++result.failures;
    result.witnesses.push_back("finest sup error " + std::to_string(table.back().sup_err) +
                               " above " + std::to_string(finest_bound));
  }
  for (const auto& row : table)
    result.witnesses.push_back("level " + std::to_string(row.level) + ": sup " +
                               format_double(row.sup_err) + ", mean " +
                               format_double(row.mean_err));

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cmd_probe(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "probe-lipschitz";
  const double T = config.horizon.T;

  // local Lipschitz constants
  if (config.variant.kind() == ModelVariant::Kind::Original) {
    const BoxSpec case1{T / 2.0, T / 2.0, 0.0, 1.0 / (2.0 * std::exp(4.0))};
    const double k0 = llc_constant(case1, 512, config.variant, config.horizon, config.seed);
    ++result.checks;
    if (k0 != 0.0) {
      ++result.failures;
      result.witnesses.push_back("H not identically 0 on the diagonal box: k = " +
                                 std::to_string(k0));
    }
  }
  const BoxSpec boxes[] = {{0.75 * T, 0.25 * T, 1.0, 0.05},
                           {0.3 * T, 0.8, 2.0, 0.05},
                           {0.6 * T, -0.4, 0.5, 0.05}};
  for (const auto& box : boxes) {
    const double k1 = llc_constant(box, 512, config.variant, config.horizon, config.seed);
    const double k2 = llc_constant(box, 1024, config.variant, config.horizon, config.seed + 1);
    ++result.checks;
    if (!std::isfinite(k1) || std::abs(k2 - k1) > 0.10 * std::max(k1, k2)) {
      ++result.failures;
      result.witnesses.push_back("llc estimate unstable on box at " +
                                 point_str({box.t0, box.x0}));
    }
  }

  // (1+|p|)-weighted scan at a diagonal anchor
  std::vector<double> ladder;
  for (double h = 1e-2; h >= 1e-8 * 0.999; h /= 10.0) ladder.push_back(h);
  const auto slc = slc_ratio_scan({T / 2.0, T / 2.0}, ladder, config.variant, config.horizon);
  write_ratio_scan_csv(slc, out_path(config, "slc_scan_" + config.variant.name() + ".csv"));
  const bool expect_diverge = config.variant.kind() != ModelVariant::Kind::Approx;
  ++result.checks;
  if (slc.diverges != expect_diverge) {
    ++result.failures;
    result.witnesses.push_back("slc verdict unexpected: diverges=" +
                               std::to_string(slc.diverges));
  } else {
    result.witnesses.push_back(expect_diverge
                                   ? "slc exponent " + format_double(slc.fitted_exponent)
                                   : "slc bounded, sup " + format_double(slc.sup_ratio));
  }

  // Loewen-Rockafellar bound scans (closed-form subgradients)
  std::vector<double> u_ladder;
  for (double u = 1e-2; u >= 1e-6 * 0.999; u /= std::sqrt(10.0)) u_ladder.push_back(u);
  const auto c6o = cond6_ratio_scan(u_ladder, TightVariant::Original, config.horizon);
  write_ratio_scan_csv(c6o, out_path(config, "cond6_original.csv"));
  ++result.checks;
  if (!c6o.diverges || std::abs(c6o.fitted_exponent + 0.5) > 0.05) {
    ++result.failures;
    result.witnesses.push_back("condition-(6) scan (original) exponent " +
                               format_double(c6o.fitted_exponent));
  }
  const auto c6h = cond6_ratio_scan(u_ladder, TightVariant::Hat, config.horizon);
  write_ratio_scan_csv(c6h, out_path(config, "cond6_hat.csv"));
  ++result.checks;
  if (c6h.diverges) {
    ++result.failures;
    result.witnesses.push_back("condition-(6) scan (hat) unexpectedly diverges");
  } else {
    result.witnesses.push_back("condition-(6) scan (hat) bounded, sup " +
                               format_double(c6h.sup_ratio));
  }

  // modulus transport batteries
  Rng rng(config.seed ^ 0x5eedull);
  std::vector<PointPair> pairs;
  for (int i = 0; i < 2000; ++i)
    pairs.push_back({{rng.uniform(0, T), rng.uniform(-1.8, 1.8)},
                     {rng.uniform(0, T), rng.uniform(-1.8, 1.8)}});
  const double vs[] = {-1.7, -0.5, 0.0, 0.9, 2.0};
  for (const auto tv : {TightVariant::Original, TightVariant::Hat}) {
    const auto rep = modulus_condition_check(tv, pairs, vs, 2.0, config.horizon);
    result.checks += rep.checks;
    if (rep.violations > 0) {
      result.failures += static_cast<std::size_t>(rep.violations);
      result.witnesses.push_back("modulus violation near " + point_str(rep.worst_pair.a));
    }
  }

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cmd_approx_sequence(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "approx-sequence";
  const double T = config.horizon.T;

  std::vector<int> ns = config.approx_list;
  std::sort(ns.begin(), ns.end());
  if (ns.empty()) throw ConfigError("approx-sequence: approx_list is empty");
  const int n_max = ns.back();

  std::ofstream csv(out_path(config, "approx_sequence.csv"));
  csv << "n,t,x,Vn,V\n";
  for (double ft : {0.1, 0.3, 0.5, 0.7}) {
    for (double fg : {0.0, 0.02, 0.05, 0.08, 0.12}) {
      const double t = T * ft;
      const double x = t + 1.0 / n_max + T * fg;
      const double v = eval_solution_V({t, x}, config.horizon);
      double prev = -2.0;
      for (int n : ns) {
        const double vn = eval_Vn(n, {t, x}, config.horizon);
        csv << n << ',' << format_double(t) << ',' << format_double(x) << ','
            << format_double(vn) << ',' << format_double(v) << '\n';
        ++result.checks;
        if (vn < prev - 1e-12) {
          ++result.failures;
          result.witnesses.push_back("V_n not monotone at " + point_str({t, x}) +
                                     " n=" + std::to_string(n));
        }
        prev = vn;
      }
      ++result.checks;
      if (std::abs(prev - v) > 0.05) {
        ++result.failures;
        result.witnesses.push_back("V_" + std::to_string(n_max) + " off V by " +
                                   std::to_string(std::abs(prev - v)) + " at " +
                                   point_str({t, x}));
      }
    }
  }

  result.pass = result.failures == 0;
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cmd_export_field(const RunConfig& config) {
  Timer timer;
  SuiteResult result;
  result.suite = "export-field";
  const ValueField field =
      solve_dp(config.grid, config.variant, config.horizon, std::nullopt, config.workers);
  const std::string path = out_path(config, "field_" + config.variant.name() + ".csv");
  write_field_csv(field, path);
  result.witnesses.push_back("wrote " + path);
  result.checks = 1;
  result.pass = true;
  result.seconds = timer.seconds();
  return result;
}

void write_summary(const SuiteResult& result, const std::string& out_dir) {
  nlohmann::json doc;
  doc["suite"] = result.suite;
  doc["pass"] = result.pass;
  doc["witnesses"] = result.witnesses;
  doc["seconds"] = result.seconds;
  std::filesystem::create_directories(out_dir);
  std::ofstream out((std::filesystem::path(out_dir) / (result.suite + ".json")).string());
  out << doc.dump(2) << '\n';
  std::cout << doc.dump(2) << std::endl;
}

}  // namespace hjb::cli
