#pragma once
// Command-line front end: solve | path | bench | rip.
//
// All subcommands share one flat option set (mirrored 1:1 by the key=value
// config file read through --config); command-line flags override file values.
// Exit codes: 0 success, 1 usage/config error, 2 selection failure, 3 budget
// exceeded.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdasc/bench.hpp"
#include "pdasc/continuation.hpp"
#include "pdasc/csv.hpp"
#include "pdasc/errors.hpp"
#include "pdasc/rip.hpp"

namespace pdasc {

struct CliConfig {
  // problem
  std::string ensemble = "gaussian";
  int n = 0;  // 0 = unset; required by every subcommand except bench --preset
  int p = 0;
  int T = 0;
  std::optional<double> dyna;  // unset -> 1.0 (custom) or 1e2 (standard preset)
  double sigma = 0.0;
  std::uint64_t seed = 0;
  // solver
  std::optional<double> lambda_max;
  std::optional<double> lambda_min;
  int N = 100;
  std::optional<double> rho;
  int J = 1;
  std::string rule = "bic";
  std::optional<double> epsilon;
  double eta = 0.5;
  int cg_iters = 2;
  // bench
  int replications = 10;
  std::string preset;
  // output
  std::string out;
  bool timing = false;
  bool verbose = false;
  std::string config_file;
};

namespace detail {

inline Ensemble parse_ensemble(const std::string& s) {
  if (s == "gaussian") return Ensemble::gaussian;
  if (s == "bernoulli") return Ensemble::bernoulli;
  if (s == "partial_dct") return Ensemble::partial_dct;
  throw ConfigError("ensemble: must be gaussian, bernoulli, or partial_dct (got '" + s + "')");
}

inline SelectionRule parse_rule(const std::string& s) {
  if (s == "mdp") return SelectionRule::mdp;
  if (s == "dp") return SelectionRule::dp;
  if (s == "bic") return SelectionRule::bic;
  if (s == "cap") return SelectionRule::active_set_cap;
  throw ConfigError("rule: must be mdp, dp, bic, or cap (got '" + s + "')");
}

inline ContinuationConfig solver_config(const CliConfig& c) {
  ContinuationConfig cfg;
  cfg.lambda_max = c.lambda_max;
  cfg.lambda_min = c.lambda_min;
  cfg.grid_size = c.N;
  cfg.rho = c.rho;
  cfg.max_inner_iterations = c.J;
  cfg.rule = parse_rule(c.rule);
  cfg.epsilon = c.epsilon;
  cfg.eta = c.eta;
  cfg.restricted.cg_iterations = c.cg_iters;
  return cfg;
}

inline void require_problem_dims(const CliConfig& c) {
  if (c.n <= 0) throw ConfigError("n: required (positive row count)");
  if (c.p <= 0) throw ConfigError("p: required (positive column count)");
  if (c.T <= 0) throw ConfigError("T: required (positive sparsity level)");
}

inline ExperimentSpec experiment_spec(const CliConfig& c, int replications) {
  require_problem_dims(c);
  ExperimentSpec spec;
  spec.ensemble = parse_ensemble(c.ensemble);
  spec.n = c.n;
  spec.p = c.p;
  spec.T = c.T;
  spec.dyna = c.dyna.value_or(1.0);
  spec.sigma = c.sigma;
  spec.seed = c.seed;
  spec.rule = parse_rule(c.rule);
  spec.replications = replications;
  spec.epsilon_override = c.epsilon;
  spec.solver = solver_config(c);
  return spec;
}

inline void echo_config(const CliConfig& c, std::ostream& err) {
  err << "ensemble=" << c.ensemble << " n=" << c.n << " p=" << c.p << " T=" << c.T
      << " dyna=" << c.dyna.value_or(1.0) << " sigma=" << c.sigma << " seed=" << c.seed
      << " rule=" << c.rule << " N=" << c.N << " J=" << c.J << " eta=" << c.eta
      << " cg_iters=" << c.cg_iters << "\n";
}

struct BenchSetting {
  std::string name;
  Ensemble ensemble;
  int n, p, T;
  double sigma;
};

inline std::vector<BenchSetting> standard_settings() {
  return {
      {"dct512x2048_T32_sigma0.0001", Ensemble::partial_dct, 512, 2048, 32, 1e-4},
      {"dct512x2048_T64_sigma0.01", Ensemble::partial_dct, 512, 2048, 64, 1e-2},
      {"dct512x2048_T80_sigma0.05", Ensemble::partial_dct, 512, 2048, 80, 5e-2},
      {"gauss256x1024_T16_sigma0.0001", Ensemble::gaussian, 256, 1024, 16, 1e-4},
      {"gauss256x1024_T32_sigma0.01", Ensemble::gaussian, 256, 1024, 32, 1e-2},
      {"gauss256x1024_T40_sigma0.05", Ensemble::gaussian, 256, 1024, 40, 5e-2},
      {"bern200x1000_T10_sigma0.001", Ensemble::bernoulli, 200, 1000, 10, 1e-3},
      {"bern200x1000_T25_sigma0.01", Ensemble::bernoulli, 200, 1000, 25, 1e-2},
      {"bern200x1000_T40_sigma0.1", Ensemble::bernoulli, 200, 1000, 40, 1e-1},
  };
}

}  // namespace detail

// solve: one instance end to end; single CSV row for the selected solution.
inline int cmd_solve(const CliConfig& c, std::ostream& os) {
  ExperimentSpec spec = detail::experiment_spec(c, 1);
  ExperimentResult res = run_experiment(spec);
  const MetricsRow& row = res.rows.at(0);
  os << "lambda_hat,active_size,l2_re,linf_ae,l2_dre,linf_dae,set_extra,set_missed,psnr,"
        "time_seconds\n";
  if (row.failed) {
    os << "F,F,F,F,F,F,F,F,F,F\n";
    return 2;
  }
  long active_size = std::lround(row.set_extra + static_cast<double>(spec.T) - row.set_missed);
  os << csv_number(row.lambda_hat) << "," << active_size << "," << csv_number(row.l2_re) << ","
     << csv_number(row.linf_ae) << "," << csv_number(row.l2_dre) << ","
     << csv_number(row.linf_dae) << "," << csv_number(row.set_extra) << ","
     << csv_number(row.set_missed) << "," << csv_number(row.psnr) << ","
     << (c.timing ? csv_number(row.time_seconds) : std::string("0")) << "\n";
  return 0;
}

// path: full continuation trace, one CSV row per grid step.
inline int cmd_path(const CliConfig& c, std::ostream& os) {
  detail::require_problem_dims(c);
  std::uint64_t rep_seed = c.seed ^ 0ULL;
  Vector x_true = gen_sparse_signal(c.p, c.T, c.dyna.value_or(1.0), SplitMix64::derive(rep_seed, 1));
  SensingOperator op =
      gen_sensing_matrix(detail::parse_ensemble(c.ensemble), c.n, c.p, SplitMix64::derive(rep_seed, 2));
  Vector y_clean = op.apply(x_true);
  auto [y, realized_noise] = add_noise(y_clean, c.sigma, SplitMix64::derive(rep_seed, 3));
  ContinuationConfig cfg = detail::solver_config(c);
  SelectionRule rule = cfg.rule;
  if ((rule == SelectionRule::mdp || rule == SelectionRule::dp) && !cfg.epsilon)
    cfg.epsilon = c.sigma > 0 ? realized_noise : 1e-10;
  SolutionPath path = pdasc_solve(op, y, cfg);
  write_path_csv(path, os);
  return path.selected ? 0 : 2;
}

// bench: run_experiment per (setting x rule), one aggregate row each.
inline int cmd_bench(const CliConfig& c, std::ostream& os) {
  std::vector<detail::BenchSetting> settings;
  if (!c.preset.empty()) {
    if (c.preset != "standard") throw ConfigError("preset: unknown preset '" + c.preset + "'");
    settings = detail::standard_settings();
  } else {
    detail::require_problem_dims(c);
    settings.push_back({"custom", detail::parse_ensemble(c.ensemble), c.n, c.p, c.T, c.sigma});
  }
  double dyna = c.dyna.value_or(c.preset.empty() ? 1.0 : 1e2);
  os << bench_table_header();
  for (const auto& st : settings) {
    for (SelectionRule rule :
         {SelectionRule::mdp, SelectionRule::bic, SelectionRule::dp}) {
      ExperimentSpec spec;
      spec.ensemble = st.ensemble;
      spec.n = st.n;
      spec.p = st.p;
      spec.T = st.T;
      spec.dyna = dyna;
      spec.sigma = st.sigma;
      spec.seed = c.seed;
      spec.rule = rule;
      spec.replications = c.replications;
      spec.epsilon_override = c.epsilon;
      spec.solver = detail::solver_config(c);
      spec.solver.rule = rule;
      ExperimentResult res = run_experiment(spec);
      write_bench_table_row(os, st.name, to_string(rule), res, spec.replications, c.timing);
    }
  }
  return 0;
}

// rip: brute-force restricted isometry constants delta_k for k = 1..T+1,
// against the sufficient-condition bound 1/(4*sqrt(T)+1).
inline int cmd_rip(const CliConfig& c, std::ostream& os) {
  detail::require_problem_dims(c);
  SensingOperator op =
      gen_sensing_matrix(detail::parse_ensemble(c.ensemble), c.n, c.p, SplitMix64::derive(c.seed ^ 0ULL, 2));
  double bound = 1.0 / (4.0 * std::sqrt(static_cast<double>(c.T)) + 1.0);
  os << "k,delta_k,bound,holds\n";
  for (int k = 1; k <= c.T + 1; ++k) {
    double dk = rip_constant_bruteforce(op, k);
    os << k << "," << csv_number(dk) << "," << csv_number(bound) << ","
       << (dk <= bound ? 1 : 0) << "\n";
  }
  return 0;
}

namespace detail {

inline void add_common_options(CLI::App* sub, CliConfig& c) {
  sub->add_option("--config", c.config_file, "key=value configuration file (# comments allowed)");
  sub->add_option("--ensemble", c.ensemble, "gaussian | bernoulli | partial_dct");
  sub->add_option("--n", c.n, "rows of the sensing operator");
  sub->add_option("--p", c.p, "columns of the sensing operator");
  sub->add_option("--T", c.T, "true-signal sparsity level");
  sub->add_option("--dyna", c.dyna, "dynamic range of the true signal");
  sub->add_option("--sigma", c.sigma, "noise standard deviation");
  sub->add_option("--seed", c.seed, "base RNG seed");
  sub->add_option("--lambda-max", c.lambda_max, "grid start (default: linf norm of adjoint(y))");
  sub->add_option("--lambda-min", c.lambda_min, "grid floor (default: 1e-10 * lambda-max)");
  sub->add_option("--N", c.N, "number of grid intervals");
  sub->add_option("--rho", c.rho, "grid decay factor (overrides N)");
  sub->add_option("--J", c.J, "max inner iterations per grid value");
  sub->add_option("--rule", c.rule, "mdp | dp | bic | cap");
  sub->add_option("--epsilon", c.epsilon, "noise-level estimate for mdp/dp");
  sub->add_option("--eta", c.eta, "active-set cap fraction of n");
  sub->add_option("--cg-iters", c.cg_iters, "CG iterations for implicit operators");
  sub->add_option("--replications", c.replications, "bench replications per setting");
  sub->add_option("--preset", c.preset, "bench preset: standard");
  sub->add_option("--out", c.out, "CSV destination (default: standard output)");
  sub->add_flag("--timing", c.timing, "emit wall-clock times (off: print 0 for determinism)");
  sub->add_flag("--verbose", c.verbose, "echo resolved settings to standard error");
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file, # comments, blank lines allowed. Keys are the long
// option names (snake_case accepted as an alias of kebab-case); a key's last
// occurrence wins.
inline std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot read '" + file + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " of '" + file +
                        "' is not key=value: '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    for (char& ch : key)
      if (ch == '_') ch = '-';
    if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
    if (key == "config") throw ConfigError("config: nested config files are not allowed");
    bool replaced = false;
    for (auto& kv : pairs)
      if (kv.first == key) {
        kv.second = value;
        replaced = true;
      }
    if (!replaced) pairs.emplace_back(key, value);
  }
  return pairs;
}

// Command-line flags take precedence: a file pair is injected only when its
// flag is absent from the explicit arguments.
inline std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : load_config_file(file)) {
    std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    if (!given) merged.push_back(flag + "=" + value);
  }
  return merged;
}

}  // namespace detail

// Entry point shared by the binary and in-process tests. `args` excludes the
// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"sparse-recovery solver: primal-dual active set with continuation"};
  app.require_subcommand(1);
  CLI::App* solve = app.add_subcommand("solve", "solve one instance, print metrics row");
  CLI::App* path = app.add_subcommand("path", "trace the continuation path");
  CLI::App* bench = app.add_subcommand("bench", "benchmark table over settings x rules");
  CLI::App* rip = app.add_subcommand("rip", "brute-force restricted isometry constants");
  for (CLI::App* sub : {solve, path, bench, rip}) detail::add_common_options(sub, c);

  try {
    std::vector<std::string> merged = detail::merge_config_args(args);
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::ofstream file;
    std::ostream* os = &out;
    if (!c.out.empty()) {
      file.open(c.out, std::ios::binary);
      if (!file) throw ConfigError("out: cannot open '" + c.out + "' for writing");
      os = &file;
    }
    if (c.verbose) detail::echo_config(c, err);
    if (solve->parsed()) return cmd_solve(c, *os);
    if (path->parsed()) return cmd_path(c, *os);
    if (bench->parsed()) return cmd_bench(c, *os);
    return cmd_rip(c, *os);
  } catch (const SelectionFailedError& e) {
    err << "selection failed: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pdasc
