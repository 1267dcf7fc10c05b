/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfnr/experiment.hpp"

namespace sfnr {

namespace cli_detail {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> length;
  std::optional<std::size_t> window_size;
  std::optional<std::string> metric;
  std::optional<double> delta;
  std::optional<std::size_t> kmax;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
  bool full = false;
  bool deterministic = false;

  void register_on(CLI::App& cmd) {
    cmd.add_option("--seed", seed, "Run a single seed");
    cmd.add_option("--length", length, "Stream length (synthetic)");
    cmd.add_option("--window-size", window_size, "Prequential window size");
    cmd.add_option("--metric", metric, "Centrality metric: degree|betweenness|closeness|eigenvector|pagerank");
    cmd.add_option("--delta", delta, "ADWIN confidence");
    cmd.add_option("--kmax", kmax, "Maximum network size");
    cmd.add_option("--out", out, "Output CSV path (default: stdout)");
    cmd.add_option("--threads", threads, "Worker threads for seeds (0 = all cores)");
    cmd.add_option("--set", sets, "Override any config key: key=value (repeatable)");
    cmd.add_flag("--full", full, "Use full-scale preset sizes");
    cmd.add_flag("--deterministic", deterministic, "Write 0 in elapsed_ns so reruns are byte-identical");
  }

  void apply(ExperimentConfig& c) const {
    if (seed) c.seeds = {*seed};
    if (length) c.length = *length;
    if (window_size) c.window_size = *window_size;
    if (metric) apply_config_key(c, "metric", *metric);
    if (delta) c.sfnr.delta = *delta;
    if (kmax) c.sfnr.k_max = *kmax;
    if (out) c.output = *out;
    if (threads) c.threads = *threads;
    if (deterministic) c.timing = false;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_config_key(c, config_detail::trim(kv.substr(0, eq)), config_detail::trim(kv.substr(eq + 1)), full);
    }
  }
};

inline void print_presets(std::ostream& out, bool full) {
  for (const auto& p : presets(full)) out << p.name << ": " << p.description << '\n';
}

inline int do_run(const std::string& config_path, const Overrides& ov, std::ostream& out, std::ostream& err) {
  std::ifstream in(config_path);
  if (!in) {
    err << "error: cannot read config '" << config_path << "'\n";
    return 1;
  }
  ExperimentConfig c = parse_config(in, ov.full);
  ov.apply(c);
  c.validate();
  const auto result = run_experiment_detailed(c);
  if (c.output.empty())
    write_results_csv(result.rows, out);
  else
    emit_csv(result.rows, c.output);
  if (!c.drift_log.empty()) {
    std::ofstream log(c.drift_log);
    if (!log) throw std::runtime_error("cannot open '" + c.drift_log + "' for writing");
    const std::string algorithm = result.rows.empty() ? c.algorithm : result.rows.front().algorithm;
    write_drift_log(algorithm, result, log);
  }
  return 0;
}

inline int do_gen(const std::string& preset, const std::string& config_path, const Overrides& ov, std::ostream& out) {
  ExperimentConfig c;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config '" + config_path + "'");
    c = parse_config(in, ov.full);
  } else {
    c = preset_config(preset, ov.full);
  }
  ov.apply(c);
  c.validate();
  if (c.stream != StreamKind::synthetic) throw ConfigError("gen only supports synthetic streams");
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty()) {
    file.open(c.output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + c.output + "' for writing");
    sink = &file;
  }
  DriftStreamGenerator gen(synthetic_spec(c, c.seeds.front()));
  for (std::size_t i = 0; i < c.dimension; ++i) *sink << 'x' << (i + 1) << ',';
  *sink << "y,concept\n";
  while (auto inst = gen.next()) {
    for (double v : inst->x) *sink << format_double(v) << ',';
    *sink << format_double(inst->y) << ',' << gen.last_concept() << '\n';
  }
  if (!*sink) throw std::runtime_error("write failed");
  return 0;
}

inline int do_summarize(const std::string& path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read results '" + path + "'");
  const auto rows = parse_results_csv(in);
  out << "algorithm,seeds,final_rmse_mean,final_rmse_stdev,elapsed_ms_mean\n";
  for (const auto& s : summarize(rows))
    out << s.algorithm << ',' << s.seeds << ',' << format_double(s.mean_rmse) << ',' << format_double(s.stdev_rmse)
        << ',' << format_double(s.mean_elapsed_ms) << '\n';
  return 0;
}

}  // namespace cli_detail

/// Command-line entry point. Exit codes: 0 success, 1 usage error,
/// 2 runtime failure.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  using namespace cli_detail;
  std::ostringstream preset_help;
  print_presets(preset_help, false);
  CLI::App app{"Scale-free network regression ensembles over drifting streams.\n\nPresets:\n" + preset_help.str(),
               "sfnr"};
  app.require_subcommand(1);

  Overrides run_ov, gen_ov;
  std::string config_path, gen_preset = "rhpr-1", gen_config, results_path;
  bool list_full = false;

  auto* run = app.add_subcommand("run", "Execute an experiment config file");
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run_ov.register_on(*run);

  auto* gen = app.add_subcommand("gen", "Emit a synthetic stream as CSV");
  gen->add_option("--preset", gen_preset, "Stream preset (rhpr-1..rhpr-4)");
  gen->add_option("--config", gen_config, "Take the stream from a config file instead");
  gen_ov.register_on(*gen);

  auto* list = app.add_subcommand("list-presets", "Print built-in presets");
  list->add_flag("--full", list_full, "Show full-scale sizes");

  auto* summ = app.add_subcommand("summarize", "Mean and stdev of final RMSE per algorithm");
  summ->add_option("results", results_path, "Results CSV from `run`")->required();

  std::vector<std::string> argv_store;
  argv_store.push_back("sfnr");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (*run) return do_run(config_path, run_ov, out, err);
    if (*gen) return do_gen(gen_preset, gen_config, gen_ov, out);
    if (*list) {
      print_presets(out, list_full);
      return 0;
    }
    if (*summ) return do_summarize(results_path, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace sfnr
