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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sfnr/csv.hpp"
#include "sfnr/ensembles.hpp"
#include "sfnr/prequential.hpp"
#include "sfnr/stream.hpp"

namespace sfnr {

/// Bad configuration: unknown key, malformed value, inconsistent settings.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class StreamKind { synthetic, yahoo, csv };

struct ExperimentConfig {
  std::string preset;

  StreamKind stream = StreamKind::synthetic;
  std::size_t dimension = 10;
  std::size_t length = 100000;
  std::vector<std::size_t> drift_times;
  std::vector<std::size_t> drift_widths;
  TargetKind target = TargetKind::unsigned_distance;
  std::string data_path;
  TargetColumn target_column = std::string("quality");

  std::string algorithm = "sfnr_adwin";
  std::string learner = "linear";
  double learning_rate = 0.01;
  std::size_t ema_window = 5;
  SfnrConfig sfnr;
  AddExpConfig addexp;
  // "auto": √d/2 for synthetic streams, running max otherwise.
  std::string error_scale = "auto";

  std::vector<std::uint64_t> seeds{1};
  std::size_t report_every = 1000;
  std::size_t window_size = 10000;
  std::string output;
  std::string drift_log;
  std::string snapshot_dir;
  bool timing = true;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    static const std::vector<std::string> kAlgorithms{"sfnr_period", "sfnr_adwin", "addexp", "single_learner", "ema"};
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algorithm) == kAlgorithms.end())
      throw ConfigError("unknown algorithm '" + algorithm + "'");
    if (learner != "linear" && learner != "ema" && learner != "mean") throw ConfigError("unknown learner '" + learner + "'");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (report_every == 0) throw ConfigError("report_every must be >= 1");
    if (window_size == 0) throw ConfigError("window_size must be >= 1");
    if (stream == StreamKind::synthetic) {
      if (dimension < 2) throw ConfigError("dimension must be >= 2");
      if (drift_times.size() != drift_widths.size())
        throw ConfigError("drift_times and drift_widths must have the same length");
      for (std::size_t i = 1; i < drift_times.size(); ++i)
        if (drift_times[i] <= drift_times[i - 1]) throw ConfigError("drift_times must be strictly increasing");
      for (auto w : drift_widths)
        if (w < 1) throw ConfigError("drift widths must be >= 1");
    } else if (data_path.empty()) {
      throw ConfigError("data_path is required for file streams");
    }
    try {
      if (algorithm == "sfnr_period" || algorithm == "sfnr_adwin") {
        SfnrConfig c = sfnr;
        c.mode = algorithm == "sfnr_period" ? SfnrMode::period : SfnrMode::adwin;
        c.validate();
      }
      if (algorithm == "addexp") addexp.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (error_scale != "auto" && error_scale != "running") {
      double v;
      if (!csv_detail::parse_double(error_scale, v) || !(v > 0.0))
        throw ConfigError("error_scale must be auto, running or a positive number");
    }
  }
};

struct ResultRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t instance_index = 0;
  double windowed_rmse = 0.0;
  std::size_t network_size = 0;
  std::size_t cumulative_drifts = 0;
  std::int64_t elapsed_ns = 0;

  bool operator==(const ResultRow&) const = default;
};

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

/// Built-in experiments. RHPR streams follow the rotating-hyperplane grid;
/// by default they are shrunk to 100k instances (window 10k), `full` gives
/// the original 1M-instance layout (window 100k).
inline std::vector<Preset> presets(bool full = false) {
  std::vector<Preset> out;
  struct Grid {
    const char* name;
    std::vector<std::size_t> times_full;
    std::size_t width;
  };
  const Grid grid[] = {{"rhpr-1", {500000}, 1},
                       {"rhpr-2", {500000}, 1000},
                       {"rhpr-3", {333333, 750000}, 1},
                       {"rhpr-4", {333333, 750000}, 1000}};
  for (const auto& g : grid) {
    ExperimentConfig c;
    c.preset = g.name;
    c.stream = StreamKind::synthetic;
    c.dimension = 10;
    c.length = full ? 1000000 : 100000;
    c.window_size = full ? 100000 : 10000;
    c.report_every = full ? 10000 : 1000;
    for (auto t : g.times_full) {
      c.drift_times.push_back(full ? t : t / 10);
      c.drift_widths.push_back(g.width);
    }
    std::ostringstream desc;
    desc << "drifts=" << g.times_full.size() << " t0=";
    for (std::size_t i = 0; i < g.times_full.size(); ++i) desc << (i ? "," : "") << g.times_full[i];
    desc << " W=" << g.width << " length=1000000 window=100000 | desk: t0=";
    for (std::size_t i = 0; i < g.times_full.size(); ++i) desc << (i ? "," : "") << g.times_full[i] / 10;
    desc << " length=100000 window=10000";
    out.push_back({g.name, desc.str(), c});
  }
  {
    ExperimentConfig c;
    c.preset = "wine";
    c.stream = StreamKind::csv;
    c.target_column = std::string("quality");
    c.learner = "linear";
    c.window_size = 100000;
    c.report_every = 100;
    out.push_back({"wine", "UCI wine quality (red or white) csv, target=quality; set data_path", c});
  }
  {
    ExperimentConfig c;
    c.preset = "ct-slices";
    c.stream = StreamKind::csv;
    c.target_column = std::string("reference");
    c.learner = "linear";
    c.window_size = 100000;
    c.report_every = 1000;
    out.push_back({"ct-slices", "UCI CT slice localization csv, target=reference; set data_path", c});
  }
  {
    ExperimentConfig c;
    c.preset = "stock";
    c.stream = StreamKind::yahoo;
    c.learner = "ema";
    c.ema_window = 5;
    c.window_size = 100000;
    c.report_every = 100;
    out.push_back({"stock", "daily quotes csv (Date,Open,High,Low,Close,Volume,Adj Close), EMA w=5; set data_path", c});
  }
  for (auto& p : out) {
    p.config.algorithm = "sfnr_adwin";
    p.config.sfnr.metric = CentralityMetric::eigenvector;
    p.config.sfnr.k_max = 10;
    p.config.sfnr.delta = 0.1;
    p.config.sfnr.period = 1000;
    p.config.sfnr.threshold = 0.08;
    p.description += " | sfnr: metric=eigenvector kmax=10 delta=0.1 p=1000 theta=0.08"
                     " | addexp: beta=0.5 gamma=0.1 tau=0.05 k=10";
  }
  return out;
}

inline ExperimentConfig preset_config(std::string_view name, bool full = false) {
  for (auto& p : presets(full))
    if (p.name == name) return p.config;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, '#' comments
// ---------------------------------------------------------------------------

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_uint(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out;
  if (!csv_detail::parse_double(v, out)) throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = v.find(',', start);
    out.push_back(parse_uint<T>(key, trim(std::string_view(v).substr(start, pos == std::string::npos ? pos : pos - start))));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace config_detail

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or
/// malformed values. `preset` replaces the whole configuration.
inline void apply_config_key(ExperimentConfig& c, const std::string& key, const std::string& value, bool full = false) {
  using namespace config_detail;
  const std::string& v = value;
  if (key == "preset") {
    c = preset_config(v, full);
  } else if (key == "stream") {
    if (v == "synthetic") c.stream = StreamKind::synthetic;
    else if (v == "yahoo") c.stream = StreamKind::yahoo;
    else if (v == "csv") c.stream = StreamKind::csv;
    else throw ConfigError("key 'stream': expected synthetic, yahoo or csv, got '" + v + "'");
  } else if (key == "dimension") {
    c.dimension = parse_uint<std::size_t>(key, v);
  } else if (key == "length") {
    c.length = parse_uint<std::size_t>(key, v);
  } else if (key == "drift_times") {
    c.drift_times = parse_list<std::size_t>(key, v);
  } else if (key == "drift_widths") {
    c.drift_widths = parse_list<std::size_t>(key, v);
  } else if (key == "target") {
    if (v == "unsigned") c.target = TargetKind::unsigned_distance;
    else if (v == "signed") c.target = TargetKind::signed_distance;
    else throw ConfigError("key 'target': expected unsigned or signed, got '" + v + "'");
  } else if (key == "data_path") {
    c.data_path = v;
  } else if (key == "target_column") {
    std::size_t idx;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), idx);
    if (ec == std::errc{} && ptr == v.data() + v.size())
      c.target_column = idx;
    else
      c.target_column = v;
  } else if (key == "algorithm") {
    c.algorithm = v;
  } else if (key == "learner") {
    c.learner = v;
  } else if (key == "learning_rate") {
    c.learning_rate = parse_real(key, v);
  } else if (key == "ema_window") {
    c.ema_window = parse_uint<std::size_t>(key, v);
  } else if (key == "metric") {
    try {
      c.sfnr.metric = parse_centrality_metric(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "kmax") {
    c.sfnr.k_max = parse_uint<std::size_t>(key, v);
  } else if (key == "edges_per_node") {
    c.sfnr.edges_per_node = parse_uint<std::size_t>(key, v);
  } else if (key == "period") {
    c.sfnr.period = parse_uint<std::size_t>(key, v);
  } else if (key == "threshold") {
    c.sfnr.threshold = parse_real(key, v);
  } else if (key == "delta") {
    c.sfnr.delta = parse_real(key, v);
  } else if (key == "buffer_size") {
    c.sfnr.buffer_size = parse_uint<std::size_t>(key, v);
  } else if (key == "check_interval") {
    c.sfnr.check_interval = parse_uint<std::size_t>(key, v);
  } else if (key == "adwin_capacity") {
    c.sfnr.adwin_capacity = parse_uint<std::size_t>(key, v);
  } else if (key == "error_window") {
    c.sfnr.error_window = parse_uint<std::size_t>(key, v);
  } else if (key == "error_scale") {
    c.error_scale = v;
  } else if (key == "warmup") {
    c.sfnr.warmup = c.addexp.warmup = parse_uint<std::size_t>(key, v);
  } else if (key == "addexp_beta") {
    c.addexp.beta = parse_real(key, v);
  } else if (key == "addexp_gamma") {
    c.addexp.gamma = parse_real(key, v);
  } else if (key == "addexp_tau") {
    c.addexp.tau = parse_real(key, v);
  } else if (key == "addexp_max_experts") {
    c.addexp.max_experts = parse_uint<std::size_t>(key, v);
  } else if (key == "seeds" || key == "seed") {
    c.seeds = parse_list<std::uint64_t>(key, v);
  } else if (key == "report_every") {
    c.report_every = parse_uint<std::size_t>(key, v);
  } else if (key == "window_size") {
    c.window_size = parse_uint<std::size_t>(key, v);
  } else if (key == "output") {
    c.output = v;
  } else if (key == "drift_log") {
    c.drift_log = v;
  } else if (key == "snapshot_dir") {
    c.snapshot_dir = v;
  } else if (key == "timing") {
    c.timing = parse_bool(key, v);
  } else if (key == "threads") {
    c.threads = parse_uint<std::size_t>(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Splits config text into ordered (key, value) pairs; `line N:` prefixes
/// syntax errors.
inline std::vector<std::pair<std::string, std::string>> parse_config_pairs(std::istream& in) {
  using config_detail::trim;
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

/// Parses a whole config. A `preset` line is applied first wherever it
/// appears, so other keys override it.
inline ExperimentConfig parse_config(std::istream& in, bool full = false) {
  const auto pairs = parse_config_pairs(in);
  ExperimentConfig c;
  for (const auto& [k, v] : pairs)
    if (k == "preset") apply_config_key(c, k, v, full);
  for (const auto& [k, v] : pairs)
    if (k != "preset") apply_config_key(c, k, v, full);
  return c;
}

inline ExperimentConfig parse_config(std::string_view text, bool full = false) {
  std::istringstream in{std::string(text)};
  return parse_config(in, full);
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

inline std::optional<double> resolved_error_range(const ExperimentConfig& c) {
  if (c.error_scale == "running") return std::nullopt;
  if (c.error_scale == "auto") {
    if (c.stream == StreamKind::synthetic) return std::sqrt(static_cast<double>(c.dimension)) / 2.0;
    return std::nullopt;
  }
  return config_detail::parse_real("error_scale", c.error_scale);
}

/// Builds the model named by `c.algorithm`; `seed` drives its internal RNG.
inline std::unique_ptr<OnlineModel> make_model(const ExperimentConfig& c, std::uint64_t seed) {
  auto proto = make_learner(c.learner, c.learning_rate, c.ema_window);
  const auto range = resolved_error_range(c);
  if (c.algorithm == "sfnr_period" || c.algorithm == "sfnr_adwin") {
    SfnrConfig sc = c.sfnr;
    sc.mode = c.algorithm == "sfnr_period" ? SfnrMode::period : SfnrMode::adwin;
    sc.error_range = range;
    return std::make_unique<Sfnr>(sc, std::move(proto), derive_seed(seed, 0x5F4E52));
  }
  if (c.algorithm == "addexp") {
    AddExpConfig ac = c.addexp;
    ac.error_range = range;
    return std::make_unique<AddExp>(ac, std::move(proto));
  }
  if (c.algorithm == "ema") return std::make_unique<SingleLearnerModel>(std::make_unique<EmaLearner>(c.ema_window), "ema");
  return std::make_unique<SingleLearnerModel>(std::move(proto));
}

inline std::vector<Instance> load_dataset(const ExperimentConfig& c) {
  std::ifstream in(c.data_path);
  if (!in) throw std::runtime_error("cannot read dataset '" + c.data_path + "'");
  try {
    if (c.stream == StreamKind::yahoo) return parse_yahoo_csv(in);
    return parse_regression_csv(in, c.target_column);
  } catch (const FormatError& e) {
    throw std::runtime_error(c.data_path + ": " + e.what());
  }
}

inline DriftStreamSpec synthetic_spec(const ExperimentConfig& c, std::uint64_t seed) {
  return make_drift_stream_spec(seed, c.dimension, c.length, c.drift_times, c.drift_widths, c.target);
}

/// Per-seed outputs beyond the result rows.
struct SeedRun {
  std::vector<ResultRow> rows;
  std::vector<DriftEvent> drifts;
};

/// Runs one seed test-then-train over `stream`.
inline SeedRun run_seed(const ExperimentConfig& c, std::uint64_t seed, InstanceStream& stream) {
  auto model = make_model(c, seed);
  std::string algorithm(model->name());
  auto* sfnr = dynamic_cast<Sfnr*>(model.get());
  if (sfnr && !c.snapshot_dir.empty()) {
    std::filesystem::create_directories(c.snapshot_dir);
    sfnr->on_evolve([&c, seed, algorithm](const Sfnr& m, const DriftEvent& ev) {
      const auto stem = std::filesystem::path(c.snapshot_dir) /
                        (algorithm + "_seed" + std::to_string(seed) + "_t" + std::to_string(ev.index));
      std::ofstream edges(stem.string() + ".edges"), nodes(stem.string() + ".nodes");
      write_edge_list(m.network(), edges);
      write_node_table(m.network(), nodes);
    });
  }

  PrequentialWindow window(c.window_size);
  SeedRun out;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::int64_t {
    if (!c.timing) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  };
  std::size_t seen = 0;
  double rmse = 0.0;
  while (auto inst = stream.next()) {
    const double pred = model->process(*inst);
    if (!std::isfinite(pred))
      throw std::runtime_error(algorithm + " produced a non-finite prediction at instance " +
                               std::to_string(inst->index) + " (seed " + std::to_string(seed) + ")");
    rmse = window.update(pred, inst->y);
    ++seen;
    if (seen % c.report_every == 0)
      out.rows.push_back({algorithm, seed, seen, rmse, model->network_size(), model->drift_count(), elapsed()});
  }
  if (seen % c.report_every != 0 || seen == 0)
    out.rows.push_back({algorithm, seed, seen, rmse, model->network_size(), model->drift_count(), elapsed()});
  if (sfnr) out.drifts = sfnr->drift_log();
  return out;
}

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::uint64_t, std::vector<DriftEvent>>> drifts;  // per seed, ascending
};

/// Runs every seed (concurrently when threads allow). Rows come back sorted
/// by seed, then instance index, independent of completion order.
inline ExperimentResult run_experiment_detailed(const ExperimentConfig& c) {
  c.validate();
  std::vector<Instance> dataset;
  if (c.stream != StreamKind::synthetic) dataset = load_dataset(c);

  std::vector<std::uint64_t> seeds = c.seeds;
  std::stable_sort(seeds.begin(), seeds.end());
  std::vector<SeedRun> runs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());

  auto work = [&](std::size_t i) {
    try {
      if (c.stream == StreamKind::synthetic) {
        DriftStreamGenerator gen(synthetic_spec(c, seeds[i]));
        runs[i] = run_seed(c, seeds[i], gen);
      } else {
        VectorStream vs(dataset);
        runs[i] = run_seed(c, seeds[i], vs);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  std::size_t threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, seeds.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    result.rows.insert(result.rows.end(), runs[i].rows.begin(), runs[i].rows.end());
    result.drifts.emplace_back(seeds[i], std::move(runs[i].drifts));
  }
  return result;
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& c) { return run_experiment_detailed(c).rows; }

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline constexpr std::string_view kResultHeader =
    "algorithm,seed,instance_index,windowed_rmse,network_size,cumulative_drifts,elapsed_ns";

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultHeader << '\n';
  for (const auto& r : rows)
    out << r.algorithm << ',' << r.seed << ',' << r.instance_index << ',' << format_double(r.windowed_rmse) << ','
        << r.network_size << ',' << r.cumulative_drifts << ',' << r.elapsed_ns << '\n';
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_results_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::vector<ResultRow> parse_results_csv(std::istream& in) {
  using namespace csv_detail;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) return {};
  ++lineno;
  if (trim(line) != kResultHeader) throw FormatError("unexpected results header", lineno);
  std::vector<ResultRow> rows;
  auto to_u = [&](std::string_view s, auto& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("bad integer '" + std::string(s) + "'", lineno);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw FormatError("expected 7 fields", lineno);
    ResultRow r;
    r.algorithm = std::string(cells[0]);
    to_u(cells[1], r.seed);
    to_u(cells[2], r.instance_index);
    if (!parse_double(cells[3], r.windowed_rmse)) throw FormatError("bad rmse '" + std::string(cells[3]) + "'", lineno);
    to_u(cells[4], r.network_size);
    to_u(cells[5], r.cumulative_drifts);
    to_u(cells[6], r.elapsed_ns);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Drift log rows: algorithm,seed,instance_index.
inline void write_drift_log(const std::string& algorithm, const ExperimentResult& result, std::ostream& out) {
  out << "algorithm,seed,instance_index\n";
  for (const auto& [seed, events] : result.drifts)
    for (const auto& ev : events) out << algorithm << ',' << seed << ',' << ev.index << '\n';
}

struct Summary {
  std::string algorithm;
  std::size_t seeds = 0;
  double mean_rmse = 0.0;
  double stdev_rmse = 0.0;
  double mean_elapsed_ms = 0.0;
};

/// Mean ± sample standard deviation of each seed's final windowed RMSE.
inline std::vector<Summary> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::map<std::uint64_t, ResultRow>> last;
  for (const auto& r : rows) {
    auto& slot = last[r.algorithm][r.seed];
    if (r.instance_index >= slot.instance_index) slot = r;
  }
  std::vector<Summary> out;
  for (const auto& [alg, by_seed] : last) {
    Summary s;
    s.algorithm = alg;
    s.seeds = by_seed.size();
    for (const auto& [_, r] : by_seed) {
      s.mean_rmse += r.windowed_rmse;
      s.mean_elapsed_ms += static_cast<double>(r.elapsed_ns) / 1e6;
    }
    s.mean_rmse /= static_cast<double>(s.seeds);
    s.mean_elapsed_ms /= static_cast<double>(s.seeds);
    if (s.seeds > 1) {
      double ss = 0.0;
      for (const auto& [_, r] : by_seed) ss += (r.windowed_rmse - s.mean_rmse) * (r.windowed_rmse - s.mean_rmse);
      s.stdev_rmse = std::sqrt(ss / static_cast<double>(s.seeds - 1));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace sfnr
