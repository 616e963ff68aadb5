#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <string>

#include "bocd/detector.hpp"
#include "bocd/eval.hpp"
#include "bocd/hyper_bound.hpp"
#include "bocd/io.hpp"
#include "bocd/oracle.hpp"
#include "bocd/run_config.hpp"
#include "bocd/sim_gen.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;

struct DetectOptions {
  std::string input;       // empty means stdin
  std::string config_path;
  std::string posterior_dump;
  std::string engine;
  std::string normalize;
  bool strict = false;
};

int run_detect(const DetectOptions& opt) {
  bocd::RunConfig cfg;
  try {
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      if (!in) {
        std::cerr << "error: cannot open config " << opt.config_path << "\n";
        return kExitConfigError;
      }
      json j = json::parse(in);
      cfg = bocd::run_config_from_json(j);
    }
    if (!opt.engine.empty()) {
      if (opt.engine == "bocd") {
        cfg.detector.engine = bocd::EngineKind::Bocd;
      } else if (opt.engine == "bocd-ar") {
        cfg.detector.engine = bocd::EngineKind::BocdAr;
      } else {
        std::cerr << "error: unknown engine " << opt.engine << "\n";
        return kExitConfigError;
      }
    }
    if (opt.strict) cfg.strict = true;
    if (!opt.normalize.empty()) {
      if (opt.normalize != "minmax") {
        std::cerr << "error: unknown normalization " << opt.normalize << "\n";
        return kExitConfigError;
      }
      if (!cfg.value_bounds) {
        std::cerr << "error: --normalize minmax needs bounds in the config\n";
        return kExitConfigError;
      }
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  cfg.warn(std::cerr);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (!opt.input.empty() && opt.input != "-") {
    file.open(opt.input);
    if (!file) {
      std::cerr << "error: cannot open " << opt.input << "\n";
      return kExitInputError;
    }
    in = &file;
  }
  std::ofstream dump;
  if (!opt.posterior_dump.empty()) {
    dump.open(opt.posterior_dump);
    if (!dump) {
      std::cerr << "error: cannot open " << opt.posterior_dump << "\n";
      return kExitInputError;
    }
  }

  const bool normalize = !opt.normalize.empty() && cfg.value_bounds;
  const int dim = cfg.detector.obs.feature_dim;
  const std::string engine = bocd::engine_name(cfg.detector.engine);
  bocd::Detector detector(cfg.detector);

  std::string line;
  bool first = true;
  std::int64_t last_time = INT64_MIN;
  while (std::getline(*in, line)) {
    if (line.empty()) continue;
    if (first && bocd::looks_like_header(line)) {
      first = false;
      continue;
    }
    first = false;
    bocd::CsvRow row;
    try {
      row = bocd::parse_csv_row(line, dim);
      if (row.time <= last_time) {
        throw std::invalid_argument("non-increasing time");
      }
    } catch (const std::exception& e) {
      if (cfg.strict) {
        std::cerr << "input error: " << e.what() << ": " << line << "\n";
        return kExitInputError;
      }
      json err;
      err["schema"] = "bocd-event/1";
      err["kind"] = "input_error";
      err["message"] = e.what();
      std::cerr << err.dump() << "\n";
      continue;
    }
    last_time = row.time;
    if (normalize) {
      const auto b = *cfg.value_bounds;
      row.value = (row.value - b.lo) / (b.hi - b.lo);
      for (std::size_t i = 0;
           i < row.features.size() && i < cfg.feature_bounds.size(); ++i) {
        const auto fb = cfg.feature_bounds[i];
        row.features[i] = (row.features[i] - fb.lo) / (fb.hi - fb.lo);
      }
    }
    const auto events = detector.process(row.time, row.value, row.features);
    for (const auto& ev : events) {
      std::cout << bocd::event_to_json(ev, engine).dump() << "\n";
    }
    std::cout.flush();
    if (dump.is_open()) {
      const auto rl = detector.run_length();
      json j;
      j["time"] = row.time;
      j["run_length_probs"] = rl.probs;
      dump << j.dump() << "\n";
    }
  }
  return kExitOk;
}

int run_simulate(std::uint64_t seed, int length, const std::string& out_path,
                 const std::string& truth_path) {
  bocd::PaperSimConfig cfg;
  if (length > 0) cfg.length = length;
  const auto series = bocd::generate_paper_series(cfg, seed);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return kExitInputError;
    }
    out = &file;
  }
  *out << "time,value\n";
  out->precision(17);
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    *out << (i + 1) << "," << series.values[i] << "\n";
  }
  if (!truth_path.empty()) {
    std::ofstream truth(truth_path);
    if (!truth) {
      std::cerr << "error: cannot open " << truth_path << "\n";
      return kExitInputError;
    }
    truth << bocd::ground_truth_to_json(series).dump(2) << "\n";
  }
  return kExitOk;
}

int run_bench(int n_series, const std::string& method, std::uint64_t seed0,
              const std::string& json_path, bool serial) {
  bocd::BenchmarkConfig cfg;
  cfg.n_series = n_series;
  cfg.seed0 = seed0;
  cfg.parallel = !serial;
  if (method == "bocd") {
    cfg.method = bocd::BenchMethod::Bocd;
  } else if (method == "bocd-ar") {
    cfg.method = bocd::BenchMethod::BocdAr;
  } else if (method == "bocpd") {
    cfg.method = bocd::BenchMethod::Bocpd;
  } else {
    std::cerr << "error: unknown method " << method << "\n";
    return kExitConfigError;
  }

  const auto res = bocd::run_benchmark(cfg);
  const auto& rep = res.report;
  auto print_kind = [&](const char* name, const bocd::KindMetrics& m) {
    std::printf("%-14s precision %.3f%s recall %.3f f1 %.3f fpr %.3f "
                "delay %.3f excess %.3f (tp %ld fp %ld fn %ld)\n",
                name, m.precision, m.precision_defined ? "" : "*", m.recall,
                m.f1, m.false_positive_rate, m.mean_delay,
                m.mean_excess_delay, m.tp, m.fp, m.fn);
  };
  std::printf("method %s over %d series\n", method.c_str(), rep.n_series);
  print_kind("anomalies", rep.anomalies);
  print_kind("change points", rep.change_points);
  std::printf("timing (s): likelihoods %.3f recursion %.3f anomaly %.3f "
              "change %.3f total %.3f\n",
              res.phases.likelihoods, res.phases.recursion,
              res.phases.anomaly_loop, res.phases.change_posterior,
              res.detect_seconds);

  if (!json_path.empty()) {
    json j;
    j["schema"] = "bocd-bench/1";
    j["method"] = method;
    j["n_series"] = rep.n_series;
    auto kind_json = [](const bocd::KindMetrics& m) {
      json k;
      k["precision"] = m.precision;
      k["precision_defined"] = m.precision_defined;
      k["recall"] = m.recall;
      k["f1"] = m.f1;
      k["false_positive_rate"] = m.false_positive_rate;
      k["mean_delay"] = m.mean_delay;
      k["mean_excess_delay"] = m.mean_excess_delay;
      k["tp"] = m.tp;
      k["fp"] = m.fp;
      k["fn"] = m.fn;
      return k;
    };
    j["anomalies"] = kind_json(rep.anomalies);
    j["change_points"] = kind_json(rep.change_points);
    j["timing"] = {{"likelihoods", res.phases.likelihoods},
                   {"recursion", res.phases.recursion},
                   {"anomaly_loop", res.phases.anomaly_loop},
                   {"change_posterior", res.phases.change_posterior},
                   {"total", res.detect_seconds}};
    std::ofstream out(json_path);
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

int run_bound(double p0, int dt, double lambda_a, double q0) {
  if (q0 > 0.0) {
    std::printf("spurious_alarm_rate = %.12f\n",
                bocd::spurious_alarm_rate(p0, q0, dt));
    std::printf("lambda_a_lower_bound = %.12f\n",
                bocd::lambda_a_lower_bound(p0, q0, dt));
  }
  std::printf("q0_upper_bound = %.12f\n",
              bocd::q0_upper_bound(p0, dt, lambda_a));
  return kExitOk;
}

int run_oracle(int len, std::uint64_t seed, double p0, double q0, int dt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y(len);
  for (auto& v : y) v = noise(rng);
  const auto tab = bocd::enumerate_joint(y, {p0, q0, dt}, {});
  json j;
  j["y"] = y;
  j["clean"] = tab.clean;
  j["total"] = tab.total;
  j["end_tab"] = tab.end_tab;
  j["cp_tab"] = tab.cp_tab;
  j["log_evidence"] = tab.log_evidence_paths;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online joint detection of collective anomalies and change "
               "points in fine-grained time series"};
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect = app.add_subcommand(
      "detect", "Stream CSV (time,value[,features...]) to event records");
  detect->add_option("--input,-i", det.input, "CSV path; '-' or absent reads stdin");
  detect->add_option("--config,-c", det.config_path, "JSON run configuration");
  detect->add_option("--engine", det.engine, "bocd or bocd-ar");
  detect->add_option("--posterior-dump", det.posterior_dump,
                     "write the per-step run-length posterior here");
  detect->add_option("--normalize", det.normalize,
                     "minmax (bounds from the config)");
  detect->add_flag("--strict", det.strict, "abort on malformed rows");

  std::uint64_t sim_seed = 1;
  int sim_length = 0;
  std::string sim_out, sim_truth;
  auto* simulate =
      app.add_subcommand("simulate", "Generate a benchmark series");
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--length", sim_length, "series length override");
  simulate->add_option("--out,-o", sim_out, "CSV output path (default stdout)");
  simulate->add_option("--truth", sim_truth, "ground-truth JSON sidecar path");

  int bench_series = 100;
  std::string bench_method = "bocd-ar";
  std::uint64_t bench_seed0 = 1;
  std::string bench_json;
  bool bench_serial = false;
  auto* bench = app.add_subcommand("bench", "Run the benchmark suite");
  bench->add_option("--series", bench_series, "number of series");
  bench->add_option("--engine", bench_method, "bocd, bocd-ar or bocpd");
  bench->add_option("--seed0", bench_seed0, "first seed");
  bench->add_option("--json", bench_json, "machine-readable output path");
  bench->add_flag("--serial", bench_serial, "disable parallelism");

  double bound_p0 = 0.01, bound_lambda = 0.5, bound_q0 = 0.0;
  int bound_dt = 4;
  auto* bound = app.add_subcommand(
      "bound", "Hyperparameter bounds from the spurious-alarm inequality");
  bound->add_option("--p0", bound_p0, "prior change probability");
  bound->add_option("--dt", bound_dt, "maximum anomaly duration");
  bound->add_option("--lambda-a", bound_lambda, "anomaly alert threshold");
  bound->add_option("--q0", bound_q0,
                    "also print the alarm rate and lambda_a bound for this q0");

  int oracle_len = 6;
  std::uint64_t oracle_seed = 1;
  double oracle_p0 = 0.1, oracle_q0 = 0.2;
  int oracle_dt = 2;
  auto* oracle = app.add_subcommand(
      "oracle", "Debug: exact enumeration tables for a random series");
  oracle->add_option("--len", oracle_len, "series length (<= 12)");
  oracle->add_option("--seed", oracle_seed, "RNG seed");
  oracle->add_option("--p0", oracle_p0, "prior change probability");
  oracle->add_option("--q0", oracle_q0, "anomaly-end probability");
  oracle->add_option("--dt", oracle_dt, "maximum anomaly duration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) return run_detect(det);
    if (simulate->parsed()) {
      return run_simulate(sim_seed, sim_length, sim_out, sim_truth);
    }
    if (bench->parsed()) {
      return run_bench(bench_series, bench_method, bench_seed0, bench_json,
                       bench_serial);
    }
    if (bound->parsed()) {
      return run_bound(bound_p0, bound_dt, bound_lambda, bound_q0);
    }
    if (oracle->parsed()) {
      return run_oracle(oracle_len, oracle_seed, oracle_p0, oracle_q0,
                        oracle_dt);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
