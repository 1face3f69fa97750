// Command-line front end: run, sweep, validate, dump-trace.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ensra/env.hpp"
#include "ensra/error.hpp"
#include "ensra/io.hpp"
#include "ensra/schedulers.hpp"
#include "ensra/sim.hpp"
#include "oracles/validate.hpp"

namespace {

using namespace ensra;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string algorithm;
  std::string output;
};

ParsedConfig load(const Common& c) {
  std::vector<std::string> ov = c.overrides;
  if (!c.algorithm.empty()) ov.push_back("algorithm=" + c.algorithm);
  return c.config.empty() ? parse_config_text("", ov) : parse_config(c.config, ov);
}

void emit(const std::vector<RunRow>& rows, const std::string& path) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, rows);
  } else {
    emit_csv(rows, path);
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("--values: '" + tok + "' is not a number");
    }
  }
  return out;
}

void add_common(CLI::App* app, Common& c, bool with_algorithm = true) {
  app->add_option("-c,--config", c.config, "YAML scenario file (defaults when omitted)");
  app->add_option("--set", c.overrides, "key=value override, repeatable");
  if (with_algorithm) {
    app->add_option("--algorithm", c.algorithm, "ensra, r_ensra, gp_ensra, p_ensra_exact or heuristic");
  }
  app->add_option("-o,--output", c.output, "output file (stdout when omitted)");
}

void set_log_level() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* v = std::getenv("ENSRA_LOG")) {
    spdlog::set_level(spdlog::level::from_str(v));
  }
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level();
  CLI::App app{"Energy-aware network selection and resource allocation simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::string series_path;
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration and print one CSV row");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--series", series_path, "also write the per-frame series here");

  Common sweep_opts;
  std::string axis;
  std::string values;
  int reps = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "simulate a grid of values along one axis");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "V, theta, W, mean_arrival or error_rate")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--reps", reps, "replications per value (seeds seed..seed+reps-1)");

  Common val_opts;
  std::string suite;
  auto* val_cmd = app.add_subcommand("validate", "run the oracle suites");
  add_common(val_cmd, val_opts, false);
  val_cmd->add_option("--suite", suite, "run one suite only");

  Common dump_opts;
  auto* dump_cmd = app.add_subcommand("dump-trace", "write the realized environment trace");
  add_common(dump_cmd, dump_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const ParsedConfig pc = load(run_opts);
      const Scenario sc = Scenario::make(pc.cfg, pc.topo);
      const EnvTrace trace = generate_trace(pc.cfg, sc.topo);
      RunOptions opts;
      opts.record_series = !series_path.empty();
      const RunMetrics m = run(sc, trace, pc.algorithm, opts);
      spdlog::info("avg power {:.4f} W, avg queue {:.4f} Mb, offload {:.1f}%", m.avg_power,
                   m.avg_queue_slot, 100 * m.offload_fraction);
      emit({make_row(0, pc.cfg, pc.algorithm, m)}, run_opts.output);
      if (!series_path.empty()) {
        std::ofstream out(series_path);
        if (!out) throw Error("cannot write '" + series_path + "'");
        write_series(out, m.series);
      }
    } else if (*sweep_cmd) {
      const ParsedConfig pc = load(sweep_opts);
      const auto rows = sweep(pc.cfg, pc.algorithm, parse_axis(axis), parse_values(values), reps);
      emit(rows, sweep_opts.output);
    } else if (*val_cmd) {
      const ParsedConfig pc = load(val_opts);
      std::vector<std::string> names = check::suite_names();
      if (!suite.empty()) names = {suite};
      std::ostringstream report;
      bool all = true;
      for (const auto& n : names) {
        const auto r = check::run_suite(n, pc.cfg);
        all = all && r.passed;
        report << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (" << r.detail << ")\n";
      }
      if (val_opts.output.empty()) {
        std::cout << report.str();
      } else {
        std::ofstream(val_opts.output) << report.str();
      }
      return all ? 0 : 1;
    } else if (*dump_cmd) {
      const ParsedConfig pc = load(dump_opts);
      const EnvTrace trace = generate_trace(pc.cfg, pc.topo);
      if (dump_opts.output.empty()) {
        write_trace(std::cout, trace);
      } else {
        std::ofstream out(dump_opts.output);
        if (!out) throw Error("cannot write '" + dump_opts.output + "'");
        write_trace(out, trace);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
