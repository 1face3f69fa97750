#include "ensra/io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ensra/error.hpp"

namespace ensra {

namespace {

template <class T>
T as(const YAML::Node& n, const std::string& key, const char* kind) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + " expects " + kind);
  }
}

using Setter = std::function<void(SystemConfig&, Algorithm&, const YAML::Node&, const std::string&)>;

template <class T>
Setter field(T SystemConfig::*member, const char* kind) {
  return [member, kind](SystemConfig& c, Algorithm&, const YAML::Node& n, const std::string& k) {
    c.*member = as<T>(n, k, kind);
  };
}

template <class S, class T>
Setter nested(S SystemConfig::*section, T S::*member, const char* kind) {
  return [section, member, kind](SystemConfig& c, Algorithm&, const YAML::Node& n,
                                 const std::string& k) { (c.*section).*member = as<T>(n, k, kind); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const char* kInt = "an integer";
    const char* kNum = "a number";
    t["num_users"] = field(&SystemConfig::num_users, kInt);
    t["num_wifi"] = field(&SystemConfig::num_wifi, kInt);
    t["num_locations"] = field(&SystemConfig::num_locations, kInt);
    t["num_subchannels"] = field(&SystemConfig::num_subchannels, kInt);
    t["frame_len"] = field(&SystemConfig::frame_len, kInt);
    t["window"] = field(&SystemConfig::window, kInt);
    t["slot_dt"] = field(&SystemConfig::slot_dt, kNum);
    t["V"] = field(&SystemConfig::V, kNum);
    t["theta"] = field(&SystemConfig::theta, kNum);
    t["p_max_cell"] = field(&SystemConfig::p_max_cell, kNum);
    t["bandwidth"] = field(&SystemConfig::bandwidth_mhz, kNum);
    t["noise_psd"] = field(&SystemConfig::noise_psd, kNum);
    t["kappa"] = field(&SystemConfig::kappa, kNum);
    t["mean_arrival"] = field(&SystemConfig::mean_arrival, kNum);
    t["num_frames"] = field(&SystemConfig::num_frames, kInt);
    t["seed"] = field(&SystemConfig::seed, "a non-negative integer");
    t["prediction_error"] = field(&SystemConfig::prediction_error, kNum);
    t["cell_size"] = field(&SystemConfig::cell_size_m, kNum);
    t["min_distance"] = field(&SystemConfig::min_distance_m, kNum);
    t["mobility_stay"] = field(&SystemConfig::mobility_stay, kNum);
    t["arrival_stay"] = field(&SystemConfig::arrival_stay, kNum);
    t["warmup_fraction"] = field(&SystemConfig::warmup_fraction, kNum);
    t["wifi_cells"] = field(&SystemConfig::wifi_cells, "a list of integer lists");
    t["algorithm"] = [](SystemConfig&, Algorithm& a, const YAML::Node& n, const std::string& k) {
      a = parse_algorithm(as<std::string>(n, k, "an algorithm name"));
    };
    t["mac.G"] = nested(&SystemConfig::mac, &MacParams::payload_bits, kNum);
    t["mac.Tb"] = nested(&SystemConfig::mac, &MacParams::backoff_slot_us, kNum);
    t["mac.Ts"] = nested(&SystemConfig::mac, &MacParams::success_slot_us, kNum);
    t["mac.Tc"] = nested(&SystemConfig::mac, &MacParams::collision_slot_us, kNum);
    t["mac.Eb"] = nested(&SystemConfig::mac, &MacParams::backoff_energy_uj, kNum);
    t["mac.Es"] = nested(&SystemConfig::mac, &MacParams::success_energy_uj, kNum);
    t["mac.Ec_coeffs"] = [](SystemConfig& c, Algorithm&, const YAML::Node& n, const std::string& k) {
      const auto v = as<std::vector<double>>(n, k, "a list of three numbers");
      if (v.size() != 3) throw ConfigError(k + " expects a list of three numbers");
      std::copy(v.begin(), v.end(), c.mac.collision_energy_coeffs.begin());
    };
    t["dcf.cw_min"] = nested(&SystemConfig::dcf, &DcfParams::cw_min, kInt);
    t["dcf.backoff_stages"] = nested(&SystemConfig::dcf, &DcfParams::backoff_stages, kInt);
    t["solver.golden_rel_tol"] = nested(&SystemConfig::solver, &SolverParams::golden_rel_tol, kNum);
    t["solver.tie_rel_tol"] = nested(&SystemConfig::solver, &SolverParams::tie_rel_tol, kNum);
    t["solver.budget_rel_tol"] = nested(&SystemConfig::solver, &SolverParams::budget_rel_tol, kNum);
    t["solver.extreme_point_cap"] =
        nested(&SystemConfig::solver, &SolverParams::extreme_point_cap, kInt);
    t["solver.selection_cap"] = nested(&SystemConfig::solver, &SolverParams::selection_cap, kInt);
    t["solver.gp_epsilon_rel"] = nested(&SystemConfig::solver, &SolverParams::gp_epsilon_rel, kNum);
    t["solver.gp_max_iterations"] =
        nested(&SystemConfig::solver, &SolverParams::gp_max_iterations, kInt);
    t["solver.mc_samples"] = nested(&SystemConfig::solver, &SolverParams::mc_samples, kInt);
    return t;
  }();
  return table;
}

bool is_section(const std::string& key) { return key == "mac" || key == "dcf" || key == "solver"; }

void apply(ParsedConfig& pc, const std::string& key, const YAML::Node& value) {
  const auto& t = setters();
  auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(pc.cfg, pc.algorithm, value, key);
}

void apply_document(ParsedConfig& pc, const YAML::Node& root) {
  if (!root || root.IsNull()) return;
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping of keys to values");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (is_section(key)) {
      if (kv.second.IsNull()) continue;
      if (!kv.second.IsMap()) throw ConfigError(key + " must be a mapping");
      for (const auto& sub : kv.second) apply(pc, key + "." + sub.first.as<std::string>(), sub.second);
    } else {
      apply(pc, key, kv.second);
    }
  }
}

ParsedConfig finish(ParsedConfig pc) {
  pc.cfg.validate();
  pc.topo = pc.cfg.wifi_cells.empty() ? make_topology(pc.cfg, pc.cfg.seed)
                                      : make_topology(pc.cfg, pc.cfg.wifi_cells);
  return pc;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& kv : setters()) keys.push_back(kv.first);
  return keys;
}

ParsedConfig parse_config_text(const std::string& yaml, const std::vector<std::string>& overrides) {
  ParsedConfig pc;
  try {
    apply_document(pc, YAML::Load(yaml));
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + o + "' must look like key=value");
      }
      apply(pc, o.substr(0, eq), YAML::Load(o.substr(eq + 1)));
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  return finish(std::move(pc));
}

ParsedConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

const char* const kCsvHeader =
    "run_id,algorithm,V,theta,W,error_rate,mean_arrival_mbps,seed,avg_power_w,avg_queue_mb,"
    "avg_delay_s,offload_pct,frames";

namespace {

template <class T>
void put(std::ostream& out, T v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

template <class T>
T get(const std::string& tok, const char* column) {
  T v{};
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DomainError(std::string("bad value '") + tok + "' in column " + column);
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    put(out, r.run_id);
    out << ',' << r.algorithm << ',';
    put(out, r.V);
    out << ',';
    put(out, r.theta);
    out << ',';
    put(out, r.W);
    out << ',';
    put(out, r.error_rate);
    out << ',';
    put(out, r.mean_arrival);
    out << ',';
    put(out, r.seed);
    out << ',';
    put(out, r.avg_power);
    out << ',';
    put(out, r.avg_queue);
    out << ',';
    put(out, r.avg_delay);
    out << ',';
    put(out, r.offload_pct);
    out << ',';
    put(out, r.frames);
    out << '\n';
  }
}

void emit_csv(const std::vector<RunRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out, rows);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<RunRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ShapeError("unexpected CSV header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 13) throw ShapeError("CSV row has " + std::to_string(f.size()) + " fields, expected 13");
    RunRow r;
    r.run_id = get<int>(f[0], "run_id");
    r.algorithm = f[1];
    r.V = get<double>(f[2], "V");
    r.theta = get<double>(f[3], "theta");
    r.W = get<int>(f[4], "W");
    r.error_rate = get<double>(f[5], "error_rate");
    r.mean_arrival = get<double>(f[6], "mean_arrival_mbps");
    r.seed = get<std::uint64_t>(f[7], "seed");
    r.avg_power = get<double>(f[8], "avg_power_w");
    r.avg_queue = get<double>(f[9], "avg_queue_mb");
    r.avg_delay = get<double>(f[10], "avg_delay_s");
    r.offload_pct = get<double>(f[11], "offload_pct");
    r.frames = get<int>(f[12], "frames");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_series(std::ostream& out, const std::vector<FrameRecord>& series) {
  const std::size_t L = series.empty() ? 0 : series.front().queue.size();
  out << "frame,avg_power_w";
  for (std::size_t l = 0; l < L; ++l) out << ",q_" << l;
  for (std::size_t l = 0; l < L; ++l) out << ",alpha_" << l;
  out << '\n';
  for (const auto& r : series) {
    put(out, r.frame);
    out << ',';
    put(out, r.avg_power);
    for (double q : r.queue) {
      out << ',';
      put(out, q);
    }
    for (int a : r.alpha) {
      out << ',';
      put(out, a);
    }
    out << '\n';
  }
}

}  // namespace ensra
