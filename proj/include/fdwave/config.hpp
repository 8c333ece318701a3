#pragma once

// Experiment configuration: a flat key = value document (section headers in
// brackets are allowed as grouping), plus command-line overrides on top.
// Unknown keys and out-of-range knobs are rejected with the offending line.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/table.hpp"

namespace fdwave {

inline constexpr const char* artifact_version = "0.1.0";

struct ExperimentConfig {
  std::string command = "rates";
  double alpha = 1.0;
  double beta = -1.0;  // -1: take beta from the damping profile
  std::string profile = "indicator";
  int n_modes = 256;
  double target = 13.0;
  int count = 1;
  bool all_modes = false;
  double h_min = 0.015625;
  double h_max = 0.125;
  int h_count = 8;
  double z_min = 0.9;
  double z_max = 1.1;
  int z_count = 21;
  double lambda_min = 5.0;
  double lambda_max = 10.0;
  int lambda_count = 11;
  double dt = 0.0;  // 0: pick 0.4 / omega_max
  double t_final = 100.0;
  int sample_every = 10;
  double fit_t_min = 5.0;
  double fit_t_max = 0.0;  // 0: end of trace
  double trim = 0.2;
  bool check_doubling = true;
  int h_exp_min = 4;   // commutator sweep: h = 2^{-e}, e = h_exp_min..h_exp_max
  int h_exp_max = 10;
  std::string symbol = "default";
  unsigned long long seed = 12345;
  int workers = 1;
  std::string output_dir;
};

namespace detail_config {

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error(where + ": expected boolean, got '" + v + "'");
}

inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& value,
                    const std::string& where) {
  try {
    if (key == "command") c.command = value;
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "beta") c.beta = std::stod(value);
    else if (key == "profile") c.profile = value;
    else if (key == "n_modes") c.n_modes = std::stoi(value);
    else if (key == "target") c.target = std::stod(value);
    else if (key == "count") c.count = std::stoi(value);
    else if (key == "all_modes") c.all_modes = parse_bool(value, where);
    else if (key == "h_min") c.h_min = std::stod(value);
    else if (key == "h_max") c.h_max = std::stod(value);
    else if (key == "h_count") c.h_count = std::stoi(value);
    else if (key == "z_min") c.z_min = std::stod(value);
    else if (key == "z_max") c.z_max = std::stod(value);
    else if (key == "z_count") c.z_count = std::stoi(value);
    else if (key == "lambda_min") c.lambda_min = std::stod(value);
    else if (key == "lambda_max") c.lambda_max = std::stod(value);
    else if (key == "lambda_count") c.lambda_count = std::stoi(value);
    else if (key == "dt") c.dt = std::stod(value);
    else if (key == "t_final") c.t_final = std::stod(value);
    else if (key == "sample_every") c.sample_every = std::stoi(value);
    else if (key == "fit_t_min") c.fit_t_min = std::stod(value);
    else if (key == "fit_t_max") c.fit_t_max = std::stod(value);
    else if (key == "trim") c.trim = std::stod(value);
    else if (key == "check_doubling") c.check_doubling = parse_bool(value, where);
    else if (key == "h_exp_min") c.h_exp_min = std::stoi(value);
    else if (key == "h_exp_max") c.h_exp_max = std::stoi(value);
    else if (key == "symbol") c.symbol = value;
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "workers") c.workers = std::stoi(value);
    else if (key == "output_dir") c.output_dir = value;
    else throw std::runtime_error(where + ": unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw std::runtime_error(where + ": bad value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace detail_config

inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& origin = "<config>",
                                          ExperimentConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string s = line;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    auto ltrim = s.find_first_not_of(" \t\r");
    if (ltrim == std::string::npos) continue;
    auto rtrim = s.find_last_not_of(" \t\r");
    s = s.substr(ltrim, rtrim - ltrim + 1);
    if (s.front() == '[') {
      if (s.back() != ']') throw std::runtime_error(where + ": malformed section header");
      continue;  // sections only group keys
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error(where + ": expected key = value");
    std::string key = s.substr(0, eq);
    std::string value = s.substr(eq + 1);
    auto strip = [](std::string& t) {
      const auto a = t.find_first_not_of(" \t");
      const auto b = t.find_last_not_of(" \t");
      t = a == std::string::npos ? "" : t.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    if (key.empty()) throw std::runtime_error(where + ": empty key");
    detail_config::set_key(base, key, value, where);
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path, base);
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[run]\n";
  out << "command = " << c.command << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "beta = " << format_double(c.beta) << "\n";
  out << "profile = " << c.profile << "\n";
  out << "n_modes = " << c.n_modes << "\n";
  out << "target = " << format_double(c.target) << "\n";
  out << "count = " << c.count << "\n";
  out << "all_modes = " << (c.all_modes ? "true" : "false") << "\n";
  out << "[scan]\n";
  out << "h_min = " << format_double(c.h_min) << "\n";
  out << "h_max = " << format_double(c.h_max) << "\n";
  out << "h_count = " << c.h_count << "\n";
  out << "z_min = " << format_double(c.z_min) << "\n";
  out << "z_max = " << format_double(c.z_max) << "\n";
  out << "z_count = " << c.z_count << "\n";
  out << "lambda_min = " << format_double(c.lambda_min) << "\n";
  out << "lambda_max = " << format_double(c.lambda_max) << "\n";
  out << "lambda_count = " << c.lambda_count << "\n";
  out << "trim = " << format_double(c.trim) << "\n";
  out << "check_doubling = " << (c.check_doubling ? "true" : "false") << "\n";
  out << "[evolve]\n";
  out << "dt = " << format_double(c.dt) << "\n";
  out << "t_final = " << format_double(c.t_final) << "\n";
  out << "sample_every = " << c.sample_every << "\n";
  out << "fit_t_min = " << format_double(c.fit_t_min) << "\n";
  out << "fit_t_max = " << format_double(c.fit_t_max) << "\n";
  out << "[commutator]\n";
  out << "h_exp_min = " << c.h_exp_min << "\n";
  out << "h_exp_max = " << c.h_exp_max << "\n";
  out << "symbol = " << c.symbol << "\n";
  out << "[io]\n";
  out << "seed = " << c.seed << "\n";
  out << "workers = " << c.workers << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  return out.str();
}

inline void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
  const std::vector<std::string> commands = {"modes",  "resolvent-scan", "lambda-scan",
                                             "evolve", "commutator-scan", "rates"};
  bool ok = false;
  for (const auto& k : commands) ok = ok || k == c.command;
  if (!ok) fail("unknown command '" + c.command + "'");
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) fail("alpha must lie in (0,2)");
  if (!(c.beta == -1.0 || (c.beta >= 0.0 && c.beta <= 1.0))) fail("beta must lie in [0,1]");
  if (c.n_modes < 8 || c.n_modes % 2 != 0) fail("n_modes must be even and >= 8");
  if (c.count < 1) fail("count must be >= 1");
  if (!(c.h_min > 0.0 && c.h_min <= c.h_max && c.h_max < 1.0)) fail("need 0 < h_min <= h_max < 1");
  if (c.h_count < 1) fail("h_count must be >= 1");
  if (!(c.z_min >= 0.9 && c.z_min <= c.z_max && c.z_max <= 1.1))
    fail("z grid must lie within [0.9, 1.1]");
  if (c.z_count < 1) fail("z_count must be >= 1");
  if (!(c.lambda_min >= 5.0 && c.lambda_min <= c.lambda_max)) fail("need 5 <= lambda_min <= lambda_max");
  if (c.lambda_count < 1) fail("lambda_count must be >= 1");
  if (c.dt < 0.0) fail("dt must be positive (or 0 for automatic)");
  if (!(c.t_final > 0.0)) fail("t_final must be positive");
  if (c.sample_every < 1) fail("sample_every must be >= 1");
  if (!(c.trim >= 0.0 && c.trim < 0.5)) fail("trim must lie in [0, 0.5)");
  if (c.h_exp_min < 1 || c.h_exp_max < c.h_exp_min || c.h_exp_max > 20)
    fail("need 1 <= h_exp_min <= h_exp_max <= 20");
  if (c.symbol != "default" && c.symbol != "narrow") fail("symbol must be 'default' or 'narrow'");
  if (c.workers < 0) fail("workers must be >= 0");
  if (!std::isfinite(c.target)) fail("target must be finite");
}

}  // namespace fdwave
