// SPDX-License-Identifier: Apache-2.0
#include "thz/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace thz {
namespace cfg {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_') {
      return false;
    }
  }
  return true;
}

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

}  // namespace

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!valid_key(key)) {
      fail("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    if (value.empty()) {
      fail("config line " + std::to_string(lineno) + ": empty value for '" +
           key + "'");
    }
    c.kv_[key] = value;
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) fail("missing config key: " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end == v.c_str() || *end != '\0') {
    fail("config key " + key + ": not a number: '" + v + "'");
  }
  return x;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0') {
    fail("config key " + key + ": not an integer: '" + v + "'");
  }
  return x;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) fail("bad config key: '" + key + "'");
  kv_[key] = value;
}

LinkBudget budget_from(const Config& c) {
  LinkBudget b;
  b.frequency_hz = c.get_double("link.frequency_ghz", 275.0) * 1e9;
  b.distance_m = c.get_double("link.distance_m", 50.0);
  b.tx_gain_dbi = c.get_double("link.tx_gain_dbi", 50.0);
  b.rx_gain_dbi = c.get_double("link.rx_gain_dbi", 50.0);
  // dB/km of power attenuation into the per-meter coefficient of the model
  const double db_per_km = c.get_double("link.absorption_db_per_km", 0.0);
  b.absorption_per_m = db_per_km * 2.302585092994046 / 10.0 / 1000.0;
  if (!(b.frequency_hz > 0.0) || !(b.distance_m > 0.0)) {
    throw ConfigError("link.frequency_ghz and link.distance_m must be > 0");
  }
  return b;
}

double gamma0_from(const Config& c) {
  if (c.has("link.gamma0_db")) {
    return db_to_linear(c.get_double("link.gamma0_db"));
  }
  const LinkBudget b = budget_from(c);
  const double hl = path_gain(b);
  const double tx_w = dbm_to_watt(c.get_double("link.tx_power_dbm", 20.0));
  const double noise_w = dbm_to_watt(c.get_double("link.noise_dbm", -94.2));
  const double g0 = tx_w * hl * hl / noise_w;
  if (!(g0 > 0.0)) throw ConfigError("derived mean SNR is not positive");
  return g0;
}

FtrParams ftr_from(const Config& c, int branch) {
  const std::string prefix =
      branch >= 1 ? "ftr.branch" + std::to_string(branch) + "." : "ftr.";
  FtrParams p;
  p.m = c.get_double(prefix + "m", c.get_double("ftr.m", 2.0));
  p.k = c.get_double(prefix + "k", c.get_double("ftr.k", 10.0));
  p.delta = c.get_double(prefix + "delta", c.get_double("ftr.delta", 0.5));
  if (!(p.m > 0.0) || !(p.k >= 0.0) || p.delta < 0.0 || p.delta > 1.0) {
    throw ConfigError("ftr parameters out of range (m > 0, k >= 0, delta in "
                      "[0, 1])");
  }
  return p;
}

PointingGeometry pointing_from(const Config& c) {
  const double r1 = c.get_double("pointing.r1_m", 0.1);
  const bool direct =
      c.has("pointing.beam_waist_m") || c.has("pointing.sigma_s_m");
  if (direct) {
    PointingParams p;
    p.r1_m = r1;
    p.wz_m = c.get_double("pointing.beam_waist_m");
    p.sigma_s_m = c.get_double("pointing.sigma_s_m");
    return derive_pointing(p);
  }
  const double s0 = c.get_double("pointing.s0", 0.054);
  const double phi = c.get_double("pointing.phi", 2.5);
  return derive_pointing(pointing_for_targets(r1, s0, phi));
}

SeriesControl series_from(const Config& c) {
  SeriesControl s;
  s.j_max = static_cast<int>(c.get_int("mrc.j_max", s.j_max));
  s.weight_tol = c.get_double("mrc.weight_tol", s.weight_tol);
  if (s.j_max < 1 || !(s.weight_tol > 0.0)) {
    throw ConfigError("mrc.j_max must be >= 1 and mrc.weight_tol > 0");
  }
  return s;
}

ModulationSpec modulation_from(const Config& c) {
  ModulationSpec m;
  m.p = c.get_double("modulation.p", 0.5);
  m.q = c.get_double("modulation.q", 1.0);
  if (!(m.p > 0.0) || !(m.q > 0.0)) {
    throw ConfigError("modulation.p and modulation.q must be > 0");
  }
  return m;
}

SingleLinkChannel single_link_from(const Config& c) {
  return SingleLinkChannel(ftr_from(c), pointing_from(c), gamma0_from(c),
                           series_from(c));
}

MrcChannel mrc_from(const Config& c) {
  const long long l = c.get_int("mrc.l", 2);
  if (l < 1 || l > 4) throw ConfigError("mrc.l must be between 1 and 4");
  std::vector<FtrParams> branches;
  for (int i = 1; i <= static_cast<int>(l); ++i) {
    branches.push_back(ftr_from(c, i));
  }
  return MrcChannel(branches, pointing_from(c), gamma0_from(c),
                    series_from(c));
}

}  // namespace cfg
}  // namespace thz
