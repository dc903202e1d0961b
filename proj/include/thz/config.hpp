// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value configuration with dotted section names (link.*, ftr.*,
// pointing.*, ...) and the builders that turn a parsed file into channel
// objects.  All SNR-like quantities cross this boundary in dB; everything
// behind it is linear.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "thz/channel.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"

namespace thz {
namespace cfg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// '#' starts a comment (full-line or trailing); blank lines are skipped;
// later assignments to the same key win.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;

  void set(const std::string& key, const std::string& value);

  // Sorted view, used to echo the resolved configuration into CSV headers.
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Physical link budget (link.*).
LinkBudget budget_from(const Config& c);

// Mean SNR: link.gamma0_db when present, otherwise derived from transmit
// power, the deterministic path gain, and the noise floor.
double gamma0_from(const Config& c);

// Fading parameters (ftr.*); branch >= 1 first consults the per-branch
// override keys ftr.branch<N>.m/.k/.delta.
FtrParams ftr_from(const Config& c, int branch = 0);

// Misalignment geometry (pointing.*): either the target pair s0/phi or the
// direct pair beam_waist_m/sigma_s_m, both with the aperture radius r1_m.
PointingGeometry pointing_from(const Config& c);

SeriesControl series_from(const Config& c);    // mrc.j_max, mrc.weight_tol
ModulationSpec modulation_from(const Config& c);  // modulation.p/.q

SingleLinkChannel single_link_from(const Config& c);
MrcChannel mrc_from(const Config& c);          // mrc.l branches

}  // namespace cfg
}  // namespace thz
