// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo estimators for the same link metrics the analytical layer
// computes.  Sampling is fully deterministic given a seed: draws come from
// the Philox 4x32-10 counter cipher, so every (seed, stream) pair yields a
// reproducible sequence independent of platform or call order.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "thz/channel.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"

namespace thz {
namespace mc {

// Counter-based block cipher; each call encrypts the current 128-bit
// counter under the 64-bit key and advances it.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint32_t stream);
  std::array<std::uint32_t, 4> next_block();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
};

// Buffered scalar draws on top of the block cipher.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t stream);
  std::uint32_t next_u32();
  double next_uniform();           // open interval (0, 1), 53-bit resolution
  double next_normal();            // standard normal (Box-Muller, cached)
  double next_gamma(double shape); // unit scale (Marsaglia-Tsang)

 private:
  Philox engine_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
  double cached_normal_ = 0.0;
  bool have_normal_ = false;
};

struct SimConfig {
  long long samples = 100000;
  std::uint64_t seed = 1;
};

// Point estimate with a 95% confidence interval.  variance is the variance
// of the estimator (not of one sample); undersampled marks a counted-event
// estimate built from fewer than 100 events.
struct EmpiricalMetric {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long long samples = 0;
  double variance = 0.0;
  bool undersampled = false;
};

// One fading power draw: two randomly phased specular rays, their common
// power modulated by a unit-mean Gamma variate, plus a complex diffuse
// term.  Unit mean by construction.
double sample_ftr_power(RandomStream& rs, const FtrParams& p);

// One beam-misalignment amplitude gain in (0, s0]; the squared gain has
// distribution (g^2 / s0^2)^h.
double sample_pointing_gain(RandomStream& rs, const PointingGeometry& g);

// One instantaneous SNR draw: gamma0 times fading power times squared
// pointing gain.
double sample_snr(RandomStream& rs, const SingleLinkChannel& ch);

// Bulk draws from a fresh stream of the given seed, for histogram and
// distribution-distance tests.
std::vector<double> sample_ftr_power(const FtrParams& p, long long n,
                                     std::uint64_t seed);
std::vector<double> sample_pointing_gain(const PointingGeometry& g,
                                         long long n, std::uint64_t seed);
std::vector<double> sample_snr(const SingleLinkChannel& ch, long long n,
                               std::uint64_t seed);

EmpiricalMetric estimate_outage(const SingleLinkChannel& ch, double threshold,
                                const SimConfig& cfg = {});
EmpiricalMetric estimate_ber(const SingleLinkChannel& ch,
                             const ModulationSpec& mod,
                             const SimConfig& cfg = {});
EmpiricalMetric estimate_capacity(const SingleLinkChannel& ch,
                                  const SimConfig& cfg = {});

EmpiricalMetric estimate_outage_mrc(const MrcChannel& ch, double threshold,
                                    const SimConfig& cfg = {});
EmpiricalMetric estimate_ber_mrc(const MrcChannel& ch,
                                 const ModulationSpec& mod,
                                 const SimConfig& cfg = {});
EmpiricalMetric estimate_capacity_mrc(const MrcChannel& ch,
                                      const SimConfig& cfg = {});

}  // namespace mc
}  // namespace thz
