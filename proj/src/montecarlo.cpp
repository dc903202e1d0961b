// SPDX-License-Identifier: Apache-2.0
#include "thz/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "thz/special/gamma.hpp"
#include "thz/special/incomplete_gamma.hpp"

namespace thz {
namespace mc {
namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

// Conditional bit error rate at SNR x for the Gamma(p, q) modulation
// family: Gamma(p, q x) / (2 Gamma(p)).
double conditional_ber(const ModulationSpec& mod, double x) {
  if (!(x > 0.0)) return 0.5;
  return 0.5 * std::exp(sf::upper_inc_gamma_log(mod.p, mod.q * x) -
                        sf::ln_gamma_real(mod.p));
}

EmpiricalMetric wilson_interval(long long hits, long long n) {
  EmpiricalMetric r;
  r.samples = n;
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(hits) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      kZ95 *
      std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  r.value = phat;
  r.ci_low = std::max(0.0, center - half);
  r.ci_high = std::min(1.0, center + half);
  r.variance = phat * (1.0 - phat) / nn;
  r.undersampled = hits < 100;
  return r;
}

EmpiricalMetric clt_interval(double sum, double sum_sq, long long n) {
  EmpiricalMetric r;
  r.samples = n;
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, sum_sq / nn - mean * mean) * nn / (nn - 1.0);
  const double half = kZ95 * std::sqrt(var / nn);
  r.value = mean;
  r.ci_low = mean - half;
  r.ci_high = mean + half;
  r.variance = var / nn;
  return r;
}

void require_samples(const SimConfig& cfg, const char* where) {
  if (cfg.samples < 2) {
    throw std::invalid_argument(std::string(where) +
                                ": need at least two samples");
  }
}

// Independent stream per (metric, branch) so that adding a branch or a
// metric never shifts the draws of another.
enum class Purpose : std::uint32_t { kOutage = 0, kBer = 1, kCapacity = 2 };

std::uint32_t stream_id(Purpose p, int branch) {
  return static_cast<std::uint32_t>(p) * 8u + static_cast<std::uint32_t>(branch);
}

template <typename Accumulate>
void run_mrc(const MrcChannel& ch, Purpose purpose, const SimConfig& cfg,
             Accumulate&& accumulate) {
  std::vector<RandomStream> streams;
  streams.reserve(ch.branch_count());
  for (int i = 0; i < ch.branch_count(); ++i) {
    streams.emplace_back(cfg.seed, stream_id(purpose, i));
  }
  for (long long k = 0; k < cfg.samples; ++k) {
    double total = 0.0;
    for (int i = 0; i < ch.branch_count(); ++i) {
      total += sample_snr(streams[i], ch.branch(i));
    }
    accumulate(total);
  }
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0u, 0u, stream} {}

std::array<std::uint32_t, 4> Philox::next_block() {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  std::array<std::uint32_t, 4> x = ctr_;
  std::uint32_t k0 = key_[0];
  std::uint32_t k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      k0 += kW0;
      k1 += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x[2];
    x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
         static_cast<std::uint32_t>(p0)};
  }
  if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
  return x;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t stream)
    : engine_(seed, stream) {}

std::uint32_t RandomStream::next_u32() {
  if (pos_ == 4) {
    block_ = engine_.next_block();
    pos_ = 0;
  }
  return block_[pos_++];
}

double RandomStream::next_uniform() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  const std::uint64_t mant = (hi << 21) | (lo >> 11);  // 53 bits
  return (static_cast<double>(mant) + 0.5) * 0x1p-53;
}

double RandomStream::next_normal() {
  if (have_normal_) {
    have_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_normal_ = r * std::sin(kTwoPi * u2);
  have_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

double RandomStream::next_gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("RandomStream::next_gamma: shape must be > 0");
  }
  if (shape < 1.0) {
    const double u = next_uniform();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_ftr_power(RandomStream& rs, const FtrParams& p) {
  const double s2 = p.sigma2();
  const double root = std::sqrt(std::max(0.0, 1.0 - p.delta * p.delta));
  const double v1 = std::sqrt(s2 * p.k * (1.0 + root));
  const double v2 = std::sqrt(s2 * p.k * (1.0 - root));
  const double zeta = rs.next_gamma(p.m) / p.m;
  const double sz = std::sqrt(zeta);
  const double a1 = kTwoPi * rs.next_uniform();
  const double a2 = kTwoPi * rs.next_uniform();
  const double sigma = std::sqrt(s2);
  const double re = sz * (v1 * std::cos(a1) + v2 * std::cos(a2)) +
                    sigma * rs.next_normal();
  const double im = sz * (v1 * std::sin(a1) + v2 * std::sin(a2)) +
                    sigma * rs.next_normal();
  return re * re + im * im;
}

double sample_pointing_gain(RandomStream& rs, const PointingGeometry& g) {
  // Rayleigh radial displacement folded into the Gaussian beam profile
  // collapses to s0 * U^{1/(2h)}.
  return g.s0 * std::pow(rs.next_uniform(), 0.5 / g.h);
}

double sample_snr(RandomStream& rs, const SingleLinkChannel& ch) {
  const double gp = sample_pointing_gain(rs, ch.pointing());
  return ch.gamma0() * sample_ftr_power(rs, ch.fading()) * gp * gp;
}

namespace {

template <typename Draw>
std::vector<double> bulk(long long n, std::uint64_t seed, Draw&& draw) {
  RandomStream rs(seed, 0);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(std::max<long long>(n, 0)));
  for (long long k = 0; k < n; ++k) out.push_back(draw(rs));
  return out;
}

}  // namespace

std::vector<double> sample_ftr_power(const FtrParams& p, long long n,
                                     std::uint64_t seed) {
  return bulk(n, seed, [&](RandomStream& rs) { return sample_ftr_power(rs, p); });
}

std::vector<double> sample_pointing_gain(const PointingGeometry& g,
                                         long long n, std::uint64_t seed) {
  return bulk(n, seed,
              [&](RandomStream& rs) { return sample_pointing_gain(rs, g); });
}

std::vector<double> sample_snr(const SingleLinkChannel& ch, long long n,
                               std::uint64_t seed) {
  return bulk(n, seed, [&](RandomStream& rs) { return sample_snr(rs, ch); });
}

EmpiricalMetric estimate_outage(const SingleLinkChannel& ch, double threshold,
                                const SimConfig& cfg) {
  require_samples(cfg, "estimate_outage");
  RandomStream rs(cfg.seed, stream_id(Purpose::kOutage, 0));
  long long hits = 0;
  for (long long k = 0; k < cfg.samples; ++k) {
    if (sample_snr(rs, ch) < threshold) ++hits;
  }
  return wilson_interval(hits, cfg.samples);
}

EmpiricalMetric estimate_ber(const SingleLinkChannel& ch,
                             const ModulationSpec& mod, const SimConfig& cfg) {
  require_samples(cfg, "estimate_ber");
  RandomStream rs(cfg.seed, stream_id(Purpose::kBer, 0));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long k = 0; k < cfg.samples; ++k) {
    const double b = conditional_ber(mod, sample_snr(rs, ch));
    sum += b;
    sum_sq += b * b;
  }
  return clt_interval(sum, sum_sq, cfg.samples);
}

EmpiricalMetric estimate_capacity(const SingleLinkChannel& ch,
                                  const SimConfig& cfg) {
  require_samples(cfg, "estimate_capacity");
  RandomStream rs(cfg.seed, stream_id(Purpose::kCapacity, 0));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long k = 0; k < cfg.samples; ++k) {
    const double c = std::log2(1.0 + sample_snr(rs, ch));
    sum += c;
    sum_sq += c * c;
  }
  return clt_interval(sum, sum_sq, cfg.samples);
}

EmpiricalMetric estimate_outage_mrc(const MrcChannel& ch, double threshold,
                                    const SimConfig& cfg) {
  require_samples(cfg, "estimate_outage_mrc");
  long long hits = 0;
  run_mrc(ch, Purpose::kOutage, cfg, [&](double snr) {
    if (snr < threshold) ++hits;
  });
  return wilson_interval(hits, cfg.samples);
}

EmpiricalMetric estimate_ber_mrc(const MrcChannel& ch,
                                 const ModulationSpec& mod,
                                 const SimConfig& cfg) {
  require_samples(cfg, "estimate_ber_mrc");
  double sum = 0.0;
  double sum_sq = 0.0;
  run_mrc(ch, Purpose::kBer, cfg, [&](double snr) {
    const double b = conditional_ber(mod, snr);
    sum += b;
    sum_sq += b * b;
  });
  return clt_interval(sum, sum_sq, cfg.samples);
}

EmpiricalMetric estimate_capacity_mrc(const MrcChannel& ch,
                                      const SimConfig& cfg) {
  require_samples(cfg, "estimate_capacity_mrc");
  double sum = 0.0;
  double sum_sq = 0.0;
  run_mrc(ch, Purpose::kCapacity, cfg, [&](double snr) {
    const double c = std::log2(1.0 + snr);
    sum += c;
    sum_sq += c * c;
  });
  return clt_interval(sum, sum_sq, cfg.samples);
}

}  // namespace mc
}  // namespace thz
