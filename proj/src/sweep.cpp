// SPDX-License-Identifier: Apache-2.0
#include "thz/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thz/montecarlo.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"

namespace thz {
namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  out.push_back(cur);
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string sanitize_note(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

// Everything a metric evaluation needs beyond the channel itself.
struct MetricInputs {
  double threshold = 0.0;
  ModulationSpec mod;
  double epsilon = 0.0;
  mc::SimConfig sim;
};

MetricInputs inputs_from(const cfg::Config& c) {
  MetricInputs in;
  in.threshold = db_to_linear(c.get_double("metric.threshold_db", 4.0));
  in.mod = cfg::modulation_from(c);
  in.epsilon = c.get_double("metric.epsilon", 0.0);
  in.sim.samples = c.get_int("sim.samples", 100000);
  in.sim.seed = static_cast<std::uint64_t>(c.get_int("sim.seed", 1));
  return in;
}

// Channels for one grid point.  The mean-SNR axis rebases the prebuilt
// base channels (mixture weights reused); the other axes rebuild.
class PointFactory {
 public:
  PointFactory(const cfg::Config& c, const SweepSpec& spec)
      : c_(c), axis_(spec.axis), single_receiver_(spec.receiver == "single") {
    if (axis_ == "gamma0_db") {
      base_mrc_.emplace(make_mrc(cfg::pointing_from(c_), branch_count(c_)));
      base_single_.emplace(cfg::single_link_from(c_));
    }
  }

  MrcChannel mrc_at(double v) const {
    if (axis_ == "gamma0_db") return base_mrc_->with_gamma0(db_to_linear(v));
    if (axis_ == "l") {
      return make_mrc(cfg::pointing_from(c_),
                      static_cast<int>(std::llround(v)));
    }
    return make_mrc(pointing_at(v), branch_count(c_));
  }

  SingleLinkChannel single_at(double v) const {
    if (axis_ == "gamma0_db") return base_single_->with_gamma0(db_to_linear(v));
    if (axis_ == "l") {
      throw cfg::ConfigError("branch-count axis needs the mrc receiver");
    }
    return SingleLinkChannel(cfg::ftr_from(c_), pointing_at(v),
                             cfg::gamma0_from(c_), cfg::series_from(c_));
  }

  // The single receiver borrows the one-branch combiner for expansions
  // that only exist on the combiner side.
  MrcChannel mrc_view_at(double v) const {
    if (!single_receiver_) return mrc_at(v);
    if (axis_ == "gamma0_db") {
      return MrcChannel({cfg::ftr_from(c_)}, cfg::pointing_from(c_),
                        db_to_linear(v), cfg::series_from(c_));
    }
    return MrcChannel({cfg::ftr_from(c_)}, pointing_at(v),
                      cfg::gamma0_from(c_), cfg::series_from(c_));
  }

 private:
  static int branch_count(const cfg::Config& c) {
    return static_cast<int>(c.get_int("mrc.l", 2));
  }

  MrcChannel make_mrc(const PointingGeometry& g, int l) const {
    std::vector<FtrParams> branches;
    for (int i = 1; i <= l; ++i) branches.push_back(cfg::ftr_from(c_, i));
    return MrcChannel(branches, g, cfg::gamma0_from(c_), cfg::series_from(c_));
  }

  PointingGeometry pointing_at(double phi) const {
    const double r1 = c_.get_double("pointing.r1_m", 0.1);
    const double s0 = cfg::pointing_from(c_).s0;
    return derive_pointing(pointing_for_targets(r1, s0, phi));
  }

  const cfg::Config& c_;
  std::string axis_;
  bool single_receiver_;
  std::optional<MrcChannel> base_mrc_;
  std::optional<SingleLinkChannel> base_single_;
};

struct RowResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  long long detail = 0;
  std::string status = "ok";
  std::string note;
};

RowResult from_metric(const MetricResult& r) {
  RowResult out;
  out.value = r.value;
  out.lower = r.value - r.error_abs;
  out.upper = r.value + r.error_abs;
  out.detail = r.series_terms;
  out.note = r.note;
  if (!r.converged) {
    out.status = "warn";
    if (!out.note.empty()) out.note += "; ";
    out.note += "error estimate above target";
  } else if (r.clamped) {
    out.status = "warn";
  }
  return out;
}

RowResult from_empirical(const mc::EmpiricalMetric& e) {
  RowResult out;
  out.value = e.value;
  out.lower = e.ci_low;
  out.upper = e.ci_high;
  out.detail = e.samples;
  if (e.undersampled) {
    out.status = "warn";
    out.note = "fewer than 100 events";
  }
  return out;
}

RowResult evaluate_cell(const std::string& metric, const std::string& mode,
                        bool single_receiver, const PointFactory& pf,
                        const MetricInputs& in, double v) {
  if (mode == "exact") {
    if (metric == "outage") {
      return from_metric(single_receiver
                             ? outage_single(pf.single_at(v), in.threshold)
                             : outage_mrc(pf.mrc_at(v), in.threshold));
    }
    if (metric == "ber") {
      return from_metric(single_receiver
                             ? ber_single_series(pf.single_at(v), in.mod)
                             : ber_mrc(pf.mrc_at(v), in.mod));
    }
    return from_metric(single_receiver
                           ? capacity_single_exact(pf.single_at(v))
                           : capacity_mrc(pf.mrc_at(v), in.epsilon));
  }
  if (mode == "asymptotic") {
    if (metric == "outage") {
      return from_metric(outage_mrc_asymptotic(pf.mrc_view_at(v), in.threshold));
    }
    if (metric == "ber") {
      return from_metric(ber_mrc_asymptotic(pf.mrc_view_at(v), in.mod));
    }
    RowResult out;
    out.status = "unsupported";
    out.note = "no high-SNR expansion for capacity";
    return out;
  }
  // mc
  if (metric == "outage") {
    return from_empirical(
        single_receiver
            ? mc::estimate_outage(pf.single_at(v), in.threshold, in.sim)
            : mc::estimate_outage_mrc(pf.mrc_at(v), in.threshold, in.sim));
  }
  if (metric == "ber") {
    return from_empirical(single_receiver
                              ? mc::estimate_ber(pf.single_at(v), in.mod, in.sim)
                              : mc::estimate_ber_mrc(pf.mrc_at(v), in.mod,
                                                     in.sim));
  }
  return from_empirical(single_receiver
                            ? mc::estimate_capacity(pf.single_at(v), in.sim)
                            : mc::estimate_capacity_mrc(pf.mrc_at(v), in.sim));
}

}  // namespace

SweepSpec sweep_from(const cfg::Config& c) {
  SweepSpec s;
  s.metric = c.get_string("sweep.metric", "outage");
  if (s.metric != "outage" && s.metric != "ber" && s.metric != "capacity") {
    throw cfg::ConfigError("sweep.metric must be outage, ber, or capacity");
  }
  s.receiver = c.get_string("sweep.receiver", "mrc");
  if (s.receiver != "single" && s.receiver != "mrc") {
    throw cfg::ConfigError("sweep.receiver must be single or mrc");
  }
  s.axis = c.get_string("sweep.axis", "gamma0_db");
  if (s.axis != "gamma0_db" && s.axis != "l" && s.axis != "phi") {
    throw cfg::ConfigError("sweep.axis must be gamma0_db, l, or phi");
  }
  if (s.axis == "l" && s.receiver == "single") {
    throw cfg::ConfigError("branch-count axis needs the mrc receiver");
  }
  if (c.has("sweep.values")) {
    for (const std::string& tok : split_list(c.get_string("sweep.values"))) {
      try {
        size_t used = 0;
        s.values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw cfg::ConfigError("sweep.values: not a number: '" + tok + "'");
      }
    }
  } else if (s.axis == "l") {
    s.values = {1.0, 2.0, 4.0};
  } else {
    const double start = c.get_double("sweep.start", 0.0);
    const double stop = c.get_double("sweep.stop", 40.0);
    const double step = c.get_double("sweep.step", 5.0);
    if (!(step > 0.0) || stop < start) {
      throw cfg::ConfigError("sweep grid needs step > 0 and stop >= start");
    }
    for (double v = start; v <= stop + 1e-9 * step; v += step) {
      s.values.push_back(v);
    }
  }
  if (s.values.empty()) throw cfg::ConfigError("sweep grid is empty");
  for (size_t i = 1; i < s.values.size(); ++i) {
    if (s.values[i] <= s.values[i - 1]) {
      throw cfg::ConfigError("sweep grid must be strictly increasing");
    }
  }
  if (s.axis == "l") {
    for (double v : s.values) {
      if (std::abs(v - std::llround(v)) > 1e-9 || v < 1.0 || v > 4.0) {
        throw cfg::ConfigError("branch-count grid must hold integers 1..4");
      }
    }
  }
  const std::string mode = c.get_string("sweep.mode", "all");
  if (mode == "all") {
    s.modes = {"exact", "asymptotic", "mc"};
    if (s.metric == "capacity") s.modes = {"exact", "mc"};
  } else {
    s.modes = split_list(mode);
    if (s.modes.empty()) throw cfg::ConfigError("sweep.mode is empty");
    for (const std::string& m : s.modes) {
      if (m != "exact" && m != "asymptotic" && m != "mc") {
        throw cfg::ConfigError("sweep.mode entries must be exact, asymptotic, "
                               "or mc (or the single word all)");
      }
    }
  }
  return s;
}

void run_sweep(const cfg::Config& c, const SweepSpec& spec, std::ostream& os) {
  const MetricInputs in = inputs_from(c);
  const PointFactory pf(c, spec);

  os << "# terahertz link sweep\n";
  os << "# metric = " << spec.metric << "\n";
  os << "# receiver = " << spec.receiver << "\n";
  os << "# axis = " << spec.axis << "\n";
  {
    os << "# modes =";
    for (const std::string& m : spec.modes) os << " " << m;
    os << "\n";
  }
  for (const auto& [k, v] : c.entries()) {
    os << "# " << k << " = " << v << "\n";
  }
  const PointingGeometry g = cfg::pointing_from(c);
  os << "# resolved.gamma0_db = "
     << fmt("%.6f", linear_to_db(cfg::gamma0_from(c))) << "\n";
  os << "# resolved.s0 = " << fmt("%.6g", g.s0) << "\n";
  os << "# resolved.phi = " << fmt("%.6g", g.phi) << "\n";
  os << spec.axis << ",mode,value,lower,upper,detail,status,note\n";

  for (double v : spec.values) {
    for (const std::string& mode : spec.modes) {
      RowResult row;
      try {
        row = evaluate_cell(spec.metric, mode, spec.receiver == "single", pf,
                            in, v);
      } catch (const std::exception& e) {
        row = RowResult{};
        row.status = "failed";
        row.note = e.what();
      }
      os << fmt("%.6g", v) << "," << mode << "," << fmt("%.10e", row.value)
         << "," << fmt("%.10e", row.lower) << "," << fmt("%.10e", row.upper)
         << "," << row.detail << "," << row.status << ","
         << sanitize_note(row.note) << "\n";
    }
  }
}

int validate(const cfg::Config& c, std::ostream& os) {
  int failures = 0;
  const auto report = [&](const char* name, bool ok, const std::string& txt) {
    os << (ok ? "PASS " : "FAIL ") << name << ": " << txt << "\n";
    if (!ok) ++failures;
  };
  const MetricInputs in = inputs_from(c);
  const MrcChannel combiner = cfg::mrc_from(c);
  const SingleLinkChannel single = cfg::single_link_from(c);
  const MrcChannel one({cfg::ftr_from(c)}, single.pointing(), single.gamma0(),
                       cfg::series_from(c));

  // single-branch combiner against the single-link closed forms
  {
    const double a = outage_mrc(one, in.threshold).value;
    const double b = outage_single(single, in.threshold).value;
    const double rel = std::abs(a - b) / std::max(b, 1e-300);
    report("reduction outage", rel < 1e-3,
           "combiner " + fmt("%.10e", a) + " vs single " + fmt("%.10e", b) +
               " rel " + fmt("%.2e", rel));
    const double ba = ber_mrc(one, in.mod).value;
    const double bb = ber_single_series(single, in.mod).value;
    const double brel = std::abs(ba - bb) / std::max(bb, 1e-300);
    report("reduction ber", brel < 1e-3,
           "combiner " + fmt("%.10e", ba) + " vs single " + fmt("%.10e", bb) +
               " rel " + fmt("%.2e", brel));
    const double ca = capacity_mrc(one, in.epsilon).value;
    const double cb = capacity_single_exact(single).value;
    const double crel = std::abs(ca - cb) / std::max(cb, 1e-300);
    report("reduction capacity", crel < 1e-3,
           "combiner " + fmt("%.10e", ca) + " vs single " + fmt("%.10e", cb) +
               " rel " + fmt("%.2e", crel));
  }

  // density normalization by panel quadrature of the combiner density
  {
    double xscale = 0.0;
    for (int i = 0; i < combiner.branch_count(); ++i) {
      xscale += combiner.branch(i).xi();
    }
    double total = 0.0;
    double lo = 0.0;
    double width = xscale / 8.0;
    double tail = 1.0;
    for (int p = 0; p < 40 && tail > 1e-8; ++p) {
      // 8-point Gauss-Legendre per panel, nodes hard-coded via midpoint form
      static const double xs[4] = {0.1834346424956498, 0.5255324099163290,
                                   0.7966664774136267, 0.9602898564975363};
      static const double ws[4] = {0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
      const double mid = lo + width / 2.0;
      const double half = width / 2.0;
      for (int k = 0; k < 4; ++k) {
        total += half * ws[k] *
                 (mrc_snr_pdf(combiner, mid - half * xs[k]).value +
                  mrc_snr_pdf(combiner, mid + half * xs[k]).value);
      }
      lo += width;
      if (p >= 3) width *= 2.0;
      tail = mrc_snr_survival(combiner, lo).value;
    }
    report("density normalization", std::abs(total + tail - 1.0) < 1e-3,
           "integral " + fmt("%.8f", total) + " tail " + fmt("%.2e", tail));
  }

  // distribution shape on a grid
  {
    bool monotone = true;
    bool bounded = true;
    double prev = 0.0;
    double prev_err = 0.0;
    for (int k = 1; k <= 24; ++k) {
      const double x = db_to_linear(-10.0 + 2.0 * k);
      const MetricResult f = mrc_snr_cdf(combiner, x);
      // Successive points come from independent contour evaluations, so
      // monotonicity only holds to within the two error estimates.
      monotone = monotone && f.value + f.error_abs + prev_err >= prev;
      bounded = bounded && f.value >= 0.0 && f.value <= 1.0;
      prev = f.value;
      prev_err = f.error_abs;
    }
    report("distribution monotone in [0,1]", monotone && bounded,
           "24-point dB grid, final " + fmt("%.6f", prev));
    const double x0 = in.threshold;
    const double gap = std::abs(mrc_snr_survival(combiner, x0).value +
                                mrc_snr_cdf(combiner, x0).value - 1.0);
    report("survival complement", gap < 1e-12, "gap " + fmt("%.2e", gap));
  }

  // analytic against the sampling oracle at the configured point
  {
    const MetricResult oa = outage_mrc(combiner, in.threshold);
    const mc::EmpiricalMetric om =
        mc::estimate_outage_mrc(combiner, in.threshold, in.sim);
    const double sd = std::sqrt(std::max(om.variance, 1e-300));
    const double diff = std::abs(oa.value - om.value);
    report("oracle outage", diff <= 3.0 * sd + 1e-6,
           "analytic " + fmt("%.6e", oa.value) + " empirical " +
               fmt("%.6e", om.value) + " diff " + fmt("%.2e", diff) +
               " limit " + fmt("%.2e", 3.0 * sd + 1e-6));
    const MetricResult ba = ber_mrc(combiner, in.mod);
    const mc::EmpiricalMetric bm = mc::estimate_ber_mrc(combiner, in.mod, in.sim);
    const double bsd = std::sqrt(std::max(bm.variance, 1e-300));
    const double bdiff = std::abs(ba.value - bm.value);
    report("oracle ber", bdiff <= 3.0 * bsd + 1e-6,
           "analytic " + fmt("%.6e", ba.value) + " empirical " +
               fmt("%.6e", bm.value) + " diff " + fmt("%.2e", bdiff) +
               " limit " + fmt("%.2e", 3.0 * bsd + 1e-6));
    const MetricResult ca = capacity_mrc(combiner, in.epsilon);
    const mc::EmpiricalMetric cm = mc::estimate_capacity_mrc(combiner, in.sim);
    const double csd = std::sqrt(std::max(cm.variance, 1e-300));
    const double cdiff = std::abs(ca.value - cm.value);
    report("oracle capacity", cdiff <= 3.0 * csd + 1e-4,
           "analytic " + fmt("%.6e", ca.value) + " empirical " +
               fmt("%.6e", cm.value) + " diff " + fmt("%.2e", cdiff) +
               " limit " + fmt("%.2e", 3.0 * csd + 1e-4));
  }

  // dual analytic paths
  {
    const double b1 = ber_mrc(combiner, in.mod).value;
    const double b2 = ber_mrc_quadrature(combiner, in.mod).value;
    const double rel = std::abs(b1 - b2) / std::max(b1, 1e-12);
    report("dual-path ber", b1 < 1e-6 || rel < 1e-2,
           "closed " + fmt("%.10e", b1) + " quadrature " + fmt("%.10e", b2) +
               " rel " + fmt("%.2e", rel));
    const double c1 = capacity_mrc(combiner, in.epsilon).value;
    const double c2 = capacity_mrc_quadrature(combiner).value;
    const double crel = std::abs(c1 - c2) / std::max(c1, 1e-12);
    report("dual-path capacity", crel < 1e-2,
           "closed " + fmt("%.10e", c1) + " quadrature " + fmt("%.10e", c2) +
               " rel " + fmt("%.2e", crel));
  }

  // high-SNR expansion approaches the exact curve
  {
    const MrcChannel hi = combiner.with_gamma0(db_to_linear(80.0));
    const double ratio = outage_mrc_asymptotic(hi, in.threshold).value /
                         std::max(outage_mrc(hi, in.threshold).value, 1e-300);
    report("asymptotic outage ratio", ratio > 0.9 && ratio < 1.1,
           "ratio at 80 dB " + fmt("%.6f", ratio));
  }

  // sampling reproducibility
  {
    const mc::EmpiricalMetric a =
        mc::estimate_outage_mrc(combiner, in.threshold, in.sim);
    const mc::EmpiricalMetric b =
        mc::estimate_outage_mrc(combiner, in.threshold, in.sim);
    report("seed reproducibility", a.value == b.value && a.ci_low == b.ci_low,
           "estimate " + fmt("%.10e", a.value) + " twice");
  }

  os << (failures == 0 ? "ALL CHECKS PASSED\n"
                       : "CHECKS FAILED: " + std::to_string(failures) + "\n");
  return failures;
}

}  // namespace thz
