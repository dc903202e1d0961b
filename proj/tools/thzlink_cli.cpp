// SPDX-License-Identifier: Apache-2.0
//
// thzlink: performance metrics for terahertz links over two-ray fading
// with beam misalignment.  Subcommands:
//
//   sweep     metric curve over mean SNR, branch count, or jitter ratio (CSV)
//   validate  self-check battery (analytic vs sampling, reductions, shape)
//   mc        sampling estimates at the configured operating point
//   foxh      evaluate a Mellin-Barnes integral described in a JSON file

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "thz/config.hpp"
#include "thz/montecarlo.hpp"
#include "thz/mrc.hpp"
#include "thz/singlelink.hpp"
#include "thz/special/mellin_barnes.hpp"
#include "thz/sweep.hpp"

namespace {

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Stream that is either stdout or an opened file.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<thz::mb::GammaFactor> parse_row(const nlohmann::json& row) {
  std::vector<thz::mb::GammaFactor> out;
  for (const auto& e : row) {
    if (e.is_array()) {
      if (e.size() != 2) {
        throw std::runtime_error("gamma factor entries are a or [a, scale]");
      }
      out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    } else {
      out.push_back({e.get<double>(), 1.0});
    }
  }
  return out;
}

int run_foxh(const std::string& spec_path, const std::string& out_path) {
  std::ifstream f(spec_path);
  if (!f) throw std::runtime_error("cannot open spec file: " + spec_path);
  const nlohmann::json j = nlohmann::json::parse(f);

  std::vector<double> args = j.at("args").get<std::vector<double>>();
  std::vector<thz::mb::GammaFactorGroup> axes;
  for (const auto& ja : j.at("axes")) {
    axes.push_back(thz::mb::GammaFactorGroup::from_mnpq(
        ja.at("m").get<int>(), ja.at("n").get<int>(), parse_row(ja.at("top")),
        parse_row(ja.at("bottom"))));
  }
  std::vector<thz::mb::OuterFactor> outer;
  if (j.contains("outer")) {
    for (const auto& jo : j.at("outer")) {
      thz::mb::OuterFactor of;
      of.a0 = jo.at("a0").get<double>();
      of.weights = jo.at("weights").get<std::vector<int>>();
      of.numerator = jo.value("numerator", true);
      outer.push_back(of);
    }
  }
  std::vector<double> hints;
  if (j.contains("contour_hints")) {
    for (const auto& jh : j.at("contour_hints")) {
      hints.push_back(jh.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : jh.get<double>());
    }
  }
  const double log_prefactor = j.value("log_prefactor", 0.0);

  thz::mb::QuadratureControl qc;
  if (j.contains("control")) {
    const auto& jc = j.at("control");
    qc.t_max = jc.value("t_max", qc.t_max);
    qc.nodes = jc.value("nodes", qc.nodes);
    qc.rel_tol = jc.value("rel_tol", qc.rel_tol);
    qc.max_refine = jc.value("max_refine", qc.max_refine);
  }

  const thz::mb::FoxHSpec spec(args, axes, outer, hints, log_prefactor);
  const thz::MetricResult r = thz::mb::fox_h_multivariate(spec, qc);

  nlohmann::json out;
  out["value"] = r.value;
  out["error_abs"] = r.error_abs;
  out["evaluations"] = r.evaluations;
  out["refinements"] = r.refinements;
  out["converged"] = r.converged;
  {
    nlohmann::json jc = nlohmann::json::array();
    for (double ci : thz::mb::resolve_contours(spec)) jc.push_back(ci);
    out["contours"] = jc;
  }
  OutStream os(out_path);
  os.get() << out.dump(2) << "\n";
  return r.converged ? 0 : 1;
}

void print_empirical(std::ostream& os, const char* name,
                     const thz::mc::EmpiricalMetric& e) {
  os << name << "," << fmt("%.10e", e.value) << "," << fmt("%.10e", e.ci_low)
     << "," << fmt("%.10e", e.ci_high) << "," << e.samples << ","
     << fmt("%.6e", e.variance) << ","
     << (e.undersampled ? "undersampled" : "ok") << "\n";
}

int run_mc(const thz::cfg::Config& c, const std::string& receiver,
           const std::string& out_path) {
  thz::mc::SimConfig sim;
  sim.samples = c.get_int("sim.samples", 100000);
  sim.seed = static_cast<std::uint64_t>(c.get_int("sim.seed", 1));
  const double threshold =
      thz::db_to_linear(c.get_double("metric.threshold_db", 4.0));
  const thz::ModulationSpec mod = thz::cfg::modulation_from(c);

  OutStream out(out_path);
  std::ostream& os = out.get();
  os << "# samples = " << sim.samples << ", seed = " << sim.seed << "\n";
  os << "metric,value,ci_low,ci_high,samples,variance,status\n";
  if (receiver == "single") {
    const thz::SingleLinkChannel ch = thz::cfg::single_link_from(c);
    print_empirical(os, "outage", thz::mc::estimate_outage(ch, threshold, sim));
    print_empirical(os, "ber", thz::mc::estimate_ber(ch, mod, sim));
    print_empirical(os, "capacity", thz::mc::estimate_capacity(ch, sim));
  } else {
    const thz::MrcChannel ch = thz::cfg::mrc_from(c);
    print_empirical(os, "outage",
                    thz::mc::estimate_outage_mrc(ch, threshold, sim));
    print_empirical(os, "ber", thz::mc::estimate_ber_mrc(ch, mod, sim));
    print_empirical(os, "capacity", thz::mc::estimate_capacity_mrc(ch, sim));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terahertz link performance over two-ray fading with beam "
               "misalignment"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string mode;
  std::string receiver = "mrc";
  std::string spec_path;
  long long seed = -1;
  long long samples = -1;
  double tolerance = -1.0;

  const auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "key = value configuration file");
    sc->add_option("--seed", seed, "override sim.seed");
    sc->add_option("--samples", samples, "override sim.samples");
    sc->add_option("--tolerance", tolerance,
                   "override mrc.weight_tol (mixture truncation target)");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "write a metric sweep as CSV");
  add_common(sweep);
  sweep->add_option("--out", out_path, "output file (default stdout)");
  sweep->add_option("--mode", mode,
                    "exact, asymptotic, mc, a comma list, or all");

  CLI::App* val =
      app.add_subcommand("validate", "run the self-check battery");
  add_common(val);
  val->add_option("--out", out_path, "report file (default stdout)");

  CLI::App* mcsub = app.add_subcommand(
      "mc", "sampling estimates at the configured operating point");
  add_common(mcsub);
  mcsub->add_option("--out", out_path, "output file (default stdout)");
  mcsub->add_option("--receiver", receiver, "single or mrc")
      ->check(CLI::IsMember({"single", "mrc"}));

  CLI::App* foxh = app.add_subcommand(
      "foxh", "evaluate a Mellin-Barnes integral described in a JSON file");
  foxh->add_option("spec", spec_path, "JSON description")->required();
  foxh->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    thz::cfg::Config c = config_path.empty()
                             ? thz::cfg::Config()
                             : thz::cfg::Config::from_file(config_path);
    if (seed >= 0) c.set("sim.seed", std::to_string(seed));
    if (samples >= 0) c.set("sim.samples", std::to_string(samples));
    if (tolerance > 0.0) c.set("mrc.weight_tol", fmt("%.17g", tolerance));
    if (!mode.empty()) c.set("sweep.mode", mode);

    if (sweep->parsed()) {
      const thz::SweepSpec spec = thz::sweep_from(c);
      OutStream out(out_path);
      thz::run_sweep(c, spec, out.get());
      return 0;
    }
    if (val->parsed()) {
      OutStream out(out_path);
      const int failures = thz::validate(c, out.get());
      return failures == 0 ? 0 : 1;
    }
    if (mcsub->parsed()) return run_mc(c, receiver, out_path);
    return run_foxh(spec_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
