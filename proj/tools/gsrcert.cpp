// gsrcert: bounds, finiteness certificates and report verification for
// finite sets of real matrices.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gsr/cli.hpp"

namespace {

void add_common(CLI::App* app, gsr::cli::Options& o, std::optional<int>& depth, std::string& out, bool& no_timing) {
  app->add_option("--tol", o.tol, "gap tolerance (bounds, certify) or Barabanov tolerance (kozyakin)");
  app->add_option("--depth", depth, "refine depth (bounds: 16, cross-check: 8)");
  app->add_option("--budget", o.budget, "word enumeration budget");
  app->add_option("--threads", o.threads, "worker threads for enumeration")->check(CLI::Range(1u, 256u));
  app->add_option("--out", out, "write the report here instead of standard output");
  app->add_flag("--no-timing", no_timing, "omit per-phase timings from the report");
}

void add_kozyakin_knobs(CLI::App* app, gsr::cli::Options& o) {
  app->add_option("--grid", o.grid, "angular grid size for the Barabanov iteration");
  app->add_option("--horizon", o.horizon, "trajectory steps counted after burn-in");
  app->add_option("--qmax", o.qmax, "largest denominator for the frequency");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized spectral radius bounds and finiteness certificates"};
  app.require_subcommand(1);

  gsr::cli::Options opt;
  std::optional<int> depth;
  std::string out;
  bool no_timing = false;

  std::string set_path, report_path;
  auto* bounds = app.add_subcommand("bounds", "two-sided bounds by branch-and-bound refinement");
  bounds->add_option("set", set_path, "set document")->required();
  add_common(bounds, opt, depth, out, no_timing);

  auto* certify = app.add_subcommand("certify", "run every finiteness criterion and cross-check");
  certify->add_option("set", set_path, "set document")->required();
  add_common(certify, opt, depth, out, no_timing);
  add_kozyakin_knobs(certify, opt);
  certify->add_option("--eq-tol", opt.eq_tol, "tolerance for structural tests");
  certify->add_option("--member-tol", opt.member_tol, "tolerance for Gram membership");
  certify->add_option("--nmax", opt.n_max, "largest n for the optimal-word criterion");
  std::size_t cor3_b = 0;
  auto* cor3_opt = certify->add_option("--cor3-b", cor3_b, "member (1-based) forced into the B role");

  auto* koz = app.add_subcommand("kozyakin", "switching frequency and finiteness for Kozyakin's model");
  double a = 0, b = 0, c = 0, d = 0, alpha = 1, beta = 1;
  std::string koz_set;
  auto* oa = koz->add_option("-a", a, "A0 = alpha [[a, b], [0, 1]]");
  auto* ob = koz->add_option("-b", b);
  auto* oc = koz->add_option("-c", c, "A1 = beta [[1, 0], [c, d]]");
  auto* od = koz->add_option("-d", d);
  koz->add_option("--alpha", alpha);
  koz->add_option("--beta", beta);
  auto* oset = koz->add_option("--set", koz_set, "set document with a kozyakin block");
  for (auto* o : {oa, ob, oc, od}) o->excludes(oset);
  add_common(koz, opt, depth, out, no_timing);
  add_kozyakin_knobs(koz, opt);

  auto* verify = app.add_subcommand("verify", "re-derive a report's certificates from the set");
  verify->add_option("report", report_path, "report document")->required();
  verify->add_option("set", set_path, "set document")->required();
  verify->add_option("--out", out, "write the verification report here");
  verify->add_flag("--no-timing", no_timing, "omit per-phase timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gsr::cli::kInvalidInput;
  }
  opt.depth = depth;
  opt.timing = !no_timing;
  if (*cor3_opt) opt.cor3_b = cor3_b;

  gsr::cli::CommandResult r;
  if (*bounds) {
    r = gsr::cli::cmd_bounds(set_path, opt);
  } else if (*certify) {
    r = gsr::cli::cmd_certify(set_path, opt);
  } else if (*koz) {
    std::optional<gsr::KozyakinModel> params;
    if (*oa || *ob || *oc || *od) {
      if (!(*oa && *ob && *oc && *od)) {
        std::cerr << "gsrcert kozyakin: -a, -b, -c and -d go together\n";
        return gsr::cli::kInvalidInput;
      }
      params = gsr::KozyakinModel{a, b, c, d, alpha, beta};
    }
    r = gsr::cli::cmd_kozyakin(params, *oset ? std::optional<std::string>(koz_set) : std::nullopt, opt);
  } else {
    r = gsr::cli::cmd_verify(report_path, set_path, opt);
  }

  if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
  const std::string text = r.report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) {
      std::cerr << "gsrcert: cannot write " << out << "\n";
      return gsr::cli::kInvalidInput;
    }
  }
  return r.exit_code;
}
