#ifndef GSR_CLI_HPP
#define GSR_CLI_HPP

// Subcommands behind the gsrcert tool. Each returns an exit code and a
// report document { schema_version, body, body_hash, runtime }; only the
// body is hashed, so timings and thread counts never change the hash.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gsr/bounds.hpp"
#include "gsr/certify.hpp"
#include "gsr/error.hpp"
#include "gsr/io.hpp"
#include "gsr/kozyakin.hpp"

namespace gsr::cli {

enum ExitCode : int { kOk = 0, kInconsistent = 1, kPartial = 2, kUndecided = 3, kInvalidInput = 4 };

struct Options {
  double tol = 1e-9;
  std::optional<int> depth;  // bounds: refine depth (16); certify/kozyakin: cross-check depth (8)
  std::uint64_t budget = kDefaultWordBudget;
  int grid = 4096;
  int horizon = 100000;
  int qmax = 64;
  unsigned threads = 1;
  double eq_tol = 1e-9;
  double member_tol = 1e-9;
  std::optional<std::size_t> cor3_b;  // 1-based
  int n_max = 4;
  bool timing = true;
};

struct CommandResult {
  int exit_code = kOk;
  json report;
  std::string diagnostic;  // for standard error
};

namespace detail {

class Phases {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void stop(const std::string& name) {
    const auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    ms_[name] = std::round(dt * 1000) / 1000;
  }
  const json& ms() const { return ms_; }

 private:
  std::chrono::steady_clock::time_point t0_{};
  json ms_ = json::object();
};

inline json envelope(json body, const Options& opt, const Phases& phases) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  const std::string hash = fnv1a64(body.dump());
  doc["body"] = std::move(body);
  doc["body_hash"] = hash;
  json rt{{"threads", opt.threads}};
  if (opt.timing) rt["timing_ms"] = phases.ms();
  doc["runtime"] = std::move(rt);
  return doc;
}

inline json input_json(const std::string& source, const MatrixSet& set) {
  return json{{"source", source}, {"set_hash", set_hash(set)}, {"members", set.size()}, {"dim", set.dim()},
              {"names", set.names()}};
}

inline int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::inconsistent:
    case ErrorKind::non_convergence:
    case ErrorKind::singular: return kInconsistent;
    case ErrorKind::budget_exceeded: return kPartial;
    default: return kInvalidInput;
  }
}

inline CommandResult failure(const std::string& command, const Error& e, const Options& opt, const Phases& ph) {
  CommandResult r;
  r.exit_code = exit_for(e);
  r.diagnostic = std::string("gsrcert ") + command + ": " + e.what();
  json body{{"command", command}, {"status", "error"}, {"error", json{{"kind", to_string(e.kind())}, {"message", e.what()}}}};
  r.report = envelope(std::move(body), opt, ph);
  return r;
}

inline RefineOptions refine_options(const Options& o, int default_depth) {
  if (o.depth && *o.depth < 1) throw Error(ErrorKind::invalid_input, "--depth must be >= 1");
  if (!(o.tol > 0)) throw Error(ErrorKind::invalid_input, "--tol must be positive");
  return {o.tol, o.budget, o.depth.value_or(default_depth), std::max(1u, o.threads)};
}

inline KozyakinConfig kozyakin_config(const Options& o) {
  KozyakinConfig k;
  k.grid = o.grid;
  k.horizon = o.horizon;
  k.q_max = o.qmax;
  k.budget = o.budget;
  k.threads = std::max(1u, o.threads);
  return k;
}

inline json refine_json(const RefineOptions& r) {
  return json{{"tol", r.tol}, {"budget", r.budget}, {"max_depth", r.max_depth}};
}

}  // namespace detail

inline CommandResult cmd_bounds(const std::string& path, const Options& opt) {
  detail::Phases ph;
  try {
    ph.start();
    const ParsedSet in = parse_set(path);
    ph.stop("parse");
    const RefineOptions ro = detail::refine_options(opt, 16);
    ph.start();
    const BoundsReport rep = refine(in.set, ro);
    ph.stop("refine");
    CommandResult r;
    r.exit_code = rep.converged ? kOk : rep.partial ? kPartial : kUndecided;
    json body;
    body["command"] = "bounds";
    body["input"] = detail::input_json(path, in.set);
    body["config"] = detail::refine_json(ro);
    body["status"] = rep.converged ? "converged" : rep.partial ? "partial" : "gap_open";
    body["bounds"] = to_json(rep);
    r.report = detail::envelope(std::move(body), opt, ph);
    return r;
  } catch (const Error& e) {
    return detail::failure("bounds", e, opt, ph);
  }
}

inline CommandResult cmd_certify(const std::string& path, const Options& opt) {
  detail::Phases ph;
  try {
    ph.start();
    const ParsedSet in = parse_set(path);
    ph.stop("parse");
    CertifyConfig cfg;
    cfg.criteria.eq_tol = opt.eq_tol;
    cfg.criteria.member_tol = opt.member_tol;
    cfg.criteria.budget = opt.budget;
    cfg.criteria.refine = {opt.tol, opt.budget, 16, std::max(1u, opt.threads)};
    if (opt.cor3_b) {
      if (*opt.cor3_b < 1 || *opt.cor3_b > in.set.size())
        throw Error(ErrorKind::invalid_input, "--cor3-b must name a member 1.." + std::to_string(in.set.size()));
      cfg.criteria.cor3_b_index = *opt.cor3_b - 1;
    }
    cfg.n_max = opt.n_max;
    cfg.cross = detail::refine_options(opt, 8);
    cfg.kozyakin = detail::kozyakin_config(opt);

    json body;
    body["command"] = "certify";
    body["input"] = detail::input_json(path, in.set);
    body["config"] = json{{"criteria", to_json(cfg.criteria)},
                          {"n_max", cfg.n_max},
                          {"cross_check", detail::refine_json(cfg.cross)},
                          {"cross_tol", cfg.cross_tol},
                          {"kozyakin", to_json(cfg.kozyakin)}};
    ph.start();
    CertifyResult res;
    try {
      res = certify(in.set, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::inconsistent) throw;
      ph.stop("certify");
      CommandResult r;
      r.exit_code = kInconsistent;
      r.diagnostic = std::string("gsrcert certify: cross-validation failed: ") + e.what();
      body["status"] = "inconsistent";
      body["error"] = json{{"kind", to_string(e.kind())}, {"message", e.what()}};
      r.report = detail::envelope(std::move(body), opt, ph);
      return r;
    }
    ph.stop("certify");

    CommandResult r;
    r.exit_code = res.certificates.empty() ? kUndecided : kOk;
    body["status"] = res.certificates.empty() ? "none" : "certified";
    body["bounds"] = to_json(res.bounds);
    json certs = json::array();
    for (const auto& c : res.certificates) certs.push_back(to_json(c));
    body["certificates"] = std::move(certs);
    if (res.kozyakin.triangular || res.kozyakin.decision) body["kozyakin"] = to_json(res.kozyakin);
    body["notes"] = res.notes;
    r.report = detail::envelope(std::move(body), opt, ph);
    return r;
  } catch (const Error& e) {
    return detail::failure("certify", e, opt, ph);
  }
}

/// Model from explicit parameters, or from the kozyakin block of a set file.
inline CommandResult cmd_kozyakin(const std::optional<KozyakinModel>& params, const std::optional<std::string>& path,
                                  const Options& opt) {
  detail::Phases ph;
  try {
    ph.start();
    KozyakinModel model;
    std::string source = "flags";
    if (path) {
      const ParsedSet in = parse_set(*path);
      if (!in.kozyakin) throw Error(ErrorKind::invalid_input, *path + ": no kozyakin block");
      model = *in.kozyakin;
      source = *path;
    } else if (params) {
      model = build_model(params->a, params->b, params->c, params->d, params->alpha, params->beta);
    } else {
      throw Error(ErrorKind::invalid_input, "give -a -b -c -d --alpha --beta or --set");
    }
    ph.stop("parse");
    KozyakinConfig kc = detail::kozyakin_config(opt);
    if (!(opt.tol > 0)) throw Error(ErrorKind::invalid_input, "--tol must be positive");
    kc.tol = opt.tol;
    const RefineOptions cross = detail::refine_options(opt, 8);
    const MatrixSet set = model.set();

    ph.start();
    const Theorem8Result t8 = theorem8_decide(model, kc);
    ph.stop("decision");

    json body;
    body["command"] = "kozyakin";
    body["input"] = detail::input_json(source, set);
    body["model"] = model_json(model);
    body["config"] = json{{"kozyakin", to_json(kc)}, {"cross_check", detail::refine_json(cross)}};
    body["status"] = t8.certificate ? "certified" : "undecided";
    json decision = to_json(t8);
    body["frequency"] = decision["frequency"];
    decision.erase("frequency");
    body["decision"] = std::move(decision);
    json certs = json::array();
    CommandResult r;
    r.exit_code = kUndecided;
    if (t8.certificate) {
      ph.start();
      const BoundsReport b = refine(set, cross);
      ph.stop("cross_check");
      body["bounds"] = to_json(b);
      try {
        cross_validate(set, *t8.certificate, b, 1e-9, 1e-6);
        r.exit_code = kOk;
      } catch (const Error& e) {
        body["status"] = "inconsistent";
        body["error"] = json{{"kind", to_string(e.kind())}, {"message", e.what()}};
        r.exit_code = kInconsistent;
        r.diagnostic = std::string("gsrcert kozyakin: cross-validation failed: ") + e.what();
      }
      certs.push_back(to_json(*t8.certificate));
    }
    body["certificates"] = std::move(certs);
    r.report = detail::envelope(std::move(body), opt, ph);
    return r;
  } catch (const Error& e) {
    return detail::failure("kozyakin", e, opt, ph);
  }
}

/// Re-derives every certificate in a report from the set file.
inline CommandResult cmd_verify(const std::string& report_path, const std::string& set_path, const Options& opt) {
  detail::Phases ph;
  try {
    ph.start();
    const json doc = parse_json_text(read_file(report_path), report_path);
    const ParsedSet in = parse_set(set_path);
    ph.stop("parse");
    if (!doc.is_object() || !doc.contains("body") || !doc["body"].is_object())
      throw Error(ErrorKind::invalid_input, report_path + ": not a report (no body)");
    const json& body = doc["body"];

    json checks = json::array();
    bool ok = true;
    std::string first_failure;
    auto check = [&](const std::string& what, bool pass, const std::string& detail) {
      checks.push_back(json{{"check", what}, {"ok", pass}, {"detail", detail}});
      if (!pass && ok) first_failure = what + ": " + detail;
      ok = ok && pass;
    };

    const std::string stored_hash = doc.value("body_hash", std::string{});
    const std::string actual_hash = fnv1a64(body.dump());
    check("body_hash", stored_hash == actual_hash,
          stored_hash == actual_hash ? actual_hash : "stored " + stored_hash + ", recomputed " + actual_hash);

    const std::string want = body.contains("input") ? body["input"].value("set_hash", std::string{}) : "";
    const std::string have = set_hash(in.set);
    std::string diff = have;
    if (want != have) {
      diff = "report " + want;
      if (body.contains("input")) {
        const json& i = body["input"];
        diff += " (" + i.value("members", json(0)).dump() + " members, dim " + i.value("dim", json(0)).dump() + ")";
      }
      diff += ", file " + have + " (" + std::to_string(in.set.size()) + " members, dim " +
              std::to_string(in.set.dim()) + ")";
    }
    check("set_hash", want == have, diff);

    if (want == have) {
      if (body.contains("certificates")) {
        const json& certs = body["certificates"];
        for (std::size_t k = 0; k < certs.size(); ++k) {
          const std::string where = "certificates[" + std::to_string(k) + "]";
          const Certificate c = certificate_from_json(certs[k], where);
          double word_tol = 1e-9;
          for (const auto& [name, v] : c.tolerances)
            if (name == "word_tol") word_tol = v;
          try {
            const double g = growth_rate(in.set, c.word);
            char buf[200];
            std::snprintf(buf, sizeof buf, "%s: stored %.17g, word (%s) gives %.17g", to_string(c.criterion), c.value,
                          c.word.to_string().c_str(), g);
            check(where + ".value", std::abs(g - c.value) <= word_tol * (1 + c.value), buf);
            if (c.optimal_word && c.n > 0) {
              const double nv = std::pow(operator_norm(evaluate(in.set, *c.optimal_word)), 1.0 / c.n);
              std::snprintf(buf, sizeof buf, "||A(w*)||^(1/n) = %.17g", nv);
              check(where + ".optimal_word", std::abs(nv - c.value) <= word_tol * (1 + c.value), buf);
            }
          } catch (const Error& e) {
            check(where + ".word", false, e.what());
          }
        }
      }
      if (body.contains("bounds") && body["bounds"].contains("lower_witness") &&
          !body["bounds"]["lower_witness"].empty() && body["bounds"]["lower"].is_number()) {
        const Word w = word_from_json(body["bounds"]["lower_witness"], "bounds.lower_witness");
        const double lower = body["bounds"]["lower"].get<double>();
        const double g = growth_rate(in.set, w);
        char buf[160];
        std::snprintf(buf, sizeof buf, "stored %.17g, witness gives %.17g", lower, g);
        check("bounds.lower", std::abs(g - lower) <= 1e-9 * (1 + lower), buf);
      }
    }
    ph.stop("verify");

    CommandResult r;
    r.exit_code = ok ? kOk : kInconsistent;
    if (!ok) r.diagnostic = "gsrcert verify: " + first_failure;
    json out;
    out["command"] = "verify";
    out["report"] = report_path;
    out["input"] = detail::input_json(set_path, in.set);
    out["status"] = ok ? "verified" : "mismatch";
    out["checks"] = std::move(checks);
    r.report = detail::envelope(std::move(out), opt, ph);
    return r;
  } catch (const Error& e) {
    return detail::failure("verify", e, opt, ph);
  } catch (const json::exception& e) {
    return detail::failure("verify", Error(ErrorKind::invalid_input, report_path + ": " + e.what()), opt, ph);
  }
}

}  // namespace gsr::cli

#endif  // GSR_CLI_HPP
