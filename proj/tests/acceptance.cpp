// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gsr/certify.hpp"
#include "gsr/cli.hpp"
#include "gsr/kozyakin.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using gsr::Matrix;
using gsr::MatrixSet;
using gsr::Word;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string data(const std::string& name) { return std::string(GSR_DATA_DIR) + "/" + name; }

gsr::BoundsReport refine_to(const MatrixSet& set, int depth) {
  return gsr::refine(set, gsr::RefineOptions{1e-12, gsr::kDefaultWordBudget, depth, 1});
}

Outcome shear_rotation_certificate() {
  Outcome o;
  const auto t0 = Clock::now();
  gsr::cli::Options opt;
  opt.timing = false;
  const auto r = gsr::cli::cmd_certify(data("shear_rotation.json"), opt);
  const double elapsed = seconds_since(t0);
  o.require(r.exit_code == gsr::cli::kOk, "exit code " + std::to_string(r.exit_code));
  if (!o.pass) return o;
  const auto& certs = r.report["body"]["certificates"];
  const gsr::json* thm1 = nullptr;
  for (const auto& c : certs)
    if (c["criterion"] == "Thm1") thm1 = &c;
  o.require(thm1 != nullptr, "no Thm1 certificate");
  if (!o.pass) return o;
  const double expected = std::sqrt(oracle::shear_rotation_top_root());
  o.require((*thm1)["optimal_word"] == gsr::json::array({1}), "optimal word " + (*thm1)["optimal_word"].dump());
  o.require((*thm1)["n"] == 1, "n = " + (*thm1)["n"].dump());
  o.require((*thm1)["word"] == gsr::json::array({2, 1}), "witness " + (*thm1)["word"].dump());
  const double v = (*thm1)["value"].get<double>();
  o.require(std::abs(v - expected) <= 1e-9, fmt("value %.15g vs %.15g", v, expected));
  o.require(elapsed < 1.0, fmt("took %.3f s", elapsed));
  o.detail = o.pass ? fmt("value %.12f in %.3f s", v, elapsed) : o.detail;
  return o;
}

Outcome sandwich_on_random_sets() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20261019);
  std::uniform_int_distribution<int> kd(1, 3), dd(1, 3);
  for (int trial = 0; trial < 200 && o.pass; ++trial) {
    const MatrixSet set = oracle::random_set(rng, static_cast<std::size_t>(kd(rng)), static_cast<std::size_t>(dd(rng)), -2, 2);
    const auto lo = gsr::lower_bound(set, 8);
    const auto up = gsr::upper_bound(set, 8);
    double running_lower = 0;
    for (int n = 1; n <= 8; ++n) {
      running_lower = std::max(running_lower, gsr::lower_bound(set, n).value);
      const double u = up.per_depth[static_cast<std::size_t>(n - 1)];
      o.require(running_lower <= u + 1e-9 * (1 + u),
                fmt("trial %g depth %g: lower exceeds upper by %.3g", trial, n, running_lower - u));
    }
    o.require(lo.value <= up.value + 1e-9 * (1 + up.value), fmt("trial %g: lower %.15g > upper %.15g", trial, lo.value, up.value));
    const auto rep = refine_to(set, 8);
    for (const auto& row : rep.per_depth)
      o.require(row.lower <= row.upper + 1e-9 * (1 + row.upper), fmt("trial %g refine depth %g", trial, row.depth));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, fmt("took %.1f s", elapsed));
  if (o.pass) o.detail = fmt("200 sets in %.2f s", elapsed);
  return o;
}

Outcome negative_determinant_pairs() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  int done = 0;
  double worst = 0;
  while (done < 100 && o.pass) {
    const MatrixSet set = oracle::random_set(rng, 2, 2, -2, 2);
    if (!(gsr::determinant(set[0]) < 0 && gsr::determinant(set[1]) < 0)) continue;
    ++done;
    const double formula = std::max({oracle::rho2(set[0]), oracle::rho2(set[1]), std::sqrt(oracle::rho2(set[0] * set[1]))});
    const auto cert = gsr::check_negative_determinants(set);
    o.require(cert && std::abs(cert->value - formula) <= 1e-9 * (1 + formula), "detector disagrees with formula");
    const double lower = refine_to(set, 12).lower;
    worst = std::max(worst, std::abs(lower - formula));
    o.require(std::abs(lower - formula) <= 1e-6, fmt("pair %g: refine lower %.12g vs %.12g", done, lower, formula));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, fmt("took %.1f s", elapsed));
  if (o.pass) o.detail = fmt("100 pairs, max deviation %.2e, %.2f s", worst, elapsed);
  return o;
}

Outcome offdiagonal_flip_pairs() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const MatrixSet set({Matrix::from_rows({{a, b}, {c, d}}), Matrix::from_rows({{a, -b}, {-c, d}})});
    const double formula = b * c >= 0 ? oracle::rho2(set[0]) : std::sqrt(oracle::rho2(set[0] * set[1]));
    const auto cert = gsr::check_offdiag_flip(set);
    o.require(cert.has_value(), "detector did not fire");
    if (!o.pass) break;
    o.require(std::abs(cert->value - formula) <= 1e-9 * (1 + formula), fmt("trial %g: %.15g vs %.15g", trial, cert->value, formula));
    const auto rep = refine_to(set, 12);
    worst = std::max(worst, std::abs(rep.lower - formula));
    o.require(std::abs(rep.lower - formula) <= 1e-6 && formula <= rep.upper + 1e-6,
              fmt("trial %g: refine [%.12g, %.12g]", trial, rep.lower, rep.upper));
  }
  if (o.pass) o.detail = fmt("100 pairs, max deviation %.2e", worst);
  return o;
}

Outcome diagonal_antidiagonal() {
  Outcome o;
  const auto in = gsr::parse_set(data("diag_antidiag.json"));
  const Matrix& b = in.set[1];
  o.require(std::abs(gsr::spectral_radius(b) - 0.8) <= 1e-12, fmt("rho(B) = %.17g", gsr::spectral_radius(b)));
  o.require(std::abs(gsr::operator_norm(b) - 1.2) <= 1e-12, fmt("||B|| = %.17g", gsr::operator_norm(b)));
  const auto fixed = gsr::check_prop5(in.set);
  o.require(fixed && std::abs(fixed->value - 0.9) <= 1e-12, "data/diag_antidiag.json value");

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_int_distribution<int> dims(2, 4);
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dims(rng));
    Matrix diag(d), anti(d);
    for (std::size_t i = 0; i < d; ++i) {
      diag(i, i) = u(rng);
      anti(i, d - 1 - i) = u(rng);
    }
    const MatrixSet set = trial % 2 ? MatrixSet({diag, anti}) : MatrixSet({anti, diag});
    const auto cert = gsr::check_prop5(set);
    o.require(cert.has_value(), "detector did not fire");
    if (!o.pass) break;
    const auto rep = refine_to(set, d == 4 ? 10 : 12);
    o.require(std::abs(rep.lower - cert->value) <= 1e-6 && cert->value <= rep.upper + 1e-6,
              fmt("trial %g: %.12g vs refine lower %.12g", trial, cert->value, rep.lower));
  }
  if (o.pass) o.detail = "rho(B) = 0.8, ||B|| = 1.2, 50 random pairs agree";
  return o;
}

Outcome golden_kozyakin() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto model = gsr::build_model(1, 1, 1, 1, 1, 1);
  const auto r = gsr::theorem8_decide(model);
  const double elapsed = seconds_since(t0);
  const double sigma = r.estimate.sigma;
  o.require(sigma >= 0.49 && sigma <= 0.51, fmt("sigma = %.6f", sigma));
  o.require(r.estimate.p == 1 && r.estimate.q == 2, fmt("p/q = %g/%g", r.estimate.p, r.estimate.q));
  o.require(r.certificate.has_value(), "undecided: " + r.reason);
  if (!o.pass) return o;
  const double expected = std::sqrt((3 + std::sqrt(5.0)) / 2);
  o.require(std::abs(r.certificate->value - expected) <= 1e-6, fmt("value %.12g vs %.12g", r.certificate->value, expected));
  gsr::cross_validate(model.set(), *r.certificate, refine_to(model.set(), 8), 1e-9, 1e-6);
  o.require(elapsed < 30.0, fmt("took %.1f s", elapsed));
  if (o.pass) o.detail = fmt("sigma %.6f, value %.12f, %.2f s", sigma, r.certificate->value, elapsed);
  return o;
}

Outcome conjugate_pair_family() {
  Outcome o;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const gsr::CriteriaConfig cfg;
  using Detector = std::optional<gsr::Certificate> (*)(const MatrixSet&, const gsr::CriteriaConfig&);
  const Detector detectors[] = {gsr::check_symmetric,      gsr::check_normal,       gsr::check_transpose_closed,
                                gsr::check_sign_pair,      gsr::check_negative_determinants,
                                gsr::check_swap_conjugate, gsr::check_offdiag_flip, gsr::check_rank_one,
                                gsr::check_corollary3,     gsr::check_corollary4,   gsr::check_prop5};
  int certified = 0, undecided = 0;
  for (int trial = 0; trial < 20 && o.pass; ++trial) {
    const double alpha = u(rng), beta = u(rng);
    const MatrixSet original = fixture::conjugate_pair(alpha, beta);
    for (Detector det : detectors) o.require(!det(original, cfg), fmt("trial %g: a detector fired on the raw pair", trial));
    o.require(!gsr::detect_kozyakin(original), "raw pair mistaken for the model");

    // Q^{-1} B Q and Q^{-1} A Q are the model's A0 and A1
    const auto model = gsr::build_model(0.5, 1, 2, 0.5, beta, alpha);
    const auto r = gsr::theorem8_decide(model);
    if (!r.certificate) {
      ++undecided;
      o.require(!r.reason.empty(), "undecided without a reason");
      continue;
    }
    ++certified;
    o.require(std::isfinite(r.certificate->value), "non-finite value");
    gsr::Certificate mapped = *r.certificate;
    for (int& l : mapped.word.letters) l = 3 - l;
    try {
      gsr::cross_validate(original, mapped, refine_to(original, 10), 1e-6, 1e-6);
    } catch (const gsr::Error& e) {
      o.require(false, fmt("trial %g: ", trial) + e.what());
    }
  }
  if (o.pass) o.detail = std::to_string(certified) + " certified, " + std::to_string(undecided) + " undecided";
  return o;
}

Outcome property_subset() {
  Outcome o;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const MatrixSet set = oracle::random_set(rng, 2, 3, -2, 2);
    const Matrix& a = set[0];
    const double via_gram = std::sqrt(gsr::spectral_radius(gsr::transpose(a) * a));
    o.require(oracle::rel_diff(gsr::operator_norm(a), via_gram) <= 1e-10, "norm identity");

    Word w;
    std::uniform_int_distribution<int> letter(1, 2);
    for (int i = 0; i < 6; ++i) w.letters.push_back(letter(rng));
    for (std::size_t r = 1; r < w.size(); ++r)
      o.require(oracle::rel_diff(gsr::growth_rate(set, w), gsr::growth_rate(set, oracle::rotation(w, r))) <= 1e-9,
                "cyclic invariance of " + w.to_string());

    const double c = 0.25 + trial * 0.05;
    const auto base = refine_to(set, 6), scaled = refine_to(set.scaled(-c), 6);
    o.require(oracle::rel_diff(scaled.lower, c * base.lower) <= 1e-10 && oracle::rel_diff(scaled.upper, c * base.upper) <= 1e-10,
              "scaling");
  }
  for (int K = 1; K <= 4; ++K)
    for (int n = 1; n <= 8; ++n)
      o.require(static_cast<std::int64_t>(gsr::lyndon_words(K, n).size()) == oracle::lyndon_count(K, n),
                fmt("Lyndon count K = %g, n = %g", K, n));

  const MatrixSet big = oracle::random_set(rng, 3, 3, -1, 1);
  const auto one = gsr::refine(big, {1e-12, gsr::kDefaultWordBudget, 9, 1});
  const auto four = gsr::refine(big, {1e-12, gsr::kDefaultWordBudget, 9, 4});
  o.require(one.lower == four.lower && one.upper == four.upper && one.lower_witness == four.lower_witness &&
                one.nodes == four.nodes,
            "threads changed the refine result");
  gsr::cli::Options opt;
  opt.timing = false;
  opt.threads = 1;
  const auto r1 = gsr::cli::cmd_certify(data("shear_rotation.json"), opt);
  opt.threads = 4;
  const auto r4 = gsr::cli::cmd_certify(data("shear_rotation.json"), opt);
  o.require(r1.report["body_hash"] == r4.report["body_hash"], "threads changed the certify report");
  if (o.pass) o.detail = "norm, cyclic, scaling, Lyndon count, determinism";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"shear-rotation certificate", shear_rotation_certificate},
      {"lower <= upper on random sets", sandwich_on_random_sets},
      {"negative determinant pairs", negative_determinant_pairs},
      {"off-diagonal flip pairs", offdiagonal_flip_pairs},
      {"diagonal / antidiagonal pairs", diagonal_antidiagonal},
      {"golden Kozyakin model", golden_kozyakin},
      {"conjugate pair family", conjugate_pair_family},
      {"property subset", property_subset},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
