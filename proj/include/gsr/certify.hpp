#ifndef GSR_CERTIFY_HPP
#define GSR_CERTIFY_HPP

// Full pipeline: structural detectors in fixed order, Thm1 for
// n = 1..n_max, then the Kozyakin dispatch when the shape matches. Every
// certificate is cross-checked against a refine run.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "gsr/bounds.hpp"
#include "gsr/criteria.hpp"
#include "gsr/error.hpp"
#include "gsr/kozyakin.hpp"
#include "gsr/words.hpp"

namespace gsr {

struct CertifyConfig {
  CriteriaConfig criteria{};
  int n_max = 4;
  RefineOptions cross{1e-9, kDefaultWordBudget, 8, 1};
  double cross_tol = 1e-6;
  KozyakinConfig kozyakin{};
  bool run_kozyakin = true;
};

struct KozyakinOutcome {
  std::optional<Example9Result> triangular;
  std::optional<Theorem8Result> decision;
  bool swapped = false;  // the A0 (B0) shape is the second member of the set
};

struct CertifyResult {
  std::vector<Certificate> certificates;
  BoundsReport bounds;
  KozyakinOutcome kozyakin;
  std::vector<std::string> notes;
};

namespace detail {

/// Letters of a two-member word with the members exchanged.
inline Word swap_letters(Word w) {
  for (int& l : w.letters) l = 3 - l;
  return w;
}

inline bool triangular_shape(const MatrixSet& set, std::size_t i0, double tol) {
  const Matrix& b0 = set[i0];
  const Matrix& b1 = set[1 - i0];
  return std::abs(b0(1, 0)) <= tol && std::abs(b0(1, 1) - 1) <= tol && std::abs(b1(0, 0) - 1) <= tol &&
         std::abs(b1(0, 1)) <= tol;
}

}  // namespace detail

/// Throws ErrorKind::inconsistent unless the certificate's word reproduces
/// its value and the value lies in [lower, upper] of `bounds` up to cross_tol.
inline void cross_validate(const MatrixSet& set, const Certificate& c, const BoundsReport& bounds, double word_tol,
                           double cross_tol) {
  const std::string name = to_string(c.criterion);
  if (!c.word.empty()) {
    const double g = growth_rate(set, c.word);
    if (std::abs(g - c.value) > word_tol * (1 + c.value)) {
      throw Error(ErrorKind::inconsistent, name + " value " + std::to_string(c.value) + " but word (" +
                                               c.word.to_string() + ") has growth rate " + std::to_string(g));
    }
  }
  if (c.value < bounds.lower - cross_tol || c.value > bounds.upper + cross_tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s value %.17g outside refine bounds [%.17g, %.17g]", name.c_str(), c.value,
                  bounds.lower, bounds.upper);
    throw Error(ErrorKind::inconsistent, buf);
  }
}

inline KozyakinOutcome kozyakin_dispatch(const MatrixSet& set, const CertifyConfig& cfg,
                                         std::vector<Certificate>& out) {
  KozyakinOutcome k;
  if (set.size() != 2 || set.dim() != 2) return k;
  const double tol = cfg.criteria.eq_tol;
  auto add = [&](Certificate c) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Certificate& o) { return o.criterion == c.criterion; });
    if (seen) return;
    if (k.swapped) c.word = detail::swap_letters(c.word);
    out.push_back(std::move(c));
  };
  for (std::size_t i0 : {std::size_t{0}, std::size_t{1}}) {
    if (!detail::triangular_shape(set, i0, tol)) continue;
    k.swapped = i0 == 1;
    k.triangular = example9_dispatch(set[i0], set[1 - i0], cfg.kozyakin, cfg.criteria);
    if (k.triangular->certificate) add(*k.triangular->certificate);
    if (k.triangular->case_number != 0) return k;
    break;  // no case applies; the frequency analysis may still
  }
  bool swapped = false;
  if (const auto model = detect_kozyakin(set, &swapped)) {
    k.swapped = swapped;
    k.decision = theorem8_decide(*model, cfg.kozyakin);
    if (k.decision->certificate) add(*k.decision->certificate);
  }
  return k;
}

inline CertifyResult certify(const MatrixSet& set, const CertifyConfig& cfg = {}) {
  CertifyResult res;
  using Detector = std::optional<Certificate> (*)(const MatrixSet&, const CriteriaConfig&);
  static constexpr Detector detectors[] = {check_symmetric,      check_normal,       check_transpose_closed,
                                           check_sign_pair,      check_negative_determinants,
                                           check_swap_conjugate, check_offdiag_flip, check_rank_one,
                                           check_corollary3,     check_corollary4,   check_prop5};
  for (Detector d : detectors) {
    try {
      if (auto c = d(set, cfg.criteria)) res.certificates.push_back(std::move(*c));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded) throw;
      res.notes.push_back(e.what());
    }
  }
  for (int n = 1; n <= cfg.n_max; ++n) {
    try {
      if (auto c = check_theorem1(set, n, cfg.criteria)) {
        res.certificates.push_back(std::move(*c));
        break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::budget_exceeded) throw;
      res.notes.push_back("Thm1 stopped at n = " + std::to_string(n) + ": " + e.what());
      break;
    }
  }
  if (cfg.run_kozyakin) {
    try {
      res.kozyakin = kozyakin_dispatch(set, cfg, res.certificates);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::non_convergence) throw;
      res.notes.push_back(std::string("Kozyakin dispatch: ") + e.what());
    }
  }

  res.bounds = refine(set, cfg.cross);
  for (const auto& c : res.certificates) cross_validate(set, c, res.bounds, cfg.criteria.word_tol, cfg.cross_tol);
  return res;
}

}  // namespace gsr

#endif  // GSR_CERTIFY_HPP
