#ifndef GSR_CRITERIA_HPP
#define GSR_CRITERIA_HPP

// Sufficient conditions for spectral finiteness. Every detector returns an
// optional certificate; an empty result means "criterion does not apply",
// never "finiteness fails".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsr/bounds.hpp"
#include "gsr/error.hpp"
#include "gsr/smallmat.hpp"
#include "gsr/words.hpp"

namespace gsr {

enum class Criterion { Thm1, ThmA, ThmB, ThmC, ThmD, ThmE, ThmF, ThmG, ThmH, Cor3, Cor4, Prop5, Kozyakin };

inline constexpr Criterion kAllCriteria[] = {
    Criterion::Thm1, Criterion::ThmA, Criterion::ThmB, Criterion::ThmC,  Criterion::ThmD,
    Criterion::ThmE, Criterion::ThmF, Criterion::ThmG, Criterion::ThmH,  Criterion::Cor3,
    Criterion::Cor4, Criterion::Prop5, Criterion::Kozyakin};

inline const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::Thm1: return "Thm1";
    case Criterion::ThmA: return "ThmA";
    case Criterion::ThmB: return "ThmB";
    case Criterion::ThmC: return "ThmC";
    case Criterion::ThmD: return "ThmD";
    case Criterion::ThmE: return "ThmE";
    case Criterion::ThmF: return "ThmF";
    case Criterion::ThmG: return "ThmG";
    case Criterion::ThmH: return "ThmH";
    case Criterion::Cor3: return "Cor3";
    case Criterion::Cor4: return "Cor4";
    case Criterion::Prop5: return "Prop5";
    case Criterion::Kozyakin: return "Kozyakin";
  }
  return "unknown";
}

inline Criterion criterion_from_string(const std::string& s) {
  for (Criterion c : kAllCriteria)
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::invalid_input, "unknown criterion '" + s + "'");
}

struct NamedMatrix {
  std::string label;
  Matrix matrix;
};

struct Certificate {
  Criterion criterion = Criterion::Thm1;
  double value = 0.0;
  Word word;                         // realizing word: rho(A(word))^{1/|word|} = value
  std::optional<Word> optimal_word;  // Thm1: the (A,n)-optimal word w*
  int n = 0;                         // Thm1: n*; Kozyakin: period q
  std::vector<NamedMatrix> witness;
  std::vector<std::pair<std::string, double>> tolerances;
  std::string notes;
  // False when the value came from a bounds run whose gap did not close;
  // the criterion still guarantees finiteness, and [lower, upper] holds rho.
  bool exact = true;
  std::optional<std::pair<double, double>> bracket;
};

struct CriteriaConfig {
  double eq_tol = 1e-9;       // structural gates (transpose closure, templates)
  double member_tol = 1e-9;   // Gram membership in Thm1
  double sym_tol = kSymmetryTol;
  double rank_tol = 1e-10;    // sigma_2 < rank_tol * sigma_1 means rank one
  double word_tol = 1e-9;     // |rho(A(word))^{1/|word|} - value| <= word_tol * (1 + value)
  RefineOptions refine{};     // for criteria whose value is computed
  std::uint64_t budget = kDefaultWordBudget;
  std::optional<std::size_t> cor3_b_index;  // 0-based member forced into the B role
};

namespace detail {

inline bool close(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

/// Index and value of max_k rho(A_k), least index on ties.
inline std::pair<int, double> max_member_rho(const MatrixSet& set, const std::vector<std::size_t>& which) {
  int arg = -1;
  double best = -1.0;
  for (std::size_t k : which) {
    const double r = spectral_radius(set[k]);
    if (r > best * (1 + kTieTol)) {
      best = r;
      arg = static_cast<int>(k);
    }
  }
  return {arg + 1, best};
}

inline std::vector<std::size_t> all_indices(const MatrixSet& set) {
  std::vector<std::size_t> v(set.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = k;
  return v;
}

inline Certificate singleton_certificate(Criterion c, const MatrixSet& set,
                                         const std::vector<std::size_t>& which) {
  const auto [k, r] = max_member_rho(set, which);
  Certificate cert;
  cert.criterion = c;
  cert.value = r;
  cert.word = Word{k};
  return cert;
}

/// Value from refine for criteria that guarantee finiteness without a formula.
inline Certificate computed_certificate(Criterion c, const MatrixSet& set, const CriteriaConfig& cfg,
                                        const std::string& why) {
  const BoundsReport r = refine(set, cfg.refine);
  Certificate cert;
  cert.criterion = c;
  cert.value = r.lower;
  cert.word = r.lower_witness;
  cert.exact = r.converged;
  cert.tolerances = {{"refine_tol", cfg.refine.tol}};
  cert.notes = why + "; value computed by branch-and-bound refinement";
  if (!r.converged) {
    cert.bracket = std::pair{r.lower, r.upper};
    cert.notes += ", gap " + std::to_string(r.gap) + " did not close by depth " +
                  std::to_string(r.completed_depth);
  }
  return cert;
}

}  // namespace detail

/// Thm1: an (A,n)-optimal word w* whose Gram product A(w*)^T A(w*) (or
/// A(w*) A(w*)^T) is itself a product of 2n members gives rho = ||A(w*)||^{1/n}.
/// All norm-tied optimal words and both Gram orders are tried. Throws
/// ErrorKind::budget_exceeded when K^{2n} exceeds the budget.
inline std::optional<Certificate> check_theorem1(const MatrixSet& set, int n, const CriteriaConfig& cfg = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "check_theorem1 needs n >= 1");
  const int K = static_cast<int>(set.size());
  if (word_count(K, 2 * n) > cfg.budget) {
    throw Error(ErrorKind::budget_exceeded, "Gram membership search over " + std::to_string(K) + "^" +
                                                std::to_string(2 * n) + " words exceeds the budget of " +
                                                std::to_string(cfg.budget));
  }
  const OptimalWord opt = optimal_word(set, n, {cfg.budget, cfg.refine.threads});
  const std::vector<Word> tied = opt.ties.empty() ? std::vector<Word>{opt.word} : opt.ties;

  // Targets in preference order: tied words lexicographically, A^T A before A A^T.
  struct Target {
    Word w;
    Matrix m;
    const char* label;
    Matrix gram;
    double trace;
    double value;
  };
  std::vector<Target> targets;
  double max_scale = 1.0;
  for (const Word& w : tied) {
    const Matrix m = evaluate(set, w);
    const double value = std::pow(operator_norm(m), 1.0 / n);
    for (int order = 0; order < 2; ++order) {
      Matrix g = order == 0 ? transpose(m) * m : m * transpose(m);
      double tr = 0.0;
      for (std::size_t i = 0; i < g.dim(); ++i) tr += g(i, i);
      max_scale = std::max(max_scale, frobenius_norm(g));
      targets.push_back({w, m, order == 0 ? "A(w*)^T A(w*)" : "A(w*) A(w*)^T", std::move(g), tr, value});
    }
  }
  std::vector<std::size_t> by_trace(targets.size());
  for (std::size_t i = 0; i < by_trace.size(); ++i) by_trace[i] = i;
  std::sort(by_trace.begin(), by_trace.end(),
            [&](std::size_t x, std::size_t y) { return targets[x].trace < targets[y].trace; });

  std::size_t best = targets.size();
  Word best_v;
  const double d = static_cast<double>(set.dim());
  for (const Word& v : all_words(K, 2 * n, cfg.budget)) {
    const Matrix p = evaluate(set, v);
    double tr = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) tr += p(i, i);
    // approx_equal bounds every entry difference, so traces differ by at most d * tol * scale
    const double slack = d * cfg.member_tol * std::max(max_scale, frobenius_norm(p));
    auto lo = std::lower_bound(by_trace.begin(), by_trace.end(), tr - slack,
                               [&](std::size_t i, double x) { return targets[i].trace < x; });
    for (auto it = lo; it != by_trace.end() && targets[*it].trace <= tr + slack; ++it) {
      const std::size_t t = *it;
      if (t >= best || !approx_equal(p, targets[t].gram, cfg.member_tol)) continue;
      // an approximate match must still reproduce the value through its own spectrum
      if (std::abs(growth_rate(set, v) - targets[t].value) > cfg.word_tol * (1 + targets[t].value)) continue;
      best = t;
      best_v = v;
    }
    if (best == 0) break;
  }
  if (best < targets.size()) {
    const Target& t = targets[best];
    Certificate cert;
    cert.criterion = Criterion::Thm1;
    cert.value = t.value;
    cert.word = best_v;
    cert.optimal_word = t.w;
    cert.n = n;
    cert.witness = {{"A(w*)", t.m}, {t.label, t.gram}};
    cert.tolerances = {{"member_tol", cfg.member_tol}, {"tie_tol", kTieTol}, {"word_tol", cfg.word_tol}};
    cert.notes = std::string("Gram product ") + t.label + " equals A(" + best_v.to_string() + ")";
    return cert;
  }
  return std::nullopt;
}

/// ThmA: all members symmetric.
inline std::optional<Certificate> check_symmetric(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  for (const auto& m : set.members())
    if (!is_symmetric(m, cfg.sym_tol)) return std::nullopt;
  auto cert = detail::singleton_certificate(Criterion::ThmA, set, detail::all_indices(set));
  cert.tolerances = {{"sym_tol", cfg.sym_tol}};
  return cert;
}

/// ThmB: all members normal. For normal M, ||M|| = rho(M), so the
/// depth-1 bounds coincide and the value is max_k rho(A_k).
inline std::optional<Certificate> check_normal(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  for (const auto& m : set.members())
    if (!approx_equal(transpose(m) * m, m * transpose(m), cfg.eq_tol)) return std::nullopt;
  auto cert = detail::singleton_certificate(Criterion::ThmB, set, detail::all_indices(set));
  cert.tolerances = {{"eq_tol", cfg.eq_tol}};
  cert.notes = "value derived: ||M|| = rho(M) for normal M, so depth-1 lower and upper bounds agree";
  return cert;
}

/// ThmC: the set is closed under transposition; delegates to Thm1 at n = 1.
inline std::optional<Certificate> check_transpose_closed(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  for (const auto& m : set.members()) {
    const Matrix t = transpose(m);
    const bool found = std::any_of(set.members().begin(), set.members().end(),
                                   [&](const Matrix& o) { return approx_equal(t, o, cfg.eq_tol); });
    if (!found) return std::nullopt;
  }
  CriteriaConfig c = cfg;
  c.member_tol = std::max(cfg.member_tol, cfg.eq_tol);
  auto cert = check_theorem1(set, 1, c);
  if (!cert) return std::nullopt;
  cert->criterion = Criterion::ThmC;
  cert->tolerances.emplace_back("eq_tol", cfg.eq_tol);
  return cert;
}

/// ThmD: two 2x2 sign matrices.
inline std::optional<Certificate> check_sign_pair(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  for (const auto& m : set.members())
    for (double v : m.entries())
      if (v != 0.0 && v != 1.0 && v != -1.0) return std::nullopt;
  return detail::computed_certificate(Criterion::ThmD, set, cfg, "finiteness guaranteed for 2x2 sign pairs");
}

/// ThmE: 2x2 pair with both determinants negative.
inline std::optional<Certificate> check_negative_determinants(const MatrixSet& set, const CriteriaConfig& = {}) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  const double da = determinant(set[0]), db = determinant(set[1]);
  if (!(da < 0.0 && db < 0.0)) return std::nullopt;
  const double ra = spectral_radius(set[0]), rb = spectral_radius(set[1]);
  const double rab = std::sqrt(spectral_radius(set[0] * set[1]));
  Certificate cert;
  cert.criterion = Criterion::ThmE;
  if (ra >= rb * (1 - kTieTol) && ra >= rab * (1 - kTieTol)) {
    cert.value = ra;
    cert.word = Word{1};
  } else if (rb >= rab * (1 - kTieTol)) {
    cert.value = rb;
    cert.word = Word{2};
  } else {
    cert.value = rab;
    cert.word = Word{1, 2};
  }
  cert.witness = {{"A1 A2", set[0] * set[1]}};
  cert.notes = "det(A1) = " + std::to_string(da) + ", det(A2) = " + std::to_string(db);
  return cert;
}

inline Matrix swap_matrix() { return Matrix::from_rows({{0, 1}, {1, 0}}); }

/// ThmF: L = S R S with S the coordinate swap (either member order).
inline std::optional<Certificate> check_swap_conjugate(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  const Matrix s = swap_matrix();
  if (!approx_equal(set[0], s * set[1] * s, cfg.eq_tol)) return std::nullopt;
  const double rl = spectral_radius(set[0]);
  const double rlr = std::sqrt(spectral_radius(set[0] * set[1]));
  Certificate cert;
  cert.criterion = Criterion::ThmF;
  if (rl >= rlr * (1 - kTieTol)) {
    cert.value = rl;
    cert.word = Word{1};
  } else {
    cert.value = rlr;
    cert.word = Word{1, 2};
  }
  cert.witness = {{"L R", set[0] * set[1]}};
  cert.tolerances = {{"eq_tol", cfg.eq_tol}};
  return cert;
}

/// ThmG: A = [[a,b],[c,d]], B = [[a,-b],[-c,d]].
inline std::optional<Certificate> check_offdiag_flip(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  const Matrix& a = set[0];
  const Matrix flipped = Matrix::from_rows({{a(0, 0), -a(0, 1)}, {-a(1, 0), a(1, 1)}});
  if (!approx_equal(set[1], flipped, cfg.eq_tol)) return std::nullopt;
  const double bc = a(0, 1) * a(1, 0);
  Certificate cert;
  cert.criterion = Criterion::ThmG;
  cert.tolerances = {{"eq_tol", cfg.eq_tol}};
  if (bc >= 0.0) {
    cert.value = spectral_radius(a);
    cert.word = Word{1};
    cert.notes = "bc = " + std::to_string(bc) + " >= 0";
  } else {
    cert.value = std::sqrt(spectral_radius(a * set[1]));
    cert.word = Word{1, 2};
    cert.witness = {{"A B", a * set[1]}};
    cert.notes = "bc = " + std::to_string(bc) + " < 0";
  }
  return cert;
}

inline bool is_rank_one(const Matrix& m, double rank_tol) {
  const auto sv = singular_values(m);
  return sv.size() >= 2 && sv[0] > 0.0 && sv[1] < rank_tol * sv[0];
}

/// ThmH: a pair with a rank-one member.
inline std::optional<Certificate> check_rank_one(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() < 2) return std::nullopt;
  int which = 0;
  for (int k = 0; k < 2 && !which; ++k)
    if (is_rank_one(set[static_cast<std::size_t>(k)], cfg.rank_tol)) which = k + 1;
  if (!which) return std::nullopt;
  auto cert = detail::computed_certificate(Criterion::ThmH, set, cfg,
                                           "member " + std::to_string(which) + " has rank one");
  cert.tolerances.emplace_back("rank_tol", cfg.rank_tol);
  return cert;
}

struct Cor3Roles {
  std::size_t a0 = 0;
  std::vector<std::size_t> a_members;  // includes a0
  std::optional<std::size_t> b_member;
  double b = 0.0, c = 0.0;             // off-diagonal of A_0
  std::string notes;
};

/// Assigns the template roles of the shared-off-diagonal family: A_0 is the
/// first member with a nonzero off-diagonal, members whose off-diagonal is a
/// multiple of (b, c) take the A role, at most one member with off-diagonal
/// a multiple of (sqrt|b|, sqrt|c|) takes the B role.
inline std::optional<Cor3Roles> corollary3_roles(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.dim() != 2 || set.size() < 2) return std::nullopt;
  Cor3Roles roles;
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k](0, 1) != 0.0 || set[k](1, 0) != 0.0) {
      roles.a0 = k;
      break;
    }
  }
  if (cfg.cor3_b_index && *cfg.cor3_b_index == roles.a0) {
    roles.a0 = roles.a0 == 0 ? 1 : 0;
  }
  roles.b = set[roles.a0](0, 1);
  roles.c = set[roles.a0](1, 0);

  // (p, q) parallel to (u, v), scale-relative
  auto parallel = [&](double p, double q, double u, double v) {
    const double scale = std::max({1.0, std::hypot(p, q), std::hypot(u, v)});
    return std::abs(p * v - q * u) <= cfg.eq_tol * scale * scale &&
           (u != 0.0 || v != 0.0 || std::hypot(p, q) <= cfg.eq_tol * scale);
  };
  const double sb = std::sqrt(std::abs(roles.b)), sc = std::sqrt(std::abs(roles.c));
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k == roles.a0) {
      roles.a_members.push_back(k);
      continue;
    }
    const double p = set[k](0, 1), q = set[k](1, 0);
    const bool as_a = parallel(p, q, roles.b, roles.c);
    const bool as_b = parallel(p, q, sb, sc);
    const bool forced_b = cfg.cor3_b_index && *cfg.cor3_b_index == k;
    if (forced_b) {
      if (!as_b) return std::nullopt;
      roles.b_member = k;
      roles.notes += "member " + std::to_string(k + 1) + " assigned the B role by configuration; ";
    } else if (as_a) {
      if (as_b) roles.notes += "member " + std::to_string(k + 1) + " fits both roles, taken as A; ";
      roles.a_members.push_back(k);
    } else if (as_b && !roles.b_member && !cfg.cor3_b_index) {
      roles.b_member = k;
    } else {
      return std::nullopt;
    }
  }
  return roles;
}

/// Cor3: shared off-diagonal ray with bc >= 0 and ||B|| <= max rho(A_i).
inline std::optional<Certificate> check_corollary3(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  const auto roles = corollary3_roles(set, cfg);
  if (!roles) return std::nullopt;
  if (!(roles->b * roles->c >= 0.0)) return std::nullopt;
  const auto [k, max_rho] = detail::max_member_rho(set, roles->a_members);
  double norm_b = 0.0;
  if (roles->b_member) {
    norm_b = operator_norm(set[*roles->b_member]);
    if (norm_b > max_rho * (1 + kTieTol)) return std::nullopt;
  }
  Certificate cert;
  cert.criterion = Criterion::Cor3;
  cert.value = max_rho;
  cert.word = Word{k};
  cert.tolerances = {{"eq_tol", cfg.eq_tol}, {"tie_tol", kTieTol}};
  cert.notes = roles->notes + "A_0 = member " + std::to_string(roles->a0 + 1);
  if (roles->b_member) {
    cert.notes += ", B = member " + std::to_string(*roles->b_member + 1) + " with ||B|| = " + std::to_string(norm_b);
  }
  return cert;
}

/// Cor4: a diagonal member and a 2x2 partner with bc >= 0.
inline std::optional<Certificate> check_corollary4(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  for (std::size_t diag = 0; diag < 2; ++diag) {
    if (!is_diagonal(set[diag], cfg.eq_tol)) continue;
    const Matrix& other = set[1 - diag];
    if (other(0, 1) * other(1, 0) < 0.0) continue;
    auto cert = detail::singleton_certificate(Criterion::Cor4, set, {0, 1});
    cert.tolerances = {{"eq_tol", cfg.eq_tol}};
    cert.notes = "member " + std::to_string(diag + 1) + " diagonal, partner bc = " +
                 std::to_string(other(0, 1) * other(1, 0));
    return cert;
  }
  return std::nullopt;
}

/// Prop5: one diagonal and one antidiagonal member, any d >= 2.
inline std::optional<Certificate> check_prop5(const MatrixSet& set, const CriteriaConfig& cfg = {}) {
  if (set.size() != 2 || set.dim() < 2) return std::nullopt;
  const bool fits = (is_diagonal(set[0], cfg.eq_tol) && is_antidiagonal(set[1], cfg.eq_tol)) ||
                    (is_antidiagonal(set[0], cfg.eq_tol) && is_diagonal(set[1], cfg.eq_tol));
  if (!fits) return std::nullopt;
  auto cert = detail::singleton_certificate(Criterion::Prop5, set, {0, 1});
  cert.tolerances = {{"eq_tol", cfg.eq_tol}};
  return cert;
}

enum class Stability { stable, unstable, undecidable };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::undecidable: return "undecidable";
  }
  return "unknown";
}

struct StabilityVerdict {
  Stability status = Stability::undecidable;
  bool stable = false;
  std::string reason;
  std::vector<double> spectral_radii;  // of the A-role members, in set order
  double margin = 0.0;                 // 1 - max rho
  int witness = 0;                     // 1-based member attaining max rho
};

/// Absolute stability for the shared-off-diagonal family: there rho equals
/// max rho(A_k), so the set is absolutely stable iff every rho(A_k) < 1.
inline StabilityVerdict decide_stability(const MatrixSet& set, double tol = 1e-12, const CriteriaConfig& cfg = {}) {
  StabilityVerdict v;
  const auto cert = check_corollary3(set, cfg);
  if (!cert) {
    v.reason = "shared off-diagonal structure with bc >= 0 and ||B|| <= max rho not detected";
    return v;
  }
  const auto roles = corollary3_roles(set, cfg);
  for (std::size_t k : roles->a_members) v.spectral_radii.push_back(spectral_radius(set[k]));
  const double max_rho = cert->value;
  v.margin = 1.0 - max_rho;
  v.witness = cert->word[0];
  v.stable = max_rho < 1.0 - tol;
  v.status = v.stable ? Stability::stable : Stability::unstable;
  v.reason = std::string("Cor3 family: max rho(A_k) = ") + std::to_string(max_rho) +
             (v.stable ? " < 1" : " >= 1 - tol");
  return v;
}

}  // namespace gsr

#endif  // GSR_CRITERIA_HPP
