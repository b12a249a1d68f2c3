#ifndef GSR_BOUNDS_HPP
#define GSR_BOUNDS_HPP

// Two-sided bounds on the generalized spectral radius
//
//   sup_n max_{|w|=n} rho(A(w))^{1/n}  =  rho(A)  =  inf_n max_{|w|=n} ||A(w)||^{1/n}.
//
// Lower bounds scan Lyndon words (rho is invariant under rotation), upper
// bounds scan every word of a depth (norms are not). Both scans walk the
// prefix tree depth-first, reusing prefix products, and are partitioned by
// first letter. Partitions never share state, so the result does not depend
// on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/smallmat.hpp"
#include "gsr/words.hpp"

namespace gsr {

struct EnumerationOptions {
  std::uint64_t budget = kDefaultWordBudget;  // prefix products formed, per call
  unsigned threads = 1;
};

/// Relative tolerance under which two norms / growth rates count as tied.
inline constexpr double kTieTol = 1e-12;

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPruneSlack = 1e-11;  // log-domain

struct Candidate {
  Word word;
  double log_value;  // log of the norm / spectral radius of the product
};

struct ScanResult {
  double log_max = kNegInf;
  std::vector<Candidate> near;  // words within kTieTol of log_max
  std::uint64_t nodes = 0;
  bool complete = true;

  static constexpr std::size_t kMaxNear = 4096;
  bool near_truncated = false;

  void offer(const std::vector<int>& letters, double log_value) {
    if (log_value > log_max) {
      log_max = log_value;
      std::erase_if(near, [&](const Candidate& c) { return c.log_value < log_max - kTieTol; });
    }
    if (log_value == kNegInf) {
      if (near.empty()) near.push_back({Word(letters), log_value});
      return;
    }
    if (log_value >= log_max - kTieTol) {
      if (near.size() < kMaxNear) {
        near.push_back({Word(letters), log_value});
      } else {
        near_truncated = true;
      }
    }
  }

  /// Lexicographically least near-maximal word.
  const Candidate* best() const {
    const Candidate* b = nullptr;
    for (const auto& c : near)
      if (!b || c.word < b->word) b = &c;
    return b;
  }
};

inline ScanResult merge(std::vector<ScanResult>& parts, std::uint64_t budget) {
  ScanResult out;
  for (auto& p : parts) {
    out.nodes += p.nodes;
    out.complete = out.complete && p.complete;
    out.near_truncated = out.near_truncated || p.near_truncated;
    out.log_max = std::max(out.log_max, p.log_max);
  }
  for (auto& p : parts)
    for (auto& c : p.near)
      if (c.log_value >= out.log_max - kTieTol || out.log_max == kNegInf) out.near.push_back(std::move(c));
  std::sort(out.near.begin(), out.near.end(),
            [](const Candidate& a, const Candidate& b) { return a.word < b.word; });
  if (out.nodes > budget) out.complete = false;
  return out;
}

/// Runs fn(first_letter) for every letter, at most `threads` at a time.
inline std::vector<ScanResult> run_partitions(int K, unsigned threads,
                                              const std::function<ScanResult(int)>& fn) {
  std::vector<ScanResult> results(static_cast<std::size_t>(K));
  const unsigned workers = std::min<unsigned>(std::max(1u, threads), static_cast<unsigned>(K));
  if (workers <= 1) {
    for (int k = 1; k <= K; ++k) results[static_cast<std::size_t>(k - 1)] = fn(k);
    return results;
  }
  std::atomic<int> next{1};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k <= K; k = next++) {
        try {
          results[static_cast<std::size_t>(k - 1)] = fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Max of log||A(w)|| over all words of length n with first letter `first`.
/// log_tail[j] (j < n) bounds log max_{|v|=j} ||A(v)||; a prefix p is
/// dropped when log||A(p)|| + log_tail[n-|p|] falls below the best value
/// seen (or `floor`, a known lower bound on the answer).
inline ScanResult scan_norms(const MatrixSet& set, int n, int first,
                             const std::vector<double>& log_tail, double floor,
                             std::uint64_t budget) {
  ScanResult res;
  const int K = static_cast<int>(set.size());
  std::vector<ScaledProduct> prefix(static_cast<std::size_t>(n) + 1, ScaledProduct(set.dim()));
  std::vector<int> letters(static_cast<std::size_t>(n));
  Matrix scratch(set.dim());

  std::function<void(int)> dfs = [&](int t) {
    if (!res.complete) return;
    if (++res.nodes > budget) {
      res.complete = false;
      return;
    }
    const auto& p = prefix[static_cast<std::size_t>(t)];
    const double log_p = p.log_norm();
    if (t == n) {
      res.offer(letters, log_p);
      return;
    }
    const double bar = std::max(res.log_max, floor);
    if (log_p + log_tail[static_cast<std::size_t>(n - t)] + kPruneSlack < bar) return;
    for (int k = 1; k <= K; ++k) {
      letters[static_cast<std::size_t>(t)] = k;
      prefix[static_cast<std::size_t>(t) + 1] = p;
      prefix[static_cast<std::size_t>(t) + 1].extend(set.letter(k), scratch);
      dfs(t + 1);
    }
  };
  letters[0] = first;
  prefix[1] = ScaledProduct(set.letter(first), 0);
  dfs(1);
  return res;
}

/// Max of log rho(A(w)) over Lyndon words of length n starting with `first`
/// (recursive Fredricksen-Kessler-Maiorana generation, which walks the same
/// prefix tree as Duval's algorithm). With `log_tail` non-empty, prefixes
/// that cannot exceed max(best seen, floor) are dropped.
inline ScanResult scan_lyndon(const MatrixSet& set, int n, int first,
                              const std::vector<double>& log_tail, double floor,
                              std::uint64_t budget) {
  ScanResult res;
  const int K = static_cast<int>(set.size());
  const bool prune = !log_tail.empty();
  std::vector<ScaledProduct> prefix(static_cast<std::size_t>(n) + 1, ScaledProduct(set.dim()));
  std::vector<int> a(static_cast<std::size_t>(n) + 1, 0);  // 1-based letters, a[0] sentinel
  Matrix scratch(set.dim());

  auto word_of = [&] { return std::vector<int>(a.begin() + 1, a.end()); };

  std::function<void(int, int)> gen;
  auto place = [&](int t, int letter, int period) {
    if (!res.complete) return;
    if (++res.nodes > budget) {
      res.complete = false;
      return;
    }
    a[static_cast<std::size_t>(t)] = letter;
    auto& p = prefix[static_cast<std::size_t>(t)];
    p = prefix[static_cast<std::size_t>(t) - 1];
    p.extend(set.letter(letter), scratch);
    if (prune && t < n) {
      const double bar = std::max(res.log_max, floor);
      if (p.log_norm() + log_tail[static_cast<std::size_t>(n - t)] + kPruneSlack < bar) return;
    }
    gen(t + 1, period);
  };
  gen = [&](int t, int period) {
    if (t > n) {
      if (period == n) res.offer(word_of(), prefix[static_cast<std::size_t>(n)].log_spectral_radius());
      return;
    }
    const int base = a[static_cast<std::size_t>(t - period)];
    place(t, base, period);
    for (int j = base + 1; j <= K; ++j) place(t, j, t);
  };

  a[1] = first;
  prefix[1] = ScaledProduct(set.letter(first), 0);
  res.nodes = 1;
  if (n == 1) {
    res.offer(word_of(), prefix[1].log_spectral_radius());
  } else {
    bool keep = true;
    if (prune) {
      const double bar = floor;
      keep = prefix[1].log_norm() + log_tail[static_cast<std::size_t>(n - 1)] + kPruneSlack >= bar;
    }
    if (keep) gen(2, 1);
  }
  return res;
}

inline ScanResult norm_depth(const MatrixSet& set, int n, const std::vector<double>& log_tail,
                             double floor, const EnumerationOptions& opt) {
  auto parts = run_partitions(static_cast<int>(set.size()), opt.threads, [&](int first) {
    return scan_norms(set, n, first, log_tail, floor, opt.budget);
  });
  return merge(parts, opt.budget);
}

inline ScanResult lyndon_depth(const MatrixSet& set, int n, const std::vector<double>& log_tail,
                               double floor, const EnumerationOptions& opt) {
  auto parts = run_partitions(static_cast<int>(set.size()), opt.threads, [&](int first) {
    return scan_lyndon(set, n, first, log_tail, floor, opt.budget);
  });
  return merge(parts, opt.budget);
}

/// Submultiplicative bound for depth n from exact maxima at smaller depths.
inline double split_bound(const std::vector<double>& log_tail, int n) {
  double b = std::numeric_limits<double>::infinity();
  for (int j = 1; j < n; ++j)
    b = std::min(b, log_tail[static_cast<std::size_t>(j)] + log_tail[static_cast<std::size_t>(n - j)]);
  return b;
}

inline double rate(double log_value, int n) { return std::exp(log_value / static_cast<double>(n)); }

}  // namespace detail

struct LowerBound {
  double value = 0.0;
  Word witness;
  int completed_depth = 0;
  bool partial = false;
  std::uint64_t nodes = 0;
};

/// max over n <= max_depth and Lyndon words w of length n of rho(A(w))^{1/n};
/// the witness is the shortest, then lexicographically least, word within
/// kTieTol of the maximum. Budget exhaustion flags the result partial.
inline LowerBound lower_bound(const MatrixSet& set, int max_depth, const EnumerationOptions& opt = {}) {
  if (max_depth < 1) throw Error(ErrorKind::invalid_input, "lower_bound needs max_depth >= 1");
  LowerBound out;
  double best = detail::kNegInf;  // log growth rate
  for (int n = 1; n <= max_depth; ++n) {
    EnumerationOptions o = opt;
    o.budget = opt.budget - std::min(opt.budget, out.nodes);
    auto r = detail::lyndon_depth(set, n, {}, detail::kNegInf, o);
    out.nodes += r.nodes;
    if (const auto* c = r.best(); c && (out.witness.empty() || c->log_value / n > best + kTieTol)) {
      best = c->log_value / n;
      out.witness = c->word;
    }
    if (!r.complete) {
      out.partial = true;
      break;
    }
    out.completed_depth = n;
  }
  out.value = std::exp(best);
  return out;
}

struct UpperBound {
  double value = std::numeric_limits<double>::infinity();
  int depth = 0;  // depth attaining the running minimum
  int completed_depth = 0;
  bool partial = false;
  std::vector<double> per_depth;  // max ||A(w)||^{1/n}, n = 1..completed_depth
  std::uint64_t nodes = 0;
};

/// min over completed n <= max_depth of max_{|w|=n} ||A(w)||^{1/n}.
inline UpperBound upper_bound(const MatrixSet& set, int max_depth, const EnumerationOptions& opt = {}) {
  if (max_depth < 1) throw Error(ErrorKind::invalid_input, "upper_bound needs max_depth >= 1");
  UpperBound out;
  std::vector<double> log_tail{0.0};
  for (int n = 1; n <= max_depth; ++n) {
    EnumerationOptions o = opt;
    o.budget = opt.budget - std::min(opt.budget, out.nodes);
    auto r = detail::norm_depth(set, n, log_tail, detail::kNegInf, o);
    out.nodes += r.nodes;
    if (!r.complete) {
      out.partial = true;
      break;
    }
    log_tail.push_back(r.log_max);
    const double u = detail::rate(r.log_max, n);
    out.per_depth.push_back(u);
    if (u < out.value) {
      out.value = u;
      out.depth = n;
    }
    out.completed_depth = n;
  }
  if (out.completed_depth == 0) {
    throw Error(ErrorKind::budget_exceeded, "upper_bound: budget exhausted before depth 1 completed");
  }
  return out;
}

struct OptimalWord {
  Word word;                // lexicographically least among norm-tied maximizers
  double norm = 0.0;        // ||A(word)||
  std::vector<Word> ties;   // all words within kTieTol of the maximum, sorted
};

/// An (A,n)-optimal word: a length-n word maximizing ||A(w)||.
/// Throws ErrorKind::budget_exceeded when the scan cannot complete.
inline OptimalWord optimal_word(const MatrixSet& set, int n, const EnumerationOptions& opt = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "optimal_word needs n >= 1");
  std::vector<double> log_tail{0.0};
  std::uint64_t used = 0;
  for (int j = 1; j <= n; ++j) {
    EnumerationOptions o = opt;
    o.budget = opt.budget - std::min(opt.budget, used);
    auto r = detail::norm_depth(set, j, log_tail, detail::kNegInf, o);
    used += r.nodes;
    if (!r.complete) {
      throw Error(ErrorKind::budget_exceeded,
                  "optimal_word: depth " + std::to_string(j) + " exceeds the budget of " +
                      std::to_string(opt.budget));
    }
    if (j < n) {
      log_tail.push_back(r.log_max);
      continue;
    }
    OptimalWord out;
    const auto* b = r.best();
    out.word = b->word;
    out.norm = std::exp(b->log_value);
    for (const auto& c : r.near) out.ties.push_back(c.word);
    return out;
  }
  return {};
}

struct DepthRow {
  int depth = 0;
  std::optional<double> lower_at;  // best growth rate found at this depth (pruned scan)
  double upper_at = 0.0;           // max norm rate at this depth
  double lower = 0.0;              // running max
  double upper = 0.0;              // running min
};

struct BoundsReport {
  double lower = 0.0;
  Word lower_witness;
  int lower_depth = 0;
  double upper = std::numeric_limits<double>::infinity();
  int upper_depth = 0;
  double gap = std::numeric_limits<double>::infinity();
  std::vector<DepthRow> per_depth;
  int completed_depth = 0;
  bool partial = false;    // budget exhausted
  bool converged = false;  // gap <= tol
  std::uint64_t nodes = 0;
};

struct RefineOptions {
  double tol = 1e-9;
  std::uint64_t budget = kDefaultWordBudget;
  int max_depth = 16;
  unsigned threads = 1;
};

/// Branch-and-bound refinement of the lower/upper sandwich, one depth at a
/// time. At depth n the Lyndon scan drops a prefix p once
/// ||A(p)|| * N_{n-|p|} cannot beat lower^n, where N_j is the exact maximal
/// norm at the completed depth j; the norm scan prunes the same way against
/// its running maximum, so completed depths report exact maxima. Incomplete
/// depths never touch the upper bound.
inline BoundsReport refine(const MatrixSet& set, const RefineOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorKind::invalid_input, "refine needs tol > 0");
  BoundsReport rep;
  std::vector<double> log_tail{0.0};
  double lower_log = detail::kNegInf;
  double upper_log = std::numeric_limits<double>::infinity();

  for (int n = 1; n <= opt.max_depth; ++n) {
    if (rep.nodes >= opt.budget) {
      rep.partial = true;
      break;
    }
    EnumerationOptions o{opt.budget - rep.nodes, opt.threads};
    const double floor = lower_log == detail::kNegInf ? detail::kNegInf : n * lower_log;
    auto lo = detail::lyndon_depth(set, n, log_tail, floor, o);
    rep.nodes += lo.nodes;

    DepthRow row;
    row.depth = n;
    if (const auto* c = lo.best()) {
      const double g = c->log_value / n;
      row.lower_at = std::exp(g);
      if (rep.lower_witness.empty() || g > lower_log + kTieTol) {
        lower_log = g;
        rep.lower_witness = c->word;
        rep.lower_depth = n;
      }
    }
    if (!lo.complete) {
      rep.partial = true;
      break;
    }

    o.budget = opt.budget - std::min(opt.budget, rep.nodes);
    const double norm_floor = lower_log == detail::kNegInf ? detail::kNegInf : n * lower_log - 1e-10;
    auto up = detail::norm_depth(set, n, log_tail, norm_floor, o);
    rep.nodes += up.nodes;
    if (up.complete && up.near.empty()) {
      // every branch fell under the floor through rounding; rescan unpruned
      o.budget = opt.budget - std::min(opt.budget, rep.nodes);
      up = detail::norm_depth(set, n, log_tail, detail::kNegInf, o);
      rep.nodes += up.nodes;
    }
    if (!up.complete) {
      rep.partial = true;
      break;
    }
    log_tail.push_back(up.log_max);
    const double u = up.log_max / n;
    if (u < upper_log) {
      upper_log = u;
      rep.upper_depth = n;
    }
    row.upper_at = std::exp(u);
    row.lower = std::exp(lower_log);
    row.upper = std::exp(upper_log);
    rep.per_depth.push_back(row);
    rep.completed_depth = n;

    if (row.upper - row.lower <= opt.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.lower = std::exp(lower_log);
  rep.upper = std::exp(upper_log);
  rep.gap = rep.upper - rep.lower;
  return rep;
}

/// The set conjugated by diag(exp(s)).
inline MatrixSet diagonally_scaled(const MatrixSet& set, const std::vector<double>& s) {
  std::vector<Matrix> out;
  for (const auto& m : set.members()) {
    Matrix c = m;
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) c(i, j) = m(i, j) * std::exp(s[i] - s[j]);
    out.push_back(std::move(c));
  }
  return MatrixSet(std::move(out), set.names());
}

struct ScaledUpperBound {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> log_scaling;  // D = diag(exp(log_scaling))
  UpperBound bound;
};

/// Upper bound computed in the norm x -> ||D^{-1} x|| for a diagonal D
/// chosen to minimize the depth-1 bound max_k ||D A_k D^{-1}||. Any
/// invertible D gives a valid bound, since similarity preserves rho(A).
inline ScaledUpperBound scaled_upper_bound(const MatrixSet& set, int max_depth,
                                           const EnumerationOptions& opt = {}) {
  const std::size_t d = set.dim();
  std::vector<double> s(d, 0.0);
  auto objective = [&](const std::vector<double>& x) {
    double m = 0.0;
    const MatrixSet scaled = diagonally_scaled(set, x);
    for (const auto& a : scaled.members()) m = std::max(m, operator_norm(a));
    return m;
  };
  double best = objective(s);
  for (int round = 0; round < 6; ++round) {
    for (std::size_t i = 1; i < d; ++i) {
      // coarse scan, then golden-section search around the best grid point
      double bx = s[i];
      for (int g = -40; g <= 40; ++g) {
        auto x = s;
        x[i] = s[i] + 0.5 * g;
        const double f = objective(x);
        if (f < best) {
          best = f;
          bx = x[i];
        }
      }
      double lo = bx - 0.5, hi = bx + 0.5;
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 80; ++it) {
        const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
        auto x1 = s, x2 = s;
        x1[i] = m1;
        x2[i] = m2;
        if (objective(x1) < objective(x2)) hi = m2; else lo = m1;
      }
      auto x = s;
      x[i] = 0.5 * (lo + hi);
      if (const double f = objective(x); f < best) {
        best = f;
        bx = x[i];
      }
      s[i] = bx;
    }
  }
  ScaledUpperBound out;
  out.log_scaling = s;
  out.bound = upper_bound(diagonally_scaled(set, s), max_depth, opt);
  out.value = out.bound.value;
  return out;
}

}  // namespace gsr

#endif  // GSR_BOUNDS_HPP
