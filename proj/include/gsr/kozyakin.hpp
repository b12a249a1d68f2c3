#ifndef GSR_KOZYAKIN_HPP
#define GSR_KOZYAKIN_HPP

// Kozyakin's two-parameter family
//
//   A0 = alpha [[a, b], [0, 1]],   A1 = beta [[1, 0], [c, d]],
//
// under condition (K): alpha, beta > 0, bc >= 1 >= a > 0, d > 0. Here the set
// has spectral finiteness iff the switching frequency of its extremal
// trajectories is rational. The frequency is estimated from a Barabanov norm
// approximated on a grid of the projective line.
//
// Word letters: 1 selects A0, 2 selects A1. Switching sequences use the
// literal subscripts 0 and 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsr/bounds.hpp"
#include "gsr/criteria.hpp"
#include "gsr/error.hpp"
#include "gsr/smallmat.hpp"
#include "gsr/words.hpp"

namespace gsr {

struct KozyakinModel {
  double a = 1, b = 1, c = 1, d = 1, alpha = 1, beta = 1;

  Matrix a0() const { return alpha * Matrix::from_rows({{a, b}, {0, 1}}); }
  Matrix a1() const { return beta * Matrix::from_rows({{1, 0}, {c, d}}); }
  MatrixSet set() const { return MatrixSet({a0(), a1()}, {"A0", "A1"}); }
};

/// The first inequality of condition (K) that fails, if any.
inline std::optional<std::string> condition_k_violation(const KozyakinModel& m) {
  for (double v : {m.a, m.b, m.c, m.d, m.alpha, m.beta})
    if (!std::isfinite(v)) return "parameters must be finite";
  if (!(m.alpha > 0)) return "alpha > 0 violated";
  if (!(m.beta > 0)) return "beta > 0 violated";
  if (!(m.b * m.c >= 1)) return "bc >= 1 violated";
  if (!(m.a <= 1)) return "a <= 1 violated";
  if (!(m.a > 0)) return "a > 0 violated";
  if (!(m.d > 0)) return "d > 0 violated";
  return std::nullopt;
}

inline KozyakinModel build_model(double a, double b, double c, double d, double alpha, double beta) {
  KozyakinModel m{a, b, c, d, alpha, beta};
  if (auto why = condition_k_violation(m)) throw Error(ErrorKind::condition_k, "condition (K): " + *why);
  return m;
}

struct KozyakinConfig {
  int grid = 4096;
  double tol = 1e-9;            // Collatz-Wielandt bracket: max/min - 1
  int max_sweeps = 20000;
  int burn_in = 1000;
  int horizon = 100000;
  int q_max = 64;
  double rational_tol = 1e-3;
  double value_tol = 1e-6;      // periodic value must reach the upper bound within value_tol*(1+upper)
  double x0_angle = std::numbers::pi / 4;
  int upper_depth = 16;         // norm enumeration depth for the confirming upper bound
  std::uint64_t budget = kDefaultWordBudget;
  std::uint64_t necklace_budget = 2'000'000;
  unsigned threads = 1;
  std::array<bool, 2> enabled{true, true};  // test hook: drop a member from the iteration
};

struct BarabanovApprox {
  int grid_size = 0;
  std::vector<double> angles;
  std::vector<double> values;   // norm of the unit vector at each angle, max 1
  double rho_hat = 0.0;
  double rho_lo = 0.0, rho_hi = 0.0;  // last Collatz-Wielandt bracket
  double growth = 0.0;                // max Tv over max v in the last sweep
  int iterations = 0;
  double residual = 0.0;        // max relative change of v in the last sweep
  bool converged = false;
  std::vector<std::pair<double, double>> bracket_history;  // (min, max) of Tv/v per sweep
};

namespace detail {

struct GridImage {
  int k;        // left grid index of the image direction
  double frac;  // position between k and k+1
  double len;   // Euclidean length of A x
};

inline double projective_angle(double x, double y) {
  double t = std::atan2(y, x);
  if (t < 0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

/// Linear interpolation of grid values on the projective line (period pi).
inline double interpolate(const std::vector<double>& v, double angle) {
  const int n = static_cast<int>(v.size());
  const double t = angle / std::numbers::pi * n;
  int k = static_cast<int>(std::floor(t));
  const double f = t - k;
  k = ((k % n) + n) % n;
  return (1 - f) * v[static_cast<std::size_t>(k)] + f * v[static_cast<std::size_t>((k + 1) % n)];
}

inline GridImage image_of(const Matrix& m, double angle, int n) {
  const double x = std::cos(angle), y = std::sin(angle);
  const double u = m(0, 0) * x + m(0, 1) * y, w = m(1, 0) * x + m(1, 1) * y;
  const double t = projective_angle(u, w) / std::numbers::pi * n;
  int k = static_cast<int>(std::floor(t));
  const double f = t - k;
  k = ((k % n) + n) % n;
  return {k, f, std::hypot(u, w)};
}

/// The Barabanov norm value of m x for a unit direction x at `angle`.
inline double image_norm(const Matrix& m, const std::vector<double>& v, double angle) {
  const auto g = image_of(m, angle, static_cast<int>(v.size()));
  const std::size_t n = v.size();
  return g.len * ((1 - g.frac) * v[static_cast<std::size_t>(g.k)] + g.frac * v[(static_cast<std::size_t>(g.k) + 1) % n]);
}

}  // namespace detail

/// Fixed-point iteration of (Tv)(x) = max_i v(A_i x) on grid directions of
/// the projective line, with linear interpolation between grid values. After
/// each sweep the ratios Tv/v bracket the growth rate; v is replaced by the
/// damped, renormalized update (v + Tv/rho)/2. When the bracket does not
/// close within max_sweeps (reducible input, e.g. a single member) the
/// result is partial and rho_hat is the power-method growth factor.
inline BarabanovApprox barabanov_iterate(const std::array<Matrix, 2>& members, const KozyakinConfig& cfg = {}) {
  if (cfg.grid < 64) throw Error(ErrorKind::invalid_input, "grid needs at least 64 points");
  if (!(cfg.tol > 0)) throw Error(ErrorKind::invalid_input, "tol must be positive");
  if (!cfg.enabled[0] && !cfg.enabled[1]) throw Error(ErrorKind::invalid_input, "no member enabled");
  const int n = cfg.grid;
  BarabanovApprox out;
  out.grid_size = n;
  out.angles.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.angles[static_cast<std::size_t>(j)] = std::numbers::pi * j / n;

  std::vector<std::array<detail::GridImage, 2>> img(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 2; ++i)
      img[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          detail::image_of(members[static_cast<std::size_t>(i)], out.angles[static_cast<std::size_t>(j)], n);

  std::vector<double> v(static_cast<std::size_t>(n), 1.0), tv(static_cast<std::size_t>(n));
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, top = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      double best = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        if (!cfg.enabled[i]) continue;
        const auto& g = img[j][i];
        const double val =
            g.len * ((1 - g.frac) * v[static_cast<std::size_t>(g.k)] + g.frac * v[(static_cast<std::size_t>(g.k) + 1) % v.size()]);
        best = std::max(best, val);
      }
      tv[j] = best;
      top = std::max(top, best);
      const double r = best / v[j];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.bracket_history.emplace_back(lo, hi);
    out.iterations = sweep;
    out.rho_lo = lo;
    out.rho_hi = hi;
    out.growth = top / *std::max_element(v.begin(), v.end());
    if (!(top > 0)) throw Error(ErrorKind::non_convergence, "Barabanov iteration collapsed to zero");
    const double scale = lo > 0 ? std::sqrt(lo * hi) : out.growth;

    double vmax = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      tv[j] = 0.5 * (v[j] + tv[j] / scale);
      vmax = std::max(vmax, tv[j]);
    }
    double change = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double next = std::max(tv[j] / vmax, std::numeric_limits<double>::min());
      change = std::max(change, std::abs(next - v[j]) / v[j]);
      v[j] = next;
    }
    out.residual = change;
    if (lo > 0 && hi / lo - 1 <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.rho_hat = out.converged ? std::sqrt(out.rho_lo * out.rho_hi) : out.growth;
  out.values = std::move(v);
  return out;
}

inline BarabanovApprox barabanov_iterate(const KozyakinModel& m, const KozyakinConfig& cfg = {}) {
  return barabanov_iterate({m.a0(), m.a1()}, cfg);
}

/// Upper bound max_i ||A_i||_P in the polygon norm whose unit ball is the
/// symmetric convex hull of the grid points x_theta / v(theta). Valid for
/// any positive v: every norm bounds rho from above.
inline double polygon_norm_bound(const std::array<Matrix, 2>& members, const BarabanovApprox& approx) {
  struct P {
    double x, y;
  };
  std::vector<P> pts;
  pts.reserve(2 * approx.values.size());
  for (std::size_t j = 0; j < approx.values.size(); ++j) {
    const double r = 1.0 / approx.values[j];
    const P p{r * std::cos(approx.angles[j]), r * std::sin(approx.angles[j])};
    pts.push_back(p);
    pts.push_back({-p.x, -p.y});
  }
  // Andrew's monotone chain
  std::sort(pts.begin(), pts.end(), [](const P& l, const P& r) { return l.x < r.x || (l.x == r.x && l.y < r.y); });
  auto cross = [](const P& o, const P& a, const P& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<P> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  // edge e: {z : n_e . z <= 1}; the polygon norm is max_e n_e . z
  struct Edge {
    double start_angle, nx, ny;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P& p = hull[i];
    const P& q = hull[(i + 1) % hull.size()];
    const double nx = q.y - p.y, ny = p.x - q.x;
    const double c = nx * p.x + ny * p.y;
    edges.push_back({std::atan2(p.y, p.x), nx / c, ny / c});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.start_angle < r.start_angle; });
  auto norm_of = [&](double x, double y) {
    const double t = std::atan2(y, x);
    auto it = std::upper_bound(edges.begin(), edges.end(), t,
                               [](double a, const Edge& e) { return a < e.start_angle; });
    const std::size_t m = edges.size();
    std::size_t idx = it == edges.begin() ? m - 1 : static_cast<std::size_t>(it - edges.begin()) - 1;
    double best = 0.0;
    for (std::size_t off : {m - 1, std::size_t{0}, std::size_t{1}}) {
      const Edge& e = edges[(idx + off) % m];
      best = std::max(best, e.nx * x + e.ny * y);
    }
    return best;
  };
  double bound = 0.0;
  for (const auto& a : members)
    for (const P& p : hull) bound = std::max(bound, norm_of(a(0, 0) * p.x + a(0, 1) * p.y, a(1, 0) * p.x + a(1, 1) * p.y));
  return bound;
}

/// Greedy extremal law: from direction x, apply the member whose image has
/// the larger approximate Barabanov norm (ties go to 0).
inline std::vector<int> extremal_switching(const std::array<Matrix, 2>& members, const BarabanovApprox& approx,
                                           double x0_angle, int steps,
                                           std::array<bool, 2> enabled = {true, true}) {
  if (steps < 1) throw Error(ErrorKind::invalid_input, "steps must be >= 1");
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(steps));
  double x = std::cos(x0_angle), y = std::sin(x0_angle);
  for (int s = 0; s < steps; ++s) {
    double score[2] = {-1.0, -1.0};
    double nx[2], ny[2];
    for (int i = 0; i < 2; ++i) {
      const Matrix& m = members[static_cast<std::size_t>(i)];
      nx[i] = m(0, 0) * x + m(0, 1) * y;
      ny[i] = m(1, 0) * x + m(1, 1) * y;
      if (!enabled[static_cast<std::size_t>(i)]) continue;
      score[i] = std::hypot(nx[i], ny[i]) * detail::interpolate(approx.values, detail::projective_angle(nx[i], ny[i]));
    }
    const int pick = score[1] > score[0] * (1 + 1e-12) ? 1 : 0;
    seq.push_back(pick);
    const double len = std::hypot(nx[pick], ny[pick]);
    if (!(len > 0)) throw Error(ErrorKind::non_convergence, "trajectory reached zero");
    x = nx[pick] / len;
    y = ny[pick] / len;
  }
  return seq;
}

inline std::vector<int> extremal_switching(const KozyakinModel& m, const BarabanovApprox& approx, double x0_angle,
                                           int steps) {
  return extremal_switching({m.a0(), m.a1()}, approx, x0_angle, steps);
}

struct Rational {
  long p = 0, q = 1;
};

/// Best rational approximation p/q of x with q <= q_max (convergents and
/// the final semiconvergent of the continued fraction).
inline Rational best_rational(double x, long q_max) {
  if (q_max < 1) throw Error(ErrorKind::invalid_input, "q_max must be >= 1");
  const double sign = x < 0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = ax;
  Rational best{0, 1};
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(y);
    if (fa > 1e15) break;
    const long a = static_cast<long>(fa);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > q_max) {
      const long k = (q_max - q0) / q1;
      const Rational semi{p0 + k * p1, q0 + k * q1};
      const Rational conv{p1, q1};
      const double es = std::abs(ax - static_cast<double>(semi.p) / static_cast<double>(semi.q));
      const double ec = std::abs(ax - static_cast<double>(conv.p) / static_cast<double>(conv.q));
      best = (k > 0 && es < ec) ? semi : conv;
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    best = {p1, q1};
    const double rem = y - fa;
    if (rem <= 1e-15 || std::abs(ax - static_cast<double>(p1) / static_cast<double>(q1)) <= 1e-15) break;
    y = 1.0 / rem;
  }
  const long g = std::gcd(best.p, best.q);
  best.p /= g;
  best.q /= g;
  if (sign < 0) best.p = -best.p;
  return best;
}

struct FrequencyEstimate {
  double sigma = 0.0;
  int horizon = 0;
  int burn_in = 0;
  long p = 0, q = 1;
  double approx_error = 0.0;
  std::vector<int> tail;  // last indices of the trajectory (at most q_max of them)
  BarabanovApprox approx;
};

inline FrequencyEstimate switching_frequency(const std::array<Matrix, 2>& members, const KozyakinConfig& cfg = {}) {
  if (cfg.horizon < 1 || cfg.burn_in < 0) throw Error(ErrorKind::invalid_input, "horizon must be >= 1, burn_in >= 0");
  FrequencyEstimate est;
  est.approx = barabanov_iterate(members, cfg);
  const auto seq = extremal_switching(members, est.approx, cfg.x0_angle, cfg.burn_in + cfg.horizon, cfg.enabled);
  long ones = 0;
  for (std::size_t s = static_cast<std::size_t>(cfg.burn_in); s < seq.size(); ++s) ones += seq[s];
  est.sigma = static_cast<double>(ones) / cfg.horizon;
  est.horizon = cfg.horizon;
  est.burn_in = cfg.burn_in;
  const Rational r = best_rational(est.sigma, cfg.q_max);
  est.p = r.p;
  est.q = r.q;
  est.approx_error = std::abs(est.sigma - static_cast<double>(r.p) / static_cast<double>(r.q));
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(cfg.q_max), seq.size());
  est.tail.assign(seq.end() - static_cast<long>(keep), seq.end());
  return est;
}

inline FrequencyEstimate switching_frequency(const KozyakinModel& m, const KozyakinConfig& cfg = {}) {
  return switching_frequency({m.a0(), m.a1()}, cfg);
}

/// Lower Christoffel word of slope p/q over {0,1}: q letters, p ones.
inline std::vector<int> christoffel_word(long p, long q) {
  std::vector<int> w(static_cast<std::size_t>(q));
  for (long k = 0; k < q; ++k) w[static_cast<std::size_t>(k)] = static_cast<int>(((k + 1) * p) / q - (k * p) / q);
  return w;
}

/// Calls fn on every necklace (least rotation) of length q with exactly p
/// ones over {0,1}. Returns false if the node budget ran out first.
inline bool for_each_necklace(long p, long q, std::uint64_t budget, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(static_cast<std::size_t>(q) + 1, 0);
  std::uint64_t nodes = 0;
  bool ok = true;
  std::function<void(long, long, long)> gen = [&](long t, long period, long ones) {
    if (!ok) return;
    if (++nodes > budget) {
      ok = false;
      return;
    }
    const long left = q - t + 1;  // positions t..q still to fill
    if (ones > p || ones + left < p) return;
    if (t > q) {
      if (q % period == 0 && ones == p) fn(std::vector<int>(a.begin() + 1, a.end()));
      return;
    }
    const int base = a[static_cast<std::size_t>(t - period)];
    a[static_cast<std::size_t>(t)] = base;
    gen(t + 1, period, ones + base);
    if (base == 0) {
      a[static_cast<std::size_t>(t)] = 1;
      gen(t + 1, t, ones + 1);
    }
  };
  gen(1, 1, 0);
  return ok;
}

inline Word indices_to_word(const std::vector<int>& idx) {
  std::vector<int> letters(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) letters[i] = idx[i] + 1;
  return Word(std::move(letters));
}

struct Theorem8Result {
  std::optional<Certificate> certificate;  // absent: undecided
  FrequencyEstimate estimate;
  Word candidate;                  // best periodic word found at denominator q
  double candidate_value = 0.0;    // rho(A(candidate))^{1/q}
  double upper = 0.0;              // confirming upper bound actually used
  double enumeration_upper = 0.0;  // min over completed depths of max ||A(w)||^{1/n}
  double polygon_upper = 0.0;      // polygon-norm bound from the Barabanov grid
  bool necklaces_complete = false;
  std::string reason;
};

/// Finiteness decision: estimate sigma, and when it is close to some p/q
/// with q <= q_max, look for a period-q word with p ones whose growth rate
/// meets an upper bound. Never claims non-finiteness; failure is "undecided".
inline Theorem8Result theorem8_decide(const KozyakinModel& m, const KozyakinConfig& cfg = {}) {
  if (auto why = condition_k_violation(m)) throw Error(ErrorKind::condition_k, "condition (K): " + *why);
  const std::array<Matrix, 2> members{m.a0(), m.a1()};
  const MatrixSet set = m.set();
  Theorem8Result res;
  res.estimate = switching_frequency(members, cfg);
  const auto& est = res.estimate;

  const auto ub = upper_bound(set, cfg.upper_depth, {cfg.budget, cfg.threads});
  res.enumeration_upper = ub.value;
  res.polygon_upper = polygon_norm_bound(members, est.approx);
  res.upper = std::min(res.enumeration_upper, res.polygon_upper);

  if (est.approx_error > cfg.rational_tol) {
    res.reason = "no p/q with q <= " + std::to_string(cfg.q_max) + " within " + std::to_string(cfg.rational_tol) +
                 " of sigma = " + std::to_string(est.sigma);
    return res;
  }
  const long p = est.p, q = est.q;
  auto consider = [&](const std::vector<int>& idx) {
    const Word w = indices_to_word(idx);
    const double g = growth_rate(set, w);
    const Word canon = rotate_min(w);
    if (res.candidate.empty() || g > res.candidate_value * (1 + kTieTol) ||
        (g >= res.candidate_value * (1 - kTieTol) && canon < res.candidate)) {
      if (g > res.candidate_value * (1 + kTieTol) || res.candidate.empty()) res.candidate_value = g;
      res.candidate = canon;
    }
  };
  res.necklaces_complete = for_each_necklace(p, q, cfg.necklace_budget, consider);
  consider(christoffel_word(p, q));
  if (est.tail.size() >= static_cast<std::size_t>(q)) {
    consider(std::vector<int>(est.tail.end() - q, est.tail.end()));
  }
  res.candidate_value = growth_rate(set, res.candidate);

  if (res.candidate_value < res.upper - cfg.value_tol * (1 + res.upper)) {
    res.reason = "best period-" + std::to_string(q) + " word reaches " + std::to_string(res.candidate_value) +
                 ", upper bound " + std::to_string(res.upper);
    return res;
  }
  Certificate cert;
  cert.criterion = Criterion::Kozyakin;
  cert.value = res.candidate_value;
  cert.word = res.candidate;
  cert.n = static_cast<int>(q);
  cert.witness = {{"A(word)", evaluate(set, res.candidate)}};
  cert.tolerances = {{"rational_tol", cfg.rational_tol}, {"value_tol", cfg.value_tol}, {"barabanov_tol", cfg.tol}};
  cert.notes = "sigma = " + std::to_string(est.sigma) + " ~ " + std::to_string(p) + "/" + std::to_string(q) +
               "; periodic value meets upper bound " + std::to_string(res.upper) +
               (res.necklaces_complete ? "" : "; necklace scan truncated, Christoffel and observed words used");
  res.certificate = std::move(cert);
  return res;
}

struct Example9Result {
  int case_number = 0;  // 1..6, 0 when no case applies
  std::string referral;
  std::optional<Certificate> certificate;
  std::optional<Theorem8Result> decision;
};

/// Case ladder for B0 = [[a,b],[0,1]], B1 = [[1,0],[c,d]], first match wins.
inline Example9Result example9_dispatch(const Matrix& b0, const Matrix& b1, const KozyakinConfig& kcfg = {},
                                        const CriteriaConfig& ccfg = {}) {
  const double tol = ccfg.eq_tol;
  auto zero = [&](double x) { return std::abs(x) <= tol; };
  if (b0.dim() != 2 || b1.dim() != 2 || !zero(b0(1, 0)) || !zero(b0(1, 1) - 1) || !zero(b1(0, 0) - 1) ||
      !zero(b1(0, 1))) {
    throw Error(ErrorKind::invalid_input, "expected B0 = [[a,b],[0,1]] and B1 = [[1,0],[c,d]]");
  }
  const double a = b0(0, 0), b = b0(0, 1), c = b1(1, 0), d = b1(1, 1);
  const MatrixSet set({b0, b1}, {"B0", "B1"});
  Example9Result r;
  auto same = [&](double x, double y) { return detail::close(x, y, tol); };

  if (zero(a) || zero(d)) {
    r.case_number = 1;
    r.referral = "ThmH";
    r.certificate = check_rank_one(set, ccfg);
  } else if (zero(b) || zero(c)) {
    r.case_number = 2;
    r.referral = "Cor4";
    r.certificate = check_corollary4(set, ccfg);
  } else if (a < 0 && d < 0) {
    r.case_number = 3;
    r.referral = "ThmE";
    r.certificate = check_negative_determinants(set, ccfg);
  } else if (same(a, d) && same(b, c)) {
    r.case_number = 4;
    r.referral = "ThmF";
    r.certificate = check_swap_conjugate(set, ccfg);
  } else if (!same(a, 1) && ((1 - a) * (1 - d) - b * c) * (b * c) >= 0) {
    r.case_number = 5;
    r.referral = "Cor4";
    const Matrix q = Matrix::from_rows({{(a - 1) / b, 1}, {0, 1}});
    const Matrix qinv = inverse(q);
    const MatrixSet conj({q * b0 * qinv, q * b1 * qinv});
    Certificate cert = detail::singleton_certificate(Criterion::Cor4, set, {0, 1});
    cert.witness = {{"Q B0 Q^-1", conj[0]}, {"Q B1 Q^-1", conj[1]}};
    cert.tolerances = {{"eq_tol", tol}};
    cert.notes = "conjugated by Q = [[(a-1)/b, 1], [0, 1]] to a diagonal member and a partner with bc >= 0";
    r.certificate = std::move(cert);
  } else if (same(a, 1) && same(d, 1) && b * c >= 1) {
    r.case_number = 6;
    r.referral = "Kozyakin";
    r.decision = theorem8_decide(KozyakinModel{1, b, c, 1, 1, 1}, kcfg);
    r.certificate = r.decision->certificate;
  } else {
    r.referral = "none";
  }
  return r;
}

/// Recognizes alpha [[a,b],[0,1]], beta [[1,0],[c,d]] in either member order.
/// `swapped` is set when the A0 shape is the second member.
inline std::optional<KozyakinModel> detect_kozyakin(const MatrixSet& set, bool* swapped = nullptr, double tol = 1e-12) {
  if (set.size() != 2 || set.dim() != 2) return std::nullopt;
  for (int order = 0; order < 2; ++order) {
    const Matrix& x = set[static_cast<std::size_t>(order)];
    const Matrix& y = set[static_cast<std::size_t>(1 - order)];
    const double alpha = x(1, 1), beta = y(0, 0);
    if (!(alpha > 0) || !(beta > 0)) continue;
    if (std::abs(x(1, 0)) > tol * alpha || std::abs(y(0, 1)) > tol * beta) continue;
    KozyakinModel m{x(0, 0) / alpha, x(0, 1) / alpha, y(1, 0) / beta, y(1, 1) / beta, alpha, beta};
    if (condition_k_violation(m)) continue;
    if (swapped) *swapped = order == 1;
    return m;
  }
  return std::nullopt;
}

}  // namespace gsr

#endif  // GSR_KOZYAKIN_HPP
