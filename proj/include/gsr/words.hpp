#ifndef GSR_WORDS_HPP
#define GSR_WORDS_HPP

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/smallmat.hpp"

namespace gsr {

/// A finite word over the alphabet {1,...,K}; letter k selects member A_k.
struct Word {
  std::vector<int> letters;

  Word() = default;
  Word(std::initializer_list<int> l) : letters(l) {}
  explicit Word(std::vector<int> l) : letters(std::move(l)) {}

  std::size_t size() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }
  int operator[](std::size_t i) const { return letters[i]; }

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

  /// "2,1" style rendering, 1-based.
  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(letters[i]);
    }
    return s;
  }

  static Word parse(std::string_view text) {
    Word w;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t comma = text.find(',', pos);
      const std::string_view tok =
          text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (tok.empty()) throw Error(ErrorKind::invalid_word, "empty letter in word '" + std::string(text) + "'");
      int v = 0;
      for (char ch : tok) {
        if (ch < '0' || ch > '9') {
          throw Error(ErrorKind::invalid_word, "bad letter '" + std::string(tok) + "' in word");
        }
        v = v * 10 + (ch - '0');
        if (v > 1'000'000) throw Error(ErrorKind::invalid_word, "letter out of range");
      }
      if (v < 1) throw Error(ErrorKind::invalid_word, "letters are 1-based");
      w.letters.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return w;
  }
};

inline Word concat(const Word& u, const Word& v) {
  Word w = u;
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  return w;
}

/// Ordered family {A_1,...,A_K} of matrices sharing one dimension.
class MatrixSet {
 public:
  MatrixSet() = default;

  explicit MatrixSet(std::vector<Matrix> members, std::vector<std::string> names = {})
      : members_(std::move(members)), names_(std::move(names)) {
    if (members_.empty()) throw Error(ErrorKind::invalid_input, "matrix set must be non-empty");
    for (const auto& m : members_) {
      if (m.dim() != members_.front().dim()) {
        throw Error(ErrorKind::dimension_mismatch, "matrix set members differ in dimension");
      }
    }
    if (names_.empty()) {
      for (std::size_t k = 0; k < members_.size(); ++k) names_.push_back("A" + std::to_string(k + 1));
    } else if (names_.size() != members_.size()) {
      throw Error(ErrorKind::invalid_input, "one name per member required");
    }
  }

  MatrixSet(std::initializer_list<Matrix> members) : MatrixSet(std::vector<Matrix>(members)) {}

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dim() const noexcept { return members_.empty() ? 0 : members_.front().dim(); }

  /// 0-based member access.
  const Matrix& operator[](std::size_t k) const { return members_[k]; }
  /// 1-based access matching word letters.
  const Matrix& letter(int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > members_.size()) {
      throw Error(ErrorKind::invalid_word,
                  "letter " + std::to_string(k) + " outside alphabet [1," + std::to_string(members_.size()) + "]");
    }
    return members_[static_cast<std::size_t>(k - 1)];
  }

  const std::vector<Matrix>& members() const noexcept { return members_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  MatrixSet scaled(double c) const {
    std::vector<Matrix> m = members_;
    for (auto& x : m) x *= c;
    return MatrixSet(std::move(m), names_);
  }

 private:
  std::vector<Matrix> members_;
  std::vector<std::string> names_;
};

inline void validate_word(const MatrixSet& set, const Word& w) {
  if (w.empty()) throw Error(ErrorKind::invalid_word, "cannot evaluate the empty word");
  for (int k : w.letters) (void)set.letter(k);
}

/// Matrix product carried as mantissa * 2^exponent so that long words
/// neither overflow nor underflow.
struct ScaledProduct {
  Matrix mantissa;
  long exponent = 0;

  static constexpr double kRenormAbove = 1e100;
  static constexpr double kRenormBelow = 1e-100;

  explicit ScaledProduct(std::size_t dim) : mantissa(Matrix::identity(dim)) {}
  ScaledProduct(Matrix m, long e) : mantissa(std::move(m)), exponent(e) { renormalize(); }

  void renormalize() {
    const double m = max_abs(mantissa);
    if (m == 0.0 || (m <= kRenormAbove && m >= kRenormBelow)) return;
    int e = 0;
    (void)std::frexp(m, &e);
    mantissa *= std::ldexp(1.0, -e);
    exponent += e;
  }

  /// this <- this * a.
  void extend(const Matrix& a, Matrix& scratch) {
    multiply_into(mantissa, a, scratch);
    std::swap(mantissa, scratch);
    renormalize();
  }

  double log_norm() const {
    const double n = operator_norm(mantissa);
    return n == 0.0 ? -std::numeric_limits<double>::infinity()
                    : std::log(n) + static_cast<double>(exponent) * std::log(2.0);
  }
  double log_spectral_radius() const {
    const double r = spectral_radius(mantissa);
    return r == 0.0 ? -std::numeric_limits<double>::infinity()
                    : std::log(r) + static_cast<double>(exponent) * std::log(2.0);
  }
  /// Materialized product; throws if it does not fit in binary64.
  Matrix value() const {
    Matrix m = mantissa;
    m *= std::ldexp(1.0, static_cast<int>(exponent));
    for (double v : m.entries()) {
      if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "product overflows binary64");
    }
    return m;
  }
};

/// Left-to-right product A_{k1} * ... * A_{kn}, renormalized as it grows.
inline ScaledProduct evaluate_scaled(const MatrixSet& set, const Word& w) {
  validate_word(set, w);
  ScaledProduct p(set.letter(w[0]), 0);
  Matrix scratch(set.dim());
  for (std::size_t i = 1; i < w.size(); ++i) p.extend(set.letter(w[i]), scratch);
  return p;
}

inline Matrix evaluate(const MatrixSet& set, const Word& w) {
  validate_word(set, w);
  Matrix p = set.letter(w[0]);
  Matrix scratch(set.dim());
  for (std::size_t i = 1; i < w.size(); ++i) {
    multiply_into(p, set.letter(w[i]), scratch);
    std::swap(p, scratch);
  }
  return p;
}

/// rho(A(w))^{1/|w|}.
inline double growth_rate(const MatrixSet& set, const Word& w) {
  const double lr = evaluate_scaled(set, w).log_spectral_radius();
  return std::exp(lr / static_cast<double>(w.size()));
}

/// ||A(w)||^{1/|w|}.
inline double norm_rate(const MatrixSet& set, const Word& w) {
  const double ln = evaluate_scaled(set, w).log_norm();
  return std::exp(ln / static_cast<double>(w.size()));
}

/// All Lyndon words of length exactly n over {1..K}, lexicographic order,
/// by Duval's successor algorithm.
inline std::vector<Word> lyndon_words(int K, int n) {
  if (K < 1 || n < 1) throw Error(ErrorKind::invalid_input, "lyndon_words needs K >= 1 and n >= 1");
  std::vector<Word> out;
  std::vector<int> w{0};
  while (!w.empty()) {
    if (static_cast<int>(w.size()) == n) {
      Word lw;
      lw.letters.reserve(w.size());
      for (int x : w) lw.letters.push_back(x + 1);
      out.push_back(std::move(lw));
    }
    const std::size_t m = w.size();
    while (static_cast<int>(w.size()) < n) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == K - 1) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  return out;
}

inline constexpr std::uint64_t kDefaultWordBudget = 10'000'000;

/// K^n, saturating at UINT64_MAX.
inline std::uint64_t word_count(int K, int n) {
  std::uint64_t c = 1;
  for (int i = 0; i < n; ++i) {
    if (c > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(K)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    c *= static_cast<std::uint64_t>(K);
  }
  return c;
}

/// Streamed lexicographic enumeration of all K^n words of length n.
class AllWords {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Word;
    using difference_type = std::ptrdiff_t;
    using pointer = const Word*;
    using reference = const Word&;

    iterator() = default;
    iterator(int K, int n) : K_(K), w_(std::vector<int>(static_cast<std::size_t>(n), 1)), done_(false) {}

    const Word& operator*() const { return w_; }
    const Word* operator->() const { return &w_; }

    iterator& operator++() {
      std::size_t i = w_.size();
      while (i > 0) {
        --i;
        if (w_.letters[i] < K_) {
          ++w_.letters[i];
          return *this;
        }
        w_.letters[i] = 1;
      }
      done_ = true;
      return *this;
    }
    void operator++(int) { ++*this; }

    bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || w_ == o.w_); }

   private:
    int K_ = 0;
    Word w_;
    bool done_ = true;
  };

  AllWords(int K, int n, std::uint64_t budget = kDefaultWordBudget) : K_(K), n_(n) {
    if (K < 1 || n < 1) throw Error(ErrorKind::invalid_input, "all_words needs K >= 1 and n >= 1");
    if (word_count(K, n) > budget) {
      throw Error(ErrorKind::budget_exceeded,
                  "all_words(" + std::to_string(K) + ", " + std::to_string(n) +
                      ") exceeds the word budget of " + std::to_string(budget));
    }
  }

  iterator begin() const { return iterator(K_, n_); }
  iterator end() const { return iterator(); }
  std::uint64_t size() const { return word_count(K_, n_); }

 private:
  int K_;
  int n_;
};

inline AllWords all_words(int K, int n, std::uint64_t budget = kDefaultWordBudget) {
  return AllWords(K, n, budget);
}

/// Lexicographically least rotation (Booth's algorithm).
inline Word rotate_min(const Word& w) {
  if (w.empty()) throw Error(ErrorKind::invalid_word, "rotate_min of the empty word");
  const long n = static_cast<long>(w.size());
  std::vector<int> s(w.letters);
  s.insert(s.end(), w.letters.begin(), w.letters.end());
  auto at = [&](long i) { return s[static_cast<std::size_t>(i)]; };
  std::vector<long> f(static_cast<std::size_t>(2 * n), -1);
  auto fail = [&](long i) -> long& { return f[static_cast<std::size_t>(i)]; };
  long k = 0;
  for (long j = 1; j < 2 * n; ++j) {
    const int sj = at(j);
    long i = fail(j - k - 1);
    while (i != -1 && sj != at(k + i + 1)) {
      if (sj < at(k + i + 1)) k = j - i - 1;
      i = fail(i);
    }
    if (sj != at(k + i + 1)) {
      if (sj < at(k)) k = j;
      fail(j - k) = -1;
    } else {
      fail(j - k) = i + 1;
    }
  }
  return Word(std::vector<int>(s.begin() + k, s.begin() + k + n));
}

}  // namespace gsr

#endif  // GSR_WORDS_HPP
