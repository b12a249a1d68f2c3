#ifndef GSR_SMALLMAT_HPP
#define GSR_SMALLMAT_HPP

// Dense real matrices for small dimensions (2 <= d <= ~10, hard cap 32):
// products, transposes, determinants, inverses, the general real eigenvalue
// problem (balance + Hessenberg + Francis double-shift QR), the symmetric
// eigenvalue problem (cyclic Jacobi) and singular values (one-sided Jacobi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {

inline constexpr std::size_t kMaxDim = 32;

using Complex = std::complex<double>;

class Matrix {
 public:
  Matrix() = default;

  /// Zero matrix of the given dimension.
  explicit Matrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {
    check_dim(dim);
  }

  /// Row-major entries; length must be dim*dim and every entry finite.
  Matrix(std::size_t dim, std::vector<double> entries)
      : dim_(dim), a_(std::move(entries)) {
    check_dim(dim);
    if (a_.size() != dim * dim) {
      throw Error(ErrorKind::dimension_mismatch,
                  "matrix of dimension " + std::to_string(dim) + " needs " +
                      std::to_string(dim * dim) + " entries, got " +
                      std::to_string(a_.size()));
    }
    for (double v : a_) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::non_finite, "matrix entry is not finite");
      }
    }
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> entries;
    const std::size_t n = rows.size();
    for (const auto& row : rows) {
      if (row.size() != n) {
        throw Error(ErrorKind::dimension_mismatch, "matrix rows must be square");
      }
      entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(n, std::move(entries));
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> diag) {
    Matrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
  }

  /// antidiagonal({c1,...,cd}) puts c_i in row i, column d+1-i.
  static Matrix antidiagonal(std::span<const double> anti) {
    const std::size_t n = anti.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, n - 1 - i) = anti[i];
    return m;
  }

  static Matrix antidiagonal(std::initializer_list<double> anti) {
    return antidiagonal(std::span<const double>(anti.begin(), anti.size()));
  }

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return a_[i * dim_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return a_[i * dim_ + j];
  }

  std::span<const double> entries() const noexcept { return a_; }
  std::span<double> entries() noexcept { return a_; }

  bool operator==(const Matrix&) const = default;

  Matrix& operator*=(double s) noexcept {
    for (double& v : a_) v *= s;
    return *this;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (std::size_t i = 0; i < dim_; ++i) {
      os << (i ? ",[" : "[");
      for (std::size_t j = 0; j < dim_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  static void check_dim(std::size_t dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw Error(ErrorKind::invalid_input,
                  "matrix dimension " + std::to_string(dim) + " outside [1, " +
                      std::to_string(kMaxDim) + "]");
    }
  }

  std::size_t dim_ = 0;
  std::vector<double> a_;
};

inline Matrix operator*(double s, Matrix m) {
  m *= s;
  return m;
}

inline void require_same_dim(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
}

/// out = a * b. `out` must not alias either operand.
inline void multiply_into(const Matrix& a, const Matrix& b, Matrix& out) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  if (out.dim() != n) out = Matrix(n);
  auto o = out.entries();
  std::fill(o.begin(), o.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) o[i * n + j] += aik * b(k, j);
    }
  }
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out(a.dim());
  multiply_into(a, b, out);
  return out;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) { return multiply(a, b); }

inline Matrix transpose(const Matrix& a) {
  const std::size_t n = a.dim();
  Matrix t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
  return t;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

/// max|a_ij - b_ij| <= tol * max(1, ||a||_F, ||b||_F).
inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  require_same_dim(a, b);
  double diff = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    diff = std::max(diff, std::abs(a.entries()[k] - b.entries()[k]));
  const double scale = std::max({1.0, frobenius_norm(a), frobenius_norm(b)});
  return diff <= tol * scale;
}

inline bool is_symmetric(const Matrix& a, double tol) {
  return approx_equal(a, transpose(a), tol);
}

inline bool is_diagonal(const Matrix& a, double tol) {
  const double scale = std::max(1.0, frobenius_norm(a));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j && std::abs(a(i, j)) > tol * scale) return false;
  return true;
}

inline bool is_antidiagonal(const Matrix& a, double tol) {
  const std::size_t n = a.dim();
  const double scale = std::max(1.0, frobenius_norm(a));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != n - 1 - i && std::abs(a(i, j)) > tol * scale) return false;
  return true;
}

namespace detail {

// LU with partial pivoting on a copy; returns the determinant.
inline double lu_determinant(std::vector<double> m, std::size_t n) {
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    if (m[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[c * n + j], m[piv * n + j]);
      det = -det;
    }
    const double p = m[c * n + c];
    det *= p;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / p;
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) m[r * n + j] -= f * m[c * n + j];
    }
  }
  return det;
}

}  // namespace detail

inline double determinant(const Matrix& a) {
  return detail::lu_determinant({a.entries().begin(), a.entries().end()}, a.dim());
}

inline std::vector<double> singular_values(const Matrix& a);

/// Gauss-Jordan inverse with partial pivoting. Throws ErrorKind::singular
/// when sigma_min(q) <= 1e-12 * sigma_max(q).
inline Matrix inverse(const Matrix& q) {
  const std::size_t n = q.dim();
  const auto sv = singular_values(q);
  if (!(sv.back() > 1e-12 * sv.front())) {
    throw Error(ErrorKind::singular, "matrix is singular to working tolerance");
  }
  std::vector<double> m(q.entries().begin(), q.entries().end());
  Matrix inv = Matrix::identity(n);
  auto r = inv.entries();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i * n + c]) > std::abs(m[piv * n + c])) piv = i;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m[c * n + j], m[piv * n + j]);
        std::swap(r[c * n + j], r[piv * n + j]);
      }
    }
    const double p = m[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c * n + j] /= p;
      r[c * n + j] /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = m[i * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m[i * n + j] -= f * m[c * n + j];
        r[i * n + j] -= f * r[c * n + j];
      }
    }
  }
  return inv;
}

/// q * a * q^{-1}.
inline Matrix similarity(const Matrix& q, const Matrix& a) {
  require_same_dim(q, a);
  return q * a * inverse(q);
}

namespace detail {

// Row-major n x n working storage addressed 1-based, which keeps the
// classical EISPACK index arithmetic readable.
struct Work {
  std::size_t n;
  std::vector<double> v;
  double& operator()(std::size_t i, std::size_t j) { return v[(i - 1) * n + (j - 1)]; }
};

inline void balance(Work& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.n;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 1; j <= n; ++j) a(i, j) *= g;
        for (std::size_t j = 1; j <= n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations; entries below the subdiagonal are cleared on exit.
inline void hessenberg(Work& a) {
  const std::size_t n = a.n;
  for (std::size_t m = 2; m < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j <= n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = a(i, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a(i, m - 1) = y;
        for (std::size_t j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
        for (std::size_t j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
      }
    }
  }
  for (std::size_t i = 3; i <= n; ++i)
    for (std::size_t j = 1; j + 1 < i; ++j) a(i, j) = 0.0;
}

inline double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix.
inline std::vector<Complex> hessenberg_qr(Work& a, std::size_t max_iterations) {
  const std::size_t n = a.n;
  std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
  double anorm = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = std::max<std::size_t>(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  std::size_t total = 0;
  long nn = static_cast<long>(n);
  double t = 0.0;
  while (nn >= 1) {
    int its = 0;
    long l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (++total > max_iterations) {
            throw Error(ErrorKind::non_convergence,
                        "shifted QR did not converge within " +
                            std::to_string(max_iterations) + " iterations");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (long i = 1; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          long m = nn - 2;
          double p = 0, q = 0, r = 0, z = 0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (long i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (long k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (long j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const long mmin = nn < k + 3 ? nn : k + 3;
            for (long i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  std::vector<Complex> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace detail

/// All d eigenvalues with multiplicity, ordered by decreasing modulus
/// (ties: larger real part, then larger imaginary part first).
inline std::vector<Complex> eigenvalues(const Matrix& a) {
  const std::size_t n = a.dim();
  if (n == 1) return {Complex(a(0, 0), 0.0)};
  detail::Work w{n, {a.entries().begin(), a.entries().end()}};
  detail::balance(w);
  detail::hessenberg(w);
  auto ev = detail::hessenberg_qr(w, 100 * n * n);
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return ev;
}

inline constexpr double kSymmetryTol = 1e-12;

/// Spectrum of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending. Throws ErrorKind::asymmetric beyond `sym_tol` (relative).
inline std::vector<double> symmetric_eigenvalues(const Matrix& a, double sym_tol = kSymmetryTol) {
  if (!is_symmetric(a, sym_tol)) {
    throw Error(ErrorKind::asymmetric, "symmetric_eigenvalues: input is not symmetric");
  }
  const std::size_t n = a.dim();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = 0.5 * (a(i, j) + a(j, i));
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  const double frob = frobenius_norm(a);
  const double target = 1e-14 * frob;
  constexpr int max_sweeps = 100;
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    off = std::sqrt(off);
    if (off <= target || off == 0.0) break;
    if (sweep == max_sweeps) {
      throw Error(ErrorKind::non_convergence, "Jacobi iteration did not converge");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Singular values (descending) by one-sided Jacobi; small singular values
/// are accurate to roughly eps * sigma_max in absolute terms.
inline std::vector<double> singular_values(const Matrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> u(a.entries().begin(), a.entries().end());
  auto col = [&](std::size_t i, std::size_t j) -> double& { return u[i * n + j]; };
  constexpr int max_sweeps = 100;
  for (int sweep = 0;; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += col(i, p) * col(i, p);
          beta += col(i, q) * col(i, q);
          gamma += col(i, p) * col(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = col(i, p), xq = col(i, q);
          col(i, p) = c * xp - s * xq;
          col(i, q) = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == max_sweeps) {
      throw Error(ErrorKind::non_convergence, "one-sided Jacobi SVD did not converge");
    }
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += col(i, j) * col(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

inline double spectral_radius(const Matrix& a) {
  double r = 0.0;
  for (const Complex& z : eigenvalues(a)) r = std::max(r, std::abs(z));
  return r;
}

/// Euclidean operator norm, sqrt(lambda_max(a^T a)), via the symmetric path.
inline double operator_norm(const Matrix& a) {
  const Matrix g = transpose(a) * a;
  const auto ev = symmetric_eigenvalues(g, 1e-10);
  return std::sqrt(std::max(0.0, ev.front()));
}

}  // namespace gsr

#endif  // GSR_SMALLMAT_HPP
