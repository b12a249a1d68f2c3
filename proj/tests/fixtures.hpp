#ifndef GSR_TESTS_FIXTURES_HPP
#define GSR_TESTS_FIXTURES_HPP

#include <cmath>

#include "gsr/smallmat.hpp"
#include "gsr/words.hpp"

namespace fixture {

inline gsr::Matrix unipotent_upper3() { return gsr::Matrix::from_rows({{1, 1, 2}, {0, 1, 1}, {0, 0, 1}}); }
inline gsr::Matrix unipotent_lower3() { return gsr::Matrix::from_rows({{1, 0, 0}, {1, 1, 0}, {2, 1, 1}}); }

/// Rotation in the first two coordinates, contraction sqrt((3-sqrt5)/2) in the third.
inline gsr::Matrix rotation_block3(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return gsr::Matrix::from_rows({{c, s, 0}, {-s, c, 0}, {0, 0, std::sqrt((3.0 - std::sqrt(5.0)) / 2.0)}});
}

/// The non-symmetric three-member set whose norm-optimal letter has its Gram
/// product inside the set of length-2 products.
inline gsr::MatrixSet shear_rotation(double angle = 0.7) {
  return gsr::MatrixSet({unipotent_upper3(), unipotent_lower3(), rotation_block3(angle)});
}

inline gsr::Matrix rot2(double angle, double r = 1.0) {
  const double c = std::cos(angle), s = std::sin(angle);
  return gsr::Matrix::from_rows({{r * c, r * s}, {-r * s, r * c}});
}

/// alpha*[[-3,3.5],[-4,4.5]] and beta*diag(0.5,1).
inline gsr::MatrixSet conjugate_pair(double alpha, double beta) {
  return gsr::MatrixSet({alpha * gsr::Matrix::from_rows({{-3, 3.5}, {-4, 4.5}}),
                         beta * gsr::Matrix::from_rows({{0.5, 0}, {0, 1}})});
}

inline gsr::Matrix conjugate_pair_q() { return gsr::Matrix::from_rows({{-0.5, 1}, {0, 1}}); }

}  // namespace fixture

#endif  // GSR_TESTS_FIXTURES_HPP
