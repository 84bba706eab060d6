#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace dppgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LogDet {
  int sign;        // -1, 0 or +1
  double log_abs;  // log |det|, -inf when singular
};

/// Determinant through partial-pivot LU.
double det_lu(const Matrix& a);

/// Sign and log-magnitude of the determinant from the LU pivots.
LogDet log_det_lu(const Matrix& a);

/// Principal submatrix with rows/columns in the bitmask (bit i <-> index i).
Matrix principal_submatrix(const Matrix& a, std::uint64_t bits);

/// Principal minor det(A_S); the empty minor is 1.
double principal_minor(const Matrix& a, std::uint64_t bits);

/// Largest absolute asymmetry max |A_ij - A_ji|.
double max_asymmetry(const Matrix& a);

/// Eigenvalue-thresholded pseudo-inverse of a symmetric matrix; eigenvalues
/// below rel_threshold * max|eigenvalue| are dropped and counted.
struct PseudoInverse {
  Matrix inverse;
  int dropped = 0;
};
PseudoInverse symmetric_pinv(const Matrix& a, double rel_threshold = 1e-10);

}  // namespace dppgeo
