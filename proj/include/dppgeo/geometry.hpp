#pragma once

#include <vector>

#include "dppgeo/embedding.hpp"
#include "dppgeo/kernel.hpp"
#include "dppgeo/linalg.hpp"

namespace dppgeo {

inline constexpr int kMaxFisherM = 10;
inline constexpr int kMaxConnectionM = 6;
inline constexpr int kMaxCrossReportM = 8;

/// Dense rank-3 array, row-major in (i, j, k).
struct Tensor3 {
  int n0 = 0, n1 = 0, n2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int a, int b, int c) : n0(a), n1(b), n2(c), data(std::size_t(a) * b * c, 0.0) {}

  double& operator()(int i, int j, int k) { return data[(std::size_t(i) * n1 + j) * n2 + k]; }
  double operator()(int i, int j, int k) const { return data[(std::size_t(i) * n1 + j) * n2 + k]; }
};

/// Fisher information of the log-linear family, g_IJ = Cov[T_I, T_J].
struct FisherTheta {
  int m = 0;
  Matrix matrix;
};

/// Covariance of the sufficient statistics by enumeration over all 2^m
/// subsets (m <= 10).
FisherTheta fisher_theta(const ThetaPoint& theta);

/// Same matrix at a DPP point, from principal minors of the marginal kernel:
/// det K_{I u J} - det K_I det K_J.
Matrix fisher_theta_determinantal(const MarginalKernel& k);

enum class JacobianMode {
  analytic_blocks_fd,  // identity/zero blocks exact, C by finite differences
  full_fd,             // every column by finite differences
};

/// B^I_a = d theta^I / d u^a, shape (2^m - 1) x m(m+1)/2.
struct JacobianB {
  int m = 0;
  Matrix matrix;
  bool step_shrunk = false;  // an FD step was reduced to stay inside u2 < 0
};

JacobianB jacobian_B(const UPoint& u, JacobianMode mode = JacobianMode::analytic_blocks_fd);

/// Second derivatives d^2 theta^I / du^a du^b as a (2^m-1) x d' x d' tensor.
/// Rows of the two free layers are linear in u and are exactly zero.
Tensor3 theta_hessian(const UPoint& u);

/// Fisher information in u: B^T G_theta B.
Matrix fisher_u(const UPoint& u);

/// The singleton/pair cross block of the Fisher matrix evaluated two ways:
/// the displayed closed form with its correction sum, and the block algebra
/// (M_sp + M_sh C) that follows from B^T M B.
struct FisherCrossReport {
  Matrix claimed;       // m x m(m-1)/2
  Matrix ground_truth;  // m x m(m-1)/2
  Matrix discrepancy;   // claimed - ground_truth
  double max_discrepancy = 0.0;
};

FisherCrossReport fisher_u_cross_claimed(const UPoint& u);

/// e-connection coefficients Gamma^e_abc = sum_ij (d_a B^i_b) B^j_c g_ij.
Tensor3 e_connection(const UPoint& u);
/// m-connection coefficients Gamma^m_abc = sum_i (d_a d_b eta_i) B^i_c.
Tensor3 m_connection(const UPoint& u);

/// Columns span the G_theta-orthogonal complement of span(B) and are
/// orthonormal in the Fisher metric. Shape (2^m - 1) x (2^m - 1 - d').
Matrix ancillary_basis(const UPoint& u);

struct CurvatureTensor {
  int m = 0;
  int d_prime = 0;
  int d = 0;
  Tensor3 h;               // d' x d' x (d - d')
  Matrix squared;          // d' x d'
  Matrix ancillary_basis;  // d x (d - d')
};

/// e-embedding curvature H_abk = sum_i (d_a B^i_b)(G_theta A_k)_i and its
/// square sum_k H_k g^{-1} H_k^T (ancillary metric is the identity).
CurvatureTensor e_curvature(const UPoint& u);

/// Block summary used for reporting the vanishing singleton directions.
struct CurvatureBlockReport {
  double max_abs_singleton_h = 0.0;          // max |H_{a1, *, k}| and |H_{*, a1, k}|
  double max_abs_squared_singleton = 0.0;    // S1 x S1 block of [H]^2
  double max_abs_squared_cross = 0.0;        // S1 x S2 block of [H]^2
  double max_abs_squared_pair = 0.0;         // S2 x S2 block of [H]^2
};

CurvatureBlockReport curvature_block_report(const CurvatureTensor& curvature);

}  // namespace dppgeo
