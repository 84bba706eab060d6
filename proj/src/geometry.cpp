#include "dppgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dppgeo/errors.hpp"
#include "dppgeo/numdiff.hpp"

namespace dppgeo {
namespace {

void require_m_at_most(int m, int cap, const char* what) {
  if (m > cap)
    fail(ErrorKind::capacity,
         std::string(what) + " supports m <= " + std::to_string(cap) + ", got " + std::to_string(m));
}

void require_interior(const UPoint& u) {
  for (Eigen::Index p = 0; p < u.u2.size(); ++p)
    if (!(u.u2[p] < 0))
      fail(ErrorKind::domain, "derivatives need an interior point (every u2 entry < 0)");
}

int free_dimension(int m) { return m * (m + 1) / 2; }

// Expectation of T_A for every mask A: superset sums of the probability table.
std::vector<double> superset_sums(std::vector<double> table, int m) {
  for (int bit = 0; bit < m; ++bit) {
    const std::uint64_t b = std::uint64_t{1} << bit;
    for (std::uint64_t mask = 0; mask < table.size(); ++mask)
      if (!(mask & b)) table[mask] += table[mask | b];
  }
  return table;
}

Vector eta_of(const UPoint& u, const SubsetIndex& index) {
  const Matrix k = l_to_k(model_kernel(u)).matrix();
  Vector eta(index.size());
  for (int g = 0; g < index.size(); ++g) eta[g] = principal_minor(k, index.mask_at(g));
  return eta;
}

// Evaluates f at u shifted along stacked coordinates.
template <class F>
auto shifted(const UPoint& u, F&& f) {
  return [&u, f = std::forward<F>(f)](int a, double s, int b, double t) {
    Vector x = u.stacked();
    x[a] += s;
    if (b >= 0) x[b] += t;
    return f(UPoint::from_stacked(x, u));
  };
}

double first_step(const UPoint& u, int coord, bool& shrunk) {
  const int m = u.m();
  const double x = coord < m ? u.u1[coord] : u.u2[coord - m];
  double h = 1e-5 * std::max(1.0, std::abs(x));
  if (coord >= m && x + h >= 0) {
    h = 0.1 * std::abs(x);
    shrunk = true;
  }
  return h;
}

double second_step(const UPoint& u, int coord) {
  const int m = u.m();
  if (coord < m) return 1e-3 * std::max(1.0, std::abs(u.u1[coord]));
  return 1e-3 * std::abs(u.u2[coord - m]);
}

// Hessian of a vector-valued function of u; rows below `first_row` skipped.
template <class F>
Tensor3 vector_hessian(const UPoint& u, F&& f, int rows, int first_row) {
  const int dp = u.dimension();
  Tensor3 out(rows, dp, dp);
  auto at = shifted(u, std::forward<F>(f));
  for (int a = 0; a < dp; ++a) {
    const double ha = second_step(u, a);
    for (int b = a; b < dp; ++b) {
      Vector v;
      if (a == b) {
        v = numdiff::richardson_second([&](double t) -> Vector { return at(a, t, -1, 0.0); }, ha);
      } else {
        const double hb = second_step(u, b);
        v = numdiff::richardson_mixed(
            [&](double s, double t) -> Vector { return at(a, s, b, t); }, ha, hb);
      }
      for (int i = first_row; i < rows; ++i) out(i, a, b) = out(i, b, a) = v[i];
    }
  }
  return out;
}

struct PointGeometry {
  Matrix g_theta;
  JacobianB b;
};

PointGeometry point_geometry(const UPoint& u) {
  return {fisher_theta(theta_from_u(u)).matrix, jacobian_B(u)};
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix ancillary_from(const Matrix& g, const Matrix& b) {
  const int d = static_cast<int>(b.rows());
  const int dp = static_cast<int>(b.cols());
  const Matrix w = symmetrized(b.transpose() * g * b);
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-10 * top)
    fail(ErrorKind::degenerate, "Fisher metric restricted to the model is singular");
  const Matrix w_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  auto project_out_model = [&](Vector& v) { v -= b * (w_inv * (b.transpose() * (g * v))); };

  Matrix basis(d, d - dp);
  for (int j = 0; j < d - dp; ++j) {
    Vector v = Vector::Unit(d, dp + j);
    project_out_model(v);
    const double start = v.dot(g * v);
    for (int pass = 0; pass < 2; ++pass) {
      project_out_model(v);
      for (int i = 0; i < j; ++i) v -= basis.col(i).dot(g * v) * basis.col(i);
    }
    const double norm2 = v.dot(g * v);
    if (!(norm2 > 1e-14 * std::max(start, 1e-300)) || !(norm2 > 0))
      fail(ErrorKind::degenerate, "ancillary direction collapsed during orthonormalization");
    basis.col(j) = v / std::sqrt(norm2);
  }
  return basis;
}

}  // namespace

FisherTheta fisher_theta(const ThetaPoint& theta) {
  require_m_at_most(theta.m, kMaxFisherM, "fisher_theta");
  const SubsetIndex index(theta.m);
  const auto eta = superset_sums(loglinear_table(theta), theta.m);
  const int d = index.size();
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    const auto mi = index.mask_at(i);
    for (int j = i; j < d; ++j) {
      const auto mj = index.mask_at(j);
      g(i, j) = g(j, i) = eta[mi | mj] - eta[mi] * eta[mj];
    }
  }
  return {theta.m, std::move(g)};
}

Matrix fisher_theta_determinantal(const MarginalKernel& k) {
  const int m = k.m();
  require_m_at_most(m, kMaxFisherM, "fisher_theta_determinantal");
  const SubsetIndex index(m);
  std::vector<double> minors(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < minors.size(); ++mask)
    minors[mask] = principal_minor(k.matrix(), mask);
  const int d = index.size();
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const auto mi = index.mask_at(i), mj = index.mask_at(j);
      g(i, j) = g(j, i) = minors[mi | mj] - minors[mi] * minors[mj];
    }
  return g;
}

JacobianB jacobian_B(const UPoint& u, JacobianMode mode) {
  check_shape(u);
  require_interior(u);
  const int m = u.m();
  require_m_at_most(m, kMaxEnumerationM, "jacobian_B");
  const SubsetIndex index(m);
  const int d = index.size();
  const int dp = free_dimension(m);

  JacobianB out{m, Matrix::Zero(d, dp), false};
  auto at = shifted(u, [](const UPoint& p) { return theta_from_u(p).values; });
  auto column = [&](int coord) {
    const double h = first_step(u, coord, out.step_shrunk);
    return numdiff::richardson_first([&](double t) -> Vector { return at(coord, t, -1, 0.0); }, h);
  };

  if (mode == JacobianMode::full_fd) {
    for (int a = 0; a < dp; ++a) out.matrix.col(a) = column(a);
    return out;
  }

  out.matrix.topRows(dp).setIdentity();
  for (int p = 0; p < pair_count(m); ++p) {
    const std::uint64_t pair_mask = index.mask_at(m + p);
    const Vector col = column(m + p);
    for (int g = dp; g < d; ++g)
      if ((index.mask_at(g) & pair_mask) == pair_mask) out.matrix(g, m + p) = col[g];
  }
  return out;
}

Tensor3 theta_hessian(const UPoint& u) {
  check_shape(u);
  require_interior(u);
  const int m = u.m();
  require_m_at_most(m, kMaxEnumerationM, "theta_hessian");
  const int d = (1 << m) - 1;
  return vector_hessian(u, [](const UPoint& p) { return theta_from_u(p).values; }, d,
                        free_dimension(m));
}

Matrix fisher_u(const UPoint& u) {
  check_shape(u);
  require_m_at_most(u.m(), kMaxFisherM, "fisher_u");
  const auto pg = point_geometry(u);
  return symmetrized(pg.b.matrix.transpose() * pg.g_theta * pg.b.matrix);
}

FisherCrossReport fisher_u_cross_claimed(const UPoint& u) {
  check_shape(u);
  const int m = u.m();
  require_m_at_most(m, kMaxCrossReportM, "fisher_u_cross_claimed");
  const SubsetIndex index(m);
  const int d = index.size();
  const int dp = free_dimension(m);
  const int pairs = pair_count(m);
  const Matrix k = l_to_k(model_kernel(u)).matrix();
  const auto pg = point_geometry(u);
  const Matrix& c = pg.b.matrix;

  std::vector<double> minors(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < minors.size(); ++mask) minors[mask] = principal_minor(k, mask);

  FisherCrossReport report;
  report.claimed.resize(m, pairs);
  report.ground_truth.resize(m, pairs);
  for (int a = 0; a < m; ++a) {
    const std::uint64_t single = std::uint64_t{1} << a;
    for (int p = 0; p < pairs; ++p) {
      const std::uint64_t pair_mask = index.mask_at(m + p);
      double claimed = minors[single | pair_mask] - minors[single] * minors[pair_mask];
      double truth = pg.g_theta(a, m + p);
      for (int g = dp; g < d; ++g) {
        const std::uint64_t upper = index.mask_at(g);
        truth += pg.g_theta(a, g) * c(g, m + p);
        if ((upper & pair_mask) == pair_mask)
          claimed += minors[pair_mask] * (1.0 - minors[upper]) * c(g, m + p);
      }
      report.claimed(a, p) = claimed;
      report.ground_truth(a, p) = truth;
    }
  }
  report.discrepancy = report.claimed - report.ground_truth;
  report.max_discrepancy = report.discrepancy.size() ? report.discrepancy.cwiseAbs().maxCoeff() : 0.0;
  return report;
}

Tensor3 e_connection(const UPoint& u) {
  check_shape(u);
  require_m_at_most(u.m(), kMaxConnectionM, "e_connection");
  const auto pg = point_geometry(u);
  const Tensor3 d2 = theta_hessian(u);
  const Matrix gb = pg.g_theta * pg.b.matrix;
  const int dp = u.dimension();
  Tensor3 out(dp, dp, dp);
  for (int a = 0; a < dp; ++a)
    for (int b = 0; b < dp; ++b)
      for (int c = 0; c < dp; ++c) {
        double s = 0.0;
        for (int i = dp; i < d2.n0; ++i) s += d2(i, a, b) * gb(i, c);
        out(a, b, c) = s;
      }
  return out;
}

Tensor3 m_connection(const UPoint& u) {
  check_shape(u);
  require_interior(u);
  const int m = u.m();
  require_m_at_most(m, kMaxConnectionM, "m_connection");
  const SubsetIndex index(m);
  const Matrix b = jacobian_B(u).matrix;
  const Tensor3 d2eta =
      vector_hessian(u, [&index](const UPoint& p) { return eta_of(p, index); }, index.size(), 0);
  const int dp = u.dimension();
  Tensor3 out(dp, dp, dp);
  for (int a = 0; a < dp; ++a)
    for (int bb = 0; bb < dp; ++bb)
      for (int c = 0; c < dp; ++c) {
        double s = 0.0;
        for (int i = 0; i < index.size(); ++i) s += d2eta(i, a, bb) * b(i, c);
        out(a, bb, c) = s;
      }
  return out;
}

Matrix ancillary_basis(const UPoint& u) {
  check_shape(u);
  require_m_at_most(u.m(), kMaxFisherM, "ancillary_basis");
  const auto pg = point_geometry(u);
  return ancillary_from(pg.g_theta, pg.b.matrix);
}

CurvatureTensor e_curvature(const UPoint& u) {
  check_shape(u);
  const int m = u.m();
  require_m_at_most(m, kMaxConnectionM, "e_curvature");
  CurvatureTensor out;
  out.m = m;
  out.d_prime = free_dimension(m);
  out.d = (1 << m) - 1;
  const int extra = out.d - out.d_prime;
  out.squared = Matrix::Zero(out.d_prime, out.d_prime);
  out.h = Tensor3(out.d_prime, out.d_prime, extra);
  out.ancillary_basis = Matrix::Zero(out.d, extra);
  if (extra == 0) return out;

  const auto pg = point_geometry(u);
  out.ancillary_basis = ancillary_from(pg.g_theta, pg.b.matrix);
  const Matrix ga = pg.g_theta * out.ancillary_basis;
  const Tensor3 d2 = theta_hessian(u);
  for (int a = 0; a < out.d_prime; ++a)
    for (int b = 0; b < out.d_prime; ++b)
      for (int kappa = 0; kappa < extra; ++kappa) {
        double s = 0.0;
        for (int i = out.d_prime; i < out.d; ++i) s += d2(i, a, b) * ga(i, kappa);
        out.h(a, b, kappa) = s;
      }

  const Matrix metric = symmetrized(pg.b.matrix.transpose() * pg.g_theta * pg.b.matrix);
  const auto inv = symmetric_pinv(metric);
  if (inv.dropped > 0) fail(ErrorKind::degenerate, "Fisher metric in u is singular");
  for (int kappa = 0; kappa < extra; ++kappa) {
    Matrix slice(out.d_prime, out.d_prime);
    for (int a = 0; a < out.d_prime; ++a)
      for (int b = 0; b < out.d_prime; ++b) slice(a, b) = out.h(a, b, kappa);
    out.squared += slice * inv.inverse * slice.transpose();
  }
  out.squared = symmetrized(out.squared);
  return out;
}

CurvatureBlockReport curvature_block_report(const CurvatureTensor& curvature) {
  CurvatureBlockReport r;
  const int m = curvature.m;
  const int dp = curvature.d_prime;
  for (int a = 0; a < dp; ++a)
    for (int b = 0; b < dp; ++b)
      for (int k = 0; k < curvature.h.n2; ++k)
        if (a < m || b < m)
          r.max_abs_singleton_h = std::max(r.max_abs_singleton_h, std::abs(curvature.h(a, b, k)));
  for (int a = 0; a < dp; ++a)
    for (int b = 0; b < dp; ++b) {
      const double v = std::abs(curvature.squared(a, b));
      if (a < m && b < m)
        r.max_abs_squared_singleton = std::max(r.max_abs_squared_singleton, v);
      else if (a < m || b < m)
        r.max_abs_squared_cross = std::max(r.max_abs_squared_cross, v);
      else
        r.max_abs_squared_pair = std::max(r.max_abs_squared_pair, v);
    }
  return r;
}

}  // namespace dppgeo
