#pragma once

// Shared generators and independent oracles for the test suites. The
// oracles deliberately avoid the library's computation paths: plain long
// double products, hand-rolled row reduction, analytic spinors.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "detline/operator.hpp"
#include "detline/symplectic.hpp"

namespace testsupport {

using detline::Complex;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::MatrixXcd random_complex_matrix(Rng& rng, int n, double scale = 1.0) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = scale * Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    }
  }
  return m;
}

inline Eigen::MatrixXcd random_unitary(Rng& rng, int n) {
  const Eigen::MatrixXcd g = random_complex_matrix(rng, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  // Normalize the R diagonal phases so the distribution is Haar-like.
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline Eigen::MatrixXcd random_hermitian(Rng& rng, int n, double scale = 1.0) {
  const Eigen::MatrixXcd m = random_complex_matrix(rng, n, scale);
  return 0.5 * (m + m.adjoint());
}

// Random block with a prescribed exact kernel dimension.
inline detline::BlockOperator random_operator_with_kernel(Rng& rng, int n, int kernel_dim) {
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = (i < n - kernel_dim) ? uniform(rng, 0.5, 2.0) : 0.0;
  const Eigen::MatrixXcd u = random_unitary(rng, n);
  const Eigen::MatrixXcd v = random_unitary(rng, n);
  return detline::BlockOperator(u * sigma.asDiagonal() * v.adjoint());
}

// Random perturbation with T + K comfortably invertible.
inline detline::TraceClassPerturbation random_valid_regularizer(Rng& rng,
                                                                const detline::BlockOperator& t,
                                                                double scale = 1.0) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Eigen::MatrixXcd k = random_complex_matrix(rng, t.size(), scale);
    if (detline::smallest_singular_value(t.block() + k) > 1e-3) {
      return detline::TraceClassPerturbation(k);
    }
  }
  throw std::runtime_error("random_valid_regularizer: no luck after 64 draws");
}

// Lagrangian frame from a unitary: columns [Re U; Im U].
inline Eigen::MatrixXd frame_columns_from_unitary(const Eigen::MatrixXcd& u) {
  const int n = static_cast<int>(u.rows());
  Eigen::MatrixXd f(2 * n, n);
  f.topRows(n) = u.real();
  f.bottomRows(n) = u.imag();
  return f;
}

inline detline::LagrangianFrame random_lagrangian_frame(Rng& rng, int n) {
  return detline::LagrangianFrame::from_orthonormal_columns(
      frame_columns_from_unitary(random_unitary(rng, n)));
}

// Pair with intersection of exact dimension k: mu rotates each remaining
// frame vector inside its own (F_j, J F_j) plane by an angle bounded away
// from 0 and pi.
inline std::pair<detline::LagrangianFrame, detline::LagrangianFrame> random_pair_with_intersection(
    Rng& rng, int n, int k) {
  const Eigen::MatrixXcd u = random_unitary(rng, n);
  Eigen::VectorXcd phases(n);
  for (int j = 0; j < n; ++j) {
    phases(j) = (j < k) ? Complex(1.0, 0.0)
                        : std::polar(1.0, uniform(rng, 0.4, M_PI - 0.4));
  }
  const Eigen::MatrixXcd u2 = u * phases.asDiagonal();
  return {detline::LagrangianFrame::from_orthonormal_columns(frame_columns_from_unitary(u)),
          detline::LagrangianFrame::from_orthonormal_columns(frame_columns_from_unitary(u2))};
}

// ---------------------------------------------------------------------------
// Oracles

// Compensated long double partial product of prod_{k<=N} (1 + 1/k^2).
inline long double partial_product_one_plus_inv_k2(long n) {
  long double p = 1.0L;
  for (long k = 1; k <= n; ++k) {
    const long double kk = static_cast<long double>(k) * static_cast<long double>(k);
    p *= 1.0L + 1.0L / kk;
  }
  return p;
}

// Tail factor exp(sum_{k>N} log(1+1/k^2)): direct summation out to 1e7
// plus the analytic remainder of the integral comparison.
inline long double product_tail_factor(long n) {
  long double tail = 0.0L;
  const long m = 10000000L;
  for (long k = n + 1; k <= m; ++k) {
    const long double kk = static_cast<long double>(k) * static_cast<long double>(k);
    tail += std::log1p(1.0L / kk);
  }
  const long double mm = static_cast<long double>(m);
  tail += 1.0L / mm - 1.0L / (2.0L * mm * mm);
  return std::exp(tail);
}

// Null space of a small complex matrix by Gaussian elimination with partial
// pivoting (independent of the SVD route used by the library).
inline std::vector<Eigen::VectorXcd> rref_nullspace(Eigen::MatrixXcd a, double tol = 1e-10) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = r;
    for (int i = r + 1; i < rows; ++i) {
      if (std::abs(a(i, c)) > std::abs(a(best, c))) best = i;
    }
    if (std::abs(a(best, c)) < tol) continue;
    a.row(r).swap(a.row(best));
    a.row(r) /= a(r, c);
    for (int i = 0; i < rows; ++i) {
      if (i != r) a.row(i) -= a(i, c) * a.row(r);
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<Eigen::VectorXcd> basis;
  for (int c = 0; c < cols; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), c) != pivot_col.end()) continue;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cols);
    v(c) = 1.0;
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i) v(pivot_col[i]) = -a(i, c);
    basis.push_back(v.normalized());
  }
  return basis;
}

}  // namespace testsupport
