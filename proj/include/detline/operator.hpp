#pragma once

#include <Eigen/Dense>

#include "detline/numerics.hpp"

namespace detline {

// Operator on a separable complex sequence space that acts as a finite
// n x n block on the leading coordinates and as the identity beyond.
// Every such operator is Fredholm of index zero, and two representations
// that differ by padding the block with an identity denote the same
// operator.
class BlockOperator {
 public:
  explicit BlockOperator(Eigen::MatrixXcd block);

  int size() const { return static_cast<int>(block_.rows()); }
  const Eigen::MatrixXcd& block() const { return block_; }

  bool hermitian(double tol = 1e-10) const;

 private:
  Eigen::MatrixXcd block_;
};

// Finite-rank perturbation supported on the leading block; acts as zero
// beyond the block, so padding appends zero rows/columns.
class TraceClassPerturbation {
 public:
  TraceClassPerturbation();  // the zero perturbation (empty block)
  explicit TraceClassPerturbation(Eigen::MatrixXcd block);

  int size() const { return static_cast<int>(block_.rows()); }
  const Eigen::MatrixXcd& block() const { return block_; }

  // Block extended by zeros to dimension n (n >= size()).
  Eigen::MatrixXcd block_padded(int n) const;

 private:
  Eigen::MatrixXcd block_;
};

BlockOperator pad(const BlockOperator& op, int extra);
TraceClassPerturbation pad(const TraceClassPerturbation& pert, int extra);

double trace_norm(const TraceClassPerturbation& pert);

// Composition of the two operators (blocks padded to a common size).
BlockOperator compose(const BlockOperator& a, const BlockOperator& b);

// Operator-norm distance between two block operators (padded).
double operator_distance(const BlockOperator& a, const BlockOperator& b);

struct DetRoutes {
  Complex eigen_product;  // prod(1 + lambda_i) over eigenvalues of K = M - I
  Complex block_det;      // plain determinant of the block M
  double scale;           // prod(1 + |lambda_i|), used as an error scale
};

DetRoutes fredholm_det_routes(const BlockOperator& op);

// Fredholm determinant of Id + K, K = block - I. Computed along two
// independent routes (eigenvalue product and LU determinant of the block)
// which must agree; throws NumericalError if the eigensolver route
// disagrees with the determinant route.
Complex fredholm_det(const BlockOperator& op, double tol_det = 1e-10);

// Orthonormal kernel basis, cokernel representatives (orthogonal complement
// of the range), pi_T and rho_T. dim kernel == dim cokernel always.
struct KernelCokernelData {
  Eigen::MatrixXcd kernel_basis;    // size x d, orthonormal columns
  Eigen::MatrixXcd cokernel_basis;  // size x d, orthonormal columns
  double tol_used = 0.0;

  int dim() const { return static_cast<int>(kernel_basis.cols()); }
  Eigen::MatrixXcd kernel_projector() const;  // pi_T = V V^*
  // rho_T: coordinates of (column) vectors w.r.t. the cokernel basis.
  Eigen::MatrixXcd cokernel_coordinates(const Eigen::MatrixXcd& x) const;
};

// Rank detection is relative: singular values below tol * max(sigma_max, 1)
// count as kernel directions (the identity tail contributes singular value
// 1, hence the floor). A 10x relative gap around the cutoff is required;
// otherwise IllConditionedError is thrown rather than guessing.
KernelCokernelData kernel_cokernel(const BlockOperator& op, double tol_rank = 1e-9);

// ||K - K2||_1 * exp(1 + ||K||_1 + ||K2||_1), a Lipschitz bound dominating
// |det_F(Id+K) - det_F(Id+K2)|.
double det_difference_bound(const TraceClassPerturbation& k, const TraceClassPerturbation& k2);

}  // namespace detline
