#include "detline/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detline/errors.hpp"

namespace detline {

namespace {

void require_square_finite(const Eigen::MatrixXcd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": block must be square and non-empty, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": block has non-finite entries");
  }
}

Eigen::MatrixXcd pad_with_identity(const Eigen::MatrixXcd& m, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n, n);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

// Fix the phase of each column so the entry of largest modulus is real
// positive. Deterministic, and stable under zero padding.
void canonicalize_phases(Eigen::MatrixXcd& cols) {
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < cols.rows(); ++i) {
      const double m = std::abs(cols(i, j));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    if (best > 0.0) cols.col(j) *= std::conj(cols(imax, j)) / best;
  }
}

}  // namespace

BlockOperator::BlockOperator(Eigen::MatrixXcd block) : block_(std::move(block)) {
  require_square_finite(block_, "block_operator");
}

bool BlockOperator::hermitian(double tol) const {
  return (block_ - block_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, block_.cwiseAbs().maxCoeff());
}

TraceClassPerturbation::TraceClassPerturbation() : block_(Eigen::MatrixXcd::Zero(0, 0)) {}

TraceClassPerturbation::TraceClassPerturbation(Eigen::MatrixXcd block) : block_(std::move(block)) {
  if (block_.size() != 0) require_square_finite(block_, "trace_class");
}

Eigen::MatrixXcd TraceClassPerturbation::block_padded(int n) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  out.topLeftCorner(block_.rows(), block_.cols()) = block_;
  return out;
}

BlockOperator pad(const BlockOperator& op, int extra) {
  if (extra < 0) throw ValidationError("pad: negative padding");
  return BlockOperator(pad_with_identity(op.block(), op.size() + extra));
}

TraceClassPerturbation pad(const TraceClassPerturbation& pert, int extra) {
  if (extra < 0) throw ValidationError("pad: negative padding");
  return TraceClassPerturbation(pert.block_padded(pert.size() + extra));
}

double trace_norm(const TraceClassPerturbation& pert) {
  if (pert.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pert.block());
  return svd.singularValues().sum();
}

BlockOperator compose(const BlockOperator& a, const BlockOperator& b) {
  const int n = std::max(a.size(), b.size());
  return BlockOperator(pad_with_identity(a.block(), n) * pad_with_identity(b.block(), n));
}

double operator_distance(const BlockOperator& a, const BlockOperator& b) {
  const int n = std::max(a.size(), b.size());
  return operator_norm(pad_with_identity(a.block(), n) - pad_with_identity(b.block(), n));
}

DetRoutes fredholm_det_routes(const BlockOperator& op) {
  const int n = op.size();
  const Eigen::MatrixXcd k = op.block() - Eigen::MatrixXcd::Identity(n, n);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(k, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("fredholm_det: eigenvalue solver failed to converge");
  }
  DetRoutes out;
  out.eigen_product = Complex(1.0, 0.0);
  out.scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lam = es.eigenvalues()(i);
    out.eigen_product *= Complex(1.0, 0.0) + lam;
    out.scale *= 1.0 + std::abs(lam);
  }
  out.block_det = log_det(op.block()).value();
  return out;
}

Complex fredholm_det(const BlockOperator& op, double tol_det) {
  const DetRoutes r = fredholm_det_routes(op);
  const double diff = std::abs(r.eigen_product - r.block_det);
  const double rel_scale = std::max(std::abs(r.eigen_product), std::abs(r.block_det));
  // Second clause absorbs the genuinely singular case, where both routes
  // produce roundoff-sized values of arbitrary relative distance.
  if (diff > tol_det * rel_scale && diff > 1e-12 * r.scale) {
    throw NumericalError("fredholm_det: eigenvalue-product and block-determinant routes disagree");
  }
  return r.block_det;
}

KernelCokernelData kernel_cokernel(const BlockOperator& op, double tol_rank) {
  if (tol_rank <= 0.0) throw ValidationError("kernel_cokernel: tol must be positive");
  const int n = op.size();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op.block(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();

  // The full operator is block + identity tail, so its largest singular
  // value is at least 1; the cutoff is relative to that.
  const double sigma_op_max = std::max(sigma(0), 1.0);
  const double cut = tol_rank * sigma_op_max;

  int d = 0;
  while (d < n && sigma(n - 1 - d) < cut) ++d;

  const double sigma_below = (d > 0) ? sigma(n - d) : 0.0;
  // The identity tail always contributes singular value 1 above the cutoff.
  const double sigma_above = (d < n) ? std::min(sigma(n - 1 - d), 1.0) : 1.0;
  if (sigma_below > 0.0 && sigma_above < 10.0 * sigma_below) {
    throw IllConditionedError(
        "kernel_cokernel: no 10x relative spectral gap around the rank cutoff (sigma " +
        std::to_string(sigma_below) + " vs " + std::to_string(sigma_above) + ")");
  }

  KernelCokernelData out;
  out.tol_used = tol_rank;
  out.kernel_basis = svd.matrixV().rightCols(d);
  out.cokernel_basis = svd.matrixU().rightCols(d);
  canonicalize_phases(out.kernel_basis);
  canonicalize_phases(out.cokernel_basis);
  return out;
}

Eigen::MatrixXcd KernelCokernelData::kernel_projector() const {
  return kernel_basis * kernel_basis.adjoint();
}

Eigen::MatrixXcd KernelCokernelData::cokernel_coordinates(const Eigen::MatrixXcd& x) const {
  return cokernel_basis.adjoint() * x;
}

double det_difference_bound(const TraceClassPerturbation& k, const TraceClassPerturbation& k2) {
  const int n = std::max(k.size(), k2.size());
  const TraceClassPerturbation diff(k.block_padded(n) - k2.block_padded(n));
  const double n1 = trace_norm(k);
  const double n2 = trace_norm(k2);
  return trace_norm(diff) * std::exp(1.0 + n1 + n2);
}

}  // namespace detline
