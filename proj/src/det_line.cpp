#include "detline/det_line.hpp"

#include <algorithm>
#include <cmath>

#include "detline/errors.hpp"

namespace detline {

namespace {

Eigen::MatrixXcd block_with_identity(const BlockOperator& t, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n, n);
  out.topLeftCorner(t.size(), t.size()) = t.block();
  return out;
}

void require_invertible(const Eigen::MatrixXcd& m, double tol_rank, const char* label) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  const double floor = tol_rank * std::max(s(0), 1.0);
  if (s(s.size() - 1) < floor) {
    throw DomainError(std::string("operator ") + label + " is not invertible (smallest singular value " +
                      std::to_string(s(s.size() - 1)) + ")");
  }
}

}  // namespace

Complex transition(const BlockOperator& t, const TraceClassPerturbation& a,
                   const TraceClassPerturbation& b, const Tolerances& tol) {
  const int n = std::max({t.size(), a.size(), b.size()});
  const Eigen::MatrixXcd m = block_with_identity(t, n);
  const Eigen::MatrixXcd ma = m + a.block_padded(n);
  const Eigen::MatrixXcd mb = m + b.block_padded(n);
  require_invertible(ma, tol.rank, "T+A");
  if (ma == mb) return {1.0, 0.0};  // identical charts, exactly
  require_invertible(mb, tol.rank, "T+B");
  return det_ratio(log_det(ma), log_det(mb));
}

double cocycle_defect(const BlockOperator& t, const TraceClassPerturbation& a,
                      const TraceClassPerturbation& b, const TraceClassPerturbation& c,
                      const Tolerances& tol) {
  const Complex g_ac = transition(t, a, c, tol);
  const Complex g_ab = transition(t, a, b, tol);
  const Complex g_bc = transition(t, b, c, tol);
  return std::abs(g_ac - g_ab * g_bc);
}

Complex extend_section(const BlockOperator& t, const SectionGerm& germ,
                       const TraceClassPerturbation& b, const Tolerances& tol) {
  return transition(t, germ.anchor, b, tol) * germ.value;
}

Regularizer canonical_regularizer(const BlockOperator& t, double tol_rank) {
  const KernelCokernelData kc = kernel_cokernel(t, tol_rank);
  Regularizer l;
  l.domain_basis = kc.kernel_basis;
  l.images = kc.cokernel_basis;
  return l;
}

Eigen::MatrixXcd regularized_block(const BlockOperator& t, const Regularizer& l) {
  Eigen::MatrixXcd m = t.block();
  if (l.dim() > 0) {
    if (l.domain_basis.rows() != m.rows() || l.images.rows() != m.rows()) {
      throw ValidationError("regularizer: basis dimension does not match the operator block");
    }
    // L o pi_T = sum_i images_i <e_i, .>
    m += l.images * l.domain_basis.adjoint();
  }
  return m;
}

namespace {

void validate_regularizer(const BlockOperator& t, const Regularizer& l,
                          const KernelCokernelData& kc, const Tolerances& tol) {
  if (l.dim() != kc.dim()) {
    throw ValidationError("regularizer: expected " + std::to_string(kc.dim()) +
                          " kernel directions, got " + std::to_string(l.dim()));
  }
  if (l.dim() == 0) return;
  if (l.domain_basis.rows() != t.size() || l.images.rows() != t.size()) {
    throw ValidationError("regularizer: basis dimension does not match the operator block");
  }
  const int d = l.dim();
  const Eigen::MatrixXcd gram = l.domain_basis.adjoint() * l.domain_basis;
  if ((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("regularizer: domain basis is not orthonormal");
  }
  const Eigen::MatrixXcd in_kernel = kc.kernel_projector() * l.domain_basis;
  if ((in_kernel - l.domain_basis).cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("regularizer: domain basis does not span Ker(T)");
  }
  // Condition on L: rho_T o L invertible.
  const Eigen::MatrixXcd rho_l = kc.cokernel_coordinates(l.images);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rho_l);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(d - 1) < tol.rank * std::max(s(0), 1.0)) {
    throw ValidationError("regularizer: rho_T o L is not invertible");
  }
}

}  // namespace

DetLineElement quillen_fiber(const BlockOperator& t, const SectionGerm& germ,
                             const Regularizer& l, const Tolerances& tol) {
  const KernelCokernelData kc = kernel_cokernel(t, tol.rank);
  validate_regularizer(t, l, kc, tol);

  const int n = std::max(t.size(), germ.anchor.size());
  const Eigen::MatrixXcd m = block_with_identity(t, n);
  const Eigen::MatrixXcd ma = m + germ.anchor.block_padded(n);
  require_invertible(ma, tol.rank, "T+anchor");

  Eigen::MatrixXcd ml = regularized_block(t, l);
  {
    Eigen::MatrixXcd ml_padded = Eigen::MatrixXcd::Identity(n, n);
    ml_padded.topLeftCorner(ml.rows(), ml.cols()) = ml;
    require_invertible(ml_padded, tol.rank, "T+L.pi_T");
    ml = std::move(ml_padded);
  }

  DetLineElement out;
  out.kernel_basis = l.domain_basis;
  out.cokernel_images = kc.cokernel_coordinates(l.images);
  out.coefficient = germ.value * det_ratio(log_det(ma), log_det(ml));
  return out;
}

Complex canonical_scalar(const DetLineElement& elem, const BlockOperator& t,
                         const Tolerances& tol) {
  const KernelCokernelData kc = kernel_cokernel(t, tol.rank);
  const int d = kc.dim();
  if (elem.dim() != d || elem.cokernel_images.rows() != d || elem.cokernel_images.cols() != d) {
    throw ValidationError("canonical_scalar: element dimensions do not match Ker(T)");
  }
  if (d == 0) return elem.coefficient;

  if (elem.kernel_basis.rows() != t.size()) {
    throw ValidationError("canonical_scalar: kernel basis dimension does not match the operator block");
  }
  // Components of the element's kernel basis in the canonical basis.
  const Eigen::MatrixXcd g = kc.kernel_basis.adjoint() * elem.kernel_basis;
  const double residual = (elem.kernel_basis - kc.kernel_basis * g).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * std::max(1.0, elem.kernel_basis.cwiseAbs().maxCoeff())) {
    throw ValidationError("canonical_scalar: kernel basis does not lie in Ker(T)");
  }
  const LogDet det_g = log_det(g);
  if (std::abs(det_g.value()) == 0.0) {
    throw ValidationError("canonical_scalar: kernel vectors are not a basis");
  }
  return elem.coefficient * det_ratio(log_det(elem.cokernel_images), det_g);
}

bool detline_equal(const DetLineElement& lhs, const DetLineElement& rhs, const BlockOperator& t,
                   double rtol, const Tolerances& tol) {
  if (lhs.dim() != rhs.dim()) return false;
  const Complex a = canonical_scalar(lhs, t, tol);
  const Complex b = canonical_scalar(rhs, t, tol);
  return std::abs(a - b) <= rtol * std::max({std::abs(a), std::abs(b), 1e-300});
}

double holomorphy_residual(const BlockOperator& t, const TraceClassPerturbation& a,
                           const TraceClassPerturbation& b, const TraceClassPerturbation& e,
                           double h, const Tolerances& tol) {
  if (h <= 0.0) throw ValidationError("holomorphy_residual: h must be positive");
  const int n = std::max({t.size(), a.size(), b.size(), e.size()});
  const Eigen::MatrixXcd m = block_with_identity(t, n);
  const Eigen::MatrixXcd ke = e.block_padded(n);

  const auto g_at = [&](Complex z) {
    const BlockOperator tz(m + z * ke);
    return transition(tz, a, b, tol);
  };

  const Complex dx = (g_at({h, 0.0}) - g_at({-h, 0.0})) / (2.0 * h);
  const Complex dy = (g_at({0.0, h}) - g_at({0.0, -h})) / (2.0 * h);
  // Cauchy-Riemann: d/dx + i d/dy vanishes for holomorphic g.
  return std::abs(dx + Complex(0.0, 1.0) * dy);
}

}  // namespace detline
