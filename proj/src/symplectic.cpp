#include "detline/symplectic.hpp"

#include <algorithm>
#include <cmath>

#include "detline/errors.hpp"

namespace detline {

Eigen::MatrixXd standard_J(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  return j;
}

double SymplecticModel::omega(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return (J() * x).dot(y);
}

Complex SymplecticModel::hermitian(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return Complex(x.dot(y), -(J() * x).dot(y));
}

Eigen::VectorXcd SymplecticModel::to_complex(const Eigen::VectorXd& x) const {
  Eigen::VectorXcd z(n);
  for (int k = 0; k < n; ++k) z(k) = Complex(x(k), x(n + k));
  return z;
}

Eigen::VectorXd SymplecticModel::from_complex(const Eigen::VectorXcd& z) const {
  Eigen::VectorXd x(2 * n);
  for (int k = 0; k < n; ++k) {
    x(k) = z(k).real();
    x(n + k) = z(k).imag();
  }
  return x;
}

Eigen::MatrixXcd complex_from_real(const Eigen::MatrixXd& r, double tol) {
  if (r.rows() != r.cols() || r.rows() % 2 != 0) {
    throw ValidationError("complex_from_real: matrix must be 2n x 2n");
  }
  const int n = static_cast<int>(r.rows()) / 2;
  const auto r11 = r.topLeftCorner(n, n);
  const auto r12 = r.topRightCorner(n, n);
  const auto r21 = r.bottomLeftCorner(n, n);
  const auto r22 = r.bottomRightCorner(n, n);
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  const double residual =
      std::max((r11 - r22).cwiseAbs().maxCoeff(), (r12 + r21).cwiseAbs().maxCoeff());
  if (residual > tol * scale) {
    throw NumericalError("complex_from_real: map does not commute with J (residual " +
                         std::to_string(residual) + ")");
  }
  return r11.cast<Complex>() + Complex(0.0, 1.0) * r21.cast<Complex>();
}

Eigen::MatrixXd real_from_complex(const Eigen::MatrixXcd& c) {
  const int n = static_cast<int>(c.rows());
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = c.real();
  r.topRightCorner(n, n) = -c.imag();
  r.bottomLeftCorner(n, n) = c.imag();
  r.bottomRightCorner(n, n) = c.real();
  return r;
}

namespace {

void check_isotropy(const Eigen::MatrixXd& f) {
  const int n = static_cast<int>(f.cols());
  const Eigen::MatrixXd form = f.transpose() * standard_J(n) * f;
  if (form.cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("lagrangian_frame: span is not isotropic (omega residual " +
                          std::to_string(form.cwiseAbs().maxCoeff()) + ")");
  }
}

void check_shape(const Eigen::MatrixXd& columns) {
  if (columns.rows() == 0 || columns.rows() % 2 != 0 || columns.cols() != columns.rows() / 2) {
    throw ValidationError("lagrangian_frame: need a 2n x n column matrix, got " +
                          std::to_string(columns.rows()) + "x" + std::to_string(columns.cols()));
  }
  if (!columns.allFinite()) throw ValidationError("lagrangian_frame: non-finite entries");
}

}  // namespace

LagrangianFrame LagrangianFrame::from_columns(const Eigen::MatrixXd& columns) {
  check_shape(columns);
  const int n = static_cast<int>(columns.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(columns);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  double rmax = 0.0;
  for (int i = 0; i < n; ++i) rmax = std::max(rmax, std::abs(r(i, i)));
  for (int i = 0; i < n; ++i) {
    if (std::abs(r(i, i)) < 1e-12 * std::max(rmax, 1.0)) {
      throw ValidationError("lagrangian_frame: columns are rank deficient");
    }
  }
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, n);
  check_isotropy(q);
  return LagrangianFrame(std::move(q));
}

LagrangianFrame LagrangianFrame::from_orthonormal_columns(Eigen::MatrixXd columns) {
  check_shape(columns);
  const int n = static_cast<int>(columns.cols());
  const Eigen::MatrixXd gram = columns.transpose() * columns;
  if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("lagrangian_frame: columns are not orthonormal");
  }
  check_isotropy(columns);
  return LagrangianFrame(std::move(columns));
}

Eigen::MatrixXd LagrangianFrame::projector() const { return columns_ * columns_.transpose(); }

Eigen::MatrixXd LagrangianFrame::conjugation() const {
  return 2.0 * projector() - Eigen::MatrixXd::Identity(columns_.rows(), columns_.rows());
}

ConjugationData conjugation(const LagrangianFrame& lambda) {
  ConjugationData out;
  out.projector = lambda.projector();
  out.involution = lambda.conjugation();
  return out;
}

Eigen::MatrixXcd souriau(const LagrangianFrame& lambda, const LagrangianFrame& mu) {
  if (lambda.n() != mu.n()) throw ValidationError("souriau: frames live in different models");
  const Eigen::MatrixXd s_real = -(mu.conjugation() * lambda.conjugation());
  return complex_from_real(s_real);
}

BlockOperator q_map(const LagrangianFrame& lambda, const LagrangianFrame& mu) {
  const int n = lambda.n();
  return BlockOperator(Eigen::MatrixXcd::Identity(n, n) + souriau(lambda, mu));
}

Eigen::MatrixXd p_map(const LagrangianFrame& lambda, const LagrangianFrame& mu) {
  if (lambda.n() != mu.n()) throw ValidationError("p_map: frames live in different models");
  const int two_n = 2 * lambda.n();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(two_n, two_n);
  return (id - mu.projector()) + (id - lambda.projector());
}

PairData pair_data(const LagrangianFrame& lambda, const LagrangianFrame& mu, double tol) {
  if (lambda.n() != mu.n()) throw ValidationError("pair_data: frames live in different models");
  const int n = lambda.n();

  // Principal angles: cos(theta_i) are the singular values of F_l^T F_m.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lambda.columns().transpose() * mu.columns());
  PairData out;
  for (int i = 0; i < n; ++i) {
    const double gap = 1.0 - svd.singularValues()(i);
    if (gap <= tol) {
      ++out.dim_intersection;
    } else if (gap < 10.0 * tol) {
      throw IllConditionedError("pair_data: principal angle inside the ambiguity band (1-cos = " +
                                std::to_string(gap) + ")");
    }
  }

  // Independent route: dim H/(lambda+mu) = 2n - rank[F_l | F_m]. The small
  // singular values of the concatenation are sqrt(1 - cos), so the matching
  // cutoff is sqrt(tol).
  Eigen::MatrixXd concat(2 * n, 2 * n);
  concat.leftCols(n) = lambda.columns();
  concat.rightCols(n) = mu.columns();
  Eigen::JacobiSVD<Eigen::MatrixXd> csvd(concat);
  int rank = 0;
  for (int i = 0; i < 2 * n; ++i) {
    const double s2 = csvd.singularValues()(i) * csvd.singularValues()(i);
    if (s2 > tol) {
      ++rank;
    }
  }
  out.dim_cointersection = 2 * n - rank;
  return out;
}

Eigen::MatrixXd graph_operator(const LagrangianFrame& theta, const LagrangianFrame& mu,
                               double tol) {
  if (theta.n() != mu.n()) throw ValidationError("graph_operator: frames live in different models");
  const int n = mu.n();
  const Eigen::MatrixXd j = standard_J(n);
  // Coordinates of theta's frame in the splitting mu + J(mu).
  const Eigen::MatrixXd a = mu.columns().transpose() * theta.columns();
  const Eigen::MatrixXd b = (j * mu.columns()).transpose() * theta.columns();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(n - 1) < tol) {
    throw DomainError("graph_operator: theta is not a graph over mu (theta meets J(mu))");
  }
  return b * svd.solve(Eigen::MatrixXd::Identity(n, n));
}

namespace {

// Quantitative transversality: the chart determinants involve the inverses
// of P_theta + P_mu, whose smallest eigenvalue is 1 - cos(angle_min). The
// margin keeps the determinant identities representable at the 1e-10 level
// in double precision.
constexpr double kTransversalityMargin = 2e-5;

void require_transversal(const LagrangianFrame& theta, const LagrangianFrame& mu,
                         const char* label) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta.columns().transpose() * mu.columns());
  const double gap = 1.0 - svd.singularValues()(0);
  if (gap < kTransversalityMargin) {
    throw DomainError(std::string("chart requires mu transversal to ") + label +
                      " with margin (1 - cos = " + std::to_string(gap) + ")");
  }
}

}  // namespace

Complex chart_transition(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                         const LagrangianFrame& mu, ChartMode mode) {
  if (theta.n() != mu.n() || theta2.n() != mu.n()) {
    throw ValidationError("chart_transition: frames live in different models");
  }
  require_transversal(theta, mu, "theta");
  require_transversal(theta2, mu, "theta2");

  // (tau_t - tau_m)(tau_t2 - tau_m)^{-1} = (P_t - P_m)(P_t2 - P_m)^{-1};
  // each factor is anti-linear, so only the composition is J-commuting.
  const Eigen::MatrixXd num = theta.projector() - mu.projector();
  const Eigen::MatrixXd den = theta2.projector() - mu.projector();

  if (mode == ChartMode::real_linear) {
    return Complex(real_det_ratio(num, den), 0.0);
  }
  const Eigen::MatrixXd composed = num * den.partialPivLu().inverse();
  const Eigen::MatrixXcd c = complex_from_real(composed);
  return log_det(c).value();
}

std::array<double, 4> prop5_quadruple(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                                      const LagrangianFrame& mu) {
  if (theta.n() != mu.n() || theta2.n() != mu.n()) {
    throw ValidationError("prop5_quadruple: frames live in different models");
  }
  require_transversal(theta, mu, "theta");
  require_transversal(theta2, mu, "theta2");

  const int two_n = 2 * mu.n();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(two_n, two_n);
  const Eigen::MatrixXd pt = theta.projector();
  const Eigen::MatrixXd pt2 = theta2.projector();
  const Eigen::MatrixXd pm = mu.projector();

  // det(N D^{-1}) = det(N)/det(D); factor-wise in extended precision, which
  // keeps the four routes together near marginal transversality.
  const auto ratio = [](const Eigen::MatrixXd& num, const Eigen::MatrixXd& den) {
    return real_det_ratio(num, den);
  };

  const std::array<double, 4> out = {
      ratio(pt - pm, pt2 - pm),
      ratio((id - pt) - (id - pm), (id - pt2) - (id - pm)),
      ratio(pt + pm, pt2 + pm),
      ratio((id - pt) + (id - pm), (id - pt2) + (id - pm)),
  };

  const UnipotentCheck check = prop5_unipotent(theta, theta2, mu);
  if (std::abs(check.det - 1.0) > 1e-8) {
    throw NumericalError("prop5_quadruple: unipotent determinant deviates from 1 by " +
                         std::to_string(std::abs(check.det - 1.0)));
  }
  return out;
}

UnipotentCheck prop5_unipotent(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                               const LagrangianFrame& mu) {
  require_transversal(theta, mu, "theta");
  require_transversal(theta2, mu, "theta2");
  const int n = mu.n();
  const int two_n = 2 * n;
  const Eigen::MatrixXd pt = theta.projector();
  const Eigen::MatrixXd pt2 = theta2.projector();
  const Eigen::MatrixXd pm = mu.projector();

  const Eigen::MatrixXd composed = (pt - pm) * (pt + pm).partialPivLu().inverse() * (pt2 - pm) *
                                   (pt2 + pm).partialPivLu().inverse();

  // Express in the splitting basis [F_mu | J F_mu].
  Eigen::MatrixXd basis(two_n, two_n);
  basis.leftCols(n) = mu.columns();
  basis.rightCols(n) = standard_J(n) * mu.columns();
  const Eigen::MatrixXd g = basis.transpose() * composed * basis;

  UnipotentCheck out;
  // Factor-wise determinant in extended precision.
  out.det = real_det_ratio(pt - pm, pt + pm) * real_det_ratio(pt2 - pm, pt2 + pm);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  out.diag_residual = std::max((g.topLeftCorner(n, n) - id).cwiseAbs().maxCoeff(),
                               (g.bottomRightCorner(n, n) - id).cwiseAbs().maxCoeff());
  out.lower_residual = g.bottomLeftCorner(n, n).cwiseAbs().maxCoeff();
  out.corner = g.topRightCorner(n, n);
  return out;
}

void validate_path(const LagrangianPath& path) {
  if (path.frames.size() < 2) throw ValidationError("lagrangian_path: need at least two frames");
  const int n = path.frames.front().n();
  for (const auto& f : path.frames) {
    if (f.n() != n) throw ValidationError("lagrangian_path: frames of mixed dimension");
  }
  // Sampling adequacy: principal-angle step below pi/8.
  const double min_cos = std::cos(M_PI / 8.0);
  for (std::size_t k = 0; k + 1 < path.frames.size(); ++k) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(path.frames[k].columns().transpose() *
                                          path.frames[k + 1].columns());
    if (svd.singularValues()(n - 1) < min_cos) {
      throw ValidationError("lagrangian_path: consecutive frames further than pi/8 apart at step " +
                            std::to_string(k));
    }
  }
  if (path.closed) {
    const double gap =
        (path.frames.front().projector() - path.frames.back().projector()).cwiseAbs().maxCoeff();
    if (gap > 1e-9) {
      throw ValidationError("lagrangian_path: declared closed but endpoints differ by " +
                            std::to_string(gap));
    }
  }
}

int maslov_index(const LagrangianFrame& lambda, const LagrangianPath& path) {
  validate_path(path);
  if (!path.closed) throw ValidationError("maslov_index: path must be closed");

  double total = 0.0;
  Complex prev = log_det(souriau(lambda, path.frames.front())).phase;
  for (std::size_t k = 1; k < path.frames.size(); ++k) {
    const Complex cur = log_det(souriau(lambda, path.frames[k])).phase;
    const double step = std::arg(cur / prev);
    if (std::abs(step) >= M_PI / 2.0) {
      throw UndersampledError("maslov_index: phase step " + std::to_string(step) +
                              " at sample " + std::to_string(k) + "; refine the path");
    }
    total += step;
    prev = cur;
  }
  const double winding = total / (2.0 * M_PI);
  const double rounded = std::round(winding);
  if (std::abs(winding - rounded) > 1e-2) {
    throw NumericalError("maslov_index: accumulated winding " + std::to_string(winding) +
                         " is not close to an integer");
  }
  return static_cast<int>(rounded);
}

}  // namespace detline
