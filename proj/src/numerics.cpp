#include "detline/numerics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace detline {

double sin_pi(double t) {
  if (t == 0.0 || t == 1.0 || t == -1.0) return 0.0;
  if (t == 0.5) return 1.0;
  if (t == -0.5) return -1.0;
  return std::sin(M_PI * t);
}

double cos_pi(double t) {
  if (t == 0.0) return 1.0;
  if (t == 0.5 || t == -0.5) return 0.0;
  if (t == 1.0 || t == -1.0) return -1.0;
  return std::cos(M_PI * t);
}

Complex LogDet::value() const {
  if (log_abs == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
  return phase * std::exp(log_abs);
}

LogDet log_det(const Eigen::MatrixXcd& a) {
  return log_det(Eigen::PartialPivLU<Eigen::MatrixXcd>(a));
}

LogDet log_det(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  const auto& u = lu.matrixLU();
  LogDet out;
  out.phase = Complex(static_cast<double>(lu.permutationP().determinant()), 0.0);
  out.log_abs = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Complex d = u(i, i);
    const double m = std::abs(d);
    if (m == 0.0) {
      out.log_abs = -std::numeric_limits<double>::infinity();
      out.phase = {0.0, 0.0};
      return out;
    }
    out.log_abs += std::log(m);
    out.phase *= d / m;
  }
  return out;
}

Complex det_ratio(const LogDet& num, const LogDet& den) {
  if (num.log_abs == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
  return num.phase * std::conj(den.phase) * std::exp(num.log_abs - den.log_abs);
}

double operator_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

double smallest_singular_value(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

namespace {

long double long_det(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<long double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i) * n + j] = a(i, j);
  }
  long double det = 1.0L;
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::fabs(m[static_cast<std::size_t>(i) * n + k]) >
          std::fabs(m[static_cast<std::size_t>(pivot) * n + k])) {
        pivot = i;
      }
    }
    if (m[static_cast<std::size_t>(pivot) * n + k] == 0.0L) return 0.0L;
    if (pivot != k) {
      for (int j = 0; j < n; ++j) {
        std::swap(m[static_cast<std::size_t>(pivot) * n + j],
                  m[static_cast<std::size_t>(k) * n + j]);
      }
      det = -det;
    }
    const long double d = m[static_cast<std::size_t>(k) * n + k];
    det *= d;
    for (int i = k + 1; i < n; ++i) {
      const long double factor = m[static_cast<std::size_t>(i) * n + k] / d;
      for (int j = k; j < n; ++j) {
        m[static_cast<std::size_t>(i) * n + j] -= factor * m[static_cast<std::size_t>(k) * n + j];
      }
    }
  }
  return det;
}

}  // namespace

double real_det_ratio(const Eigen::MatrixXd& num, const Eigen::MatrixXd& den) {
  return static_cast<double>(long_det(num) / long_det(den));
}

}  // namespace detline
