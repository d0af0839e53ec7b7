#pragma once

#include <Eigen/Dense>
#include <complex>

namespace detline {

using Complex = std::complex<double>;

// Tolerance knobs shared across the library. `rank` drives singular-value
// cutoffs (relative to the operator's largest singular value), `det` drives
// relative comparisons between determinant routes.
struct Tolerances {
  double rank = 1e-9;
  double det = 1e-10;
};

// sin / cos of pi*t, exact at t = 0, 1/2, 1. The suspension construction
// relies on the endpoints being exactly +/-Id.
double sin_pi(double t);
double cos_pi(double t);

// Determinant in log form, det = phase * exp(log_abs). Keeps determinant
// ratios of moderately large blocks away from overflow.
struct LogDet {
  double log_abs = 0.0;        // -inf for a singular factor
  Complex phase = {1.0, 0.0};  // unit modulus, 0 for singular input
  Complex value() const;
};

LogDet log_det(const Eigen::MatrixXcd& a);
LogDet log_det(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu);

// exp(num - den) with phases divided; `den` must be non-singular.
Complex det_ratio(const LogDet& num, const LogDet& den);

double operator_norm(const Eigen::MatrixXcd& a);
double smallest_singular_value(const Eigen::MatrixXcd& a);

// det(num)/det(den) for small real matrices, eliminated in long double;
// keeps determinant ratios of nearly singular factors accurate.
double real_det_ratio(const Eigen::MatrixXd& num, const Eigen::MatrixXd& den);

}  // namespace detline
