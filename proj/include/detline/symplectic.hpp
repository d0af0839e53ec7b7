#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "detline/numerics.hpp"
#include "detline/operator.hpp"

namespace detline {

// Standard symplectic R^{2n}: J = [[0, -I], [I, 0]], omega(x, y) = <Jx, y>,
// and the complex structure identifying (q, p) with z = q + i p in C^n.
// With these conventions multiplication by i on C^n is exactly J.
Eigen::MatrixXd standard_J(int n);

struct SymplecticModel {
  int n = 1;

  Eigen::MatrixXd J() const { return standard_J(n); }
  double omega(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  // Hermitian form (x,y) = <x,y> - i <Jx,y> on H_J.
  Complex hermitian(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_complex(const Eigen::VectorXcd& z) const;
};

// A real-linear map commuting with J, written as the complex n x n matrix
// it induces on C^n. Throws NumericalError if the J-commutation residual
// exceeds `tol` (which signals an internal inconsistency, not bad input).
Eigen::MatrixXcd complex_from_real(const Eigen::MatrixXd& r, double tol = 1e-9);

// 2n x 2n real representation of a complex n x n matrix.
Eigen::MatrixXd real_from_complex(const Eigen::MatrixXcd& c);

// Orthonormal 2n x n frame spanning a Lagrangian subspace of R^{2n}.
class LagrangianFrame {
 public:
  // Orthonormalizes arbitrary independent columns, then validates isotropy.
  static LagrangianFrame from_columns(const Eigen::MatrixXd& columns);
  // Accepts columns verbatim; they must already be orthonormal and
  // isotropic (used by file parsing, which must not rewrite payloads).
  static LagrangianFrame from_orthonormal_columns(Eigen::MatrixXd columns);

  int n() const { return static_cast<int>(columns_.cols()); }
  const Eigen::MatrixXd& columns() const { return columns_; }

  Eigen::MatrixXd projector() const;    // P = F F^T
  Eigen::MatrixXd conjugation() const;  // tau = 2P - Id, the anti-linear involution

 private:
  explicit LagrangianFrame(Eigen::MatrixXd columns) : columns_(std::move(columns)) {}
  Eigen::MatrixXd columns_;
};

struct ConjugationData {
  Eigen::MatrixXd projector;
  Eigen::MatrixXd involution;  // 2P - Id
};

ConjugationData conjugation(const LagrangianFrame& lambda);

// Souriau map S_lambda(mu) = -tau_mu tau_lambda as a complex n x n unitary.
// Id + S has complex kernel dimension dim_R(lambda cap mu).
Eigen::MatrixXcd souriau(const LagrangianFrame& lambda, const LagrangianFrame& mu);

// q_lambda(mu) = Id + S_lambda(mu) as an index-zero block operator on C^n.
BlockOperator q_map(const LagrangianFrame& lambda, const LagrangianFrame& mu);

// p_lambda(mu) = P(mu^perp) + P(lambda^perp); symmetric positive
// semidefinite with kernel lambda cap mu.
Eigen::MatrixXd p_map(const LagrangianFrame& lambda, const LagrangianFrame& mu);

struct PairData {
  int dim_intersection = 0;    // dim(lambda cap mu), by principal angles
  int dim_cointersection = 0;  // dim H/(lambda + mu), by rank of [F_l | F_m]
};

// The two routes agree for every Fredholm (here: every) pair. Principal
// angles inside the ambiguity band raise IllConditionedError.
PairData pair_data(const LagrangianFrame& lambda, const LagrangianFrame& mu, double tol = 1e-10);

// T_theta with theta = { x + J(T_theta x) : x in mu } in the splitting
// H = mu + J(mu), written in the frame coordinates of mu. Symmetric.
// Requires theta transversal to J(mu).
Eigen::MatrixXd graph_operator(const LagrangianFrame& theta, const LagrangianFrame& mu,
                               double tol = 1e-9);

enum class ChartMode { complex_on_HJ, real_linear };

// det{(tau_theta - tau_mu)(tau_theta2 - tau_mu)^{-1}}, either as the complex
// determinant on H_J or as the determinant of the real 2n x 2n composition.
// The two readings satisfy real_linear = |complex_on_HJ|^2. Chart operations
// require mu transversal to theta and theta2 with a small principal-angle
// margin (1 - cos >= 2e-5); inside that band DomainError is raised rather
// than returning digits the conditioning cannot support.
Complex chart_transition(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                         const LagrangianFrame& mu, ChartMode mode);

// The four transition determinants (real-linear reading):
//   (P_t - P_m)(P_t2 - P_m)^{-1}, its perp version,
//   (P_t + P_m)(P_t2 + P_m)^{-1}, its perp version.
// All four coincide; prop5_unipotent exposes the mechanism.
std::array<double, 4> prop5_quadruple(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                                      const LagrangianFrame& mu);

struct UnipotentCheck {
  double det = 0.0;             // determinant of the composed operator, = 1
  double diag_residual = 0.0;   // distance of diagonal blocks from Id
  double lower_residual = 0.0;  // the vanishing triangle
  Eigen::MatrixXd corner;       // the only nonzero off-diagonal block
};

// The composition (P_t - P_m)(P_t + P_m)^{-1}(P_t2 - P_m)(P_t2 + P_m)^{-1}
// written in the basis [F_mu | J F_mu]: unipotent with the corner built
// from the difference of graph operators, hence determinant one.
UnipotentCheck prop5_unipotent(const LagrangianFrame& theta, const LagrangianFrame& theta2,
                               const LagrangianFrame& mu);

struct LagrangianPath {
  std::vector<LagrangianFrame> frames;
  bool closed = false;
};

// Throws ValidationError on inadequate sampling (principal-angle step
// >= pi/8) or if a declared-closed path does not close.
void validate_path(const LagrangianPath& path);

// Winding number of t -> det S_lambda(mu(t)) around the unit circle,
// accumulated through per-step phase differences. Positive orientation is
// counterclockwise. Steps with phase >= pi/2 raise UndersampledError.
int maslov_index(const LagrangianFrame& lambda, const LagrangianPath& path);

}  // namespace detline
