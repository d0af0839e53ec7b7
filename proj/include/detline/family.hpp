#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "detline/numerics.hpp"
#include "detline/operator.hpp"

namespace detline {

enum class FamilyBase { circle, suspension };

// Grid-sampled family of block operators over a circle (one row, columns on
// a half-open parameter grid) or a suspension two-sphere (rows t in [0,1]
// closed, columns s half-open). The optional closure unitary W identifies
// the continuation past the last column with W * samples(first) * W^*; the
// stored samples never include the identified endpoint. Conjugation leaves
// every transition function and spectrum unchanged, which is what makes the
// identification legitimate for bundle data.
class OperatorFamily {
 public:
  static OperatorFamily circle(std::vector<BlockOperator> samples,
                               std::optional<Eigen::MatrixXcd> closure = std::nullopt);
  static OperatorFamily suspension(int t_points, int s_points, std::vector<BlockOperator> samples,
                                   std::optional<Eigen::MatrixXcd> closure = std::nullopt);

  FamilyBase base() const { return base_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return dim_; }
  int point_count() const { return rows_ * cols_; }
  int point_id(int i, int j) const { return i * cols_ + j; }

  const BlockOperator& at(int i, int j) const { return samples_[point_id(i, j)]; }
  const BlockOperator& at_id(int id) const { return samples_[id]; }

  bool has_closure() const { return closure_.has_value(); }
  // Identity when no closure was declared.
  Eigen::MatrixXcd closure_or_identity() const;

 private:
  OperatorFamily(FamilyBase base, int rows, int cols, std::vector<BlockOperator> samples,
                 std::optional<Eigen::MatrixXcd> closure);

  FamilyBase base_;
  int rows_ = 0;
  int cols_ = 0;
  int dim_ = 0;
  std::vector<BlockOperator> samples_;
  std::optional<Eigen::MatrixXcd> closure_;
};

// cos(pi t) Id + i sin(pi t) A for a self-adjoint block A; the endpoints
// are exactly +Id and -Id, and the path stays Fredholm for every t.
BlockOperator alpha_path(const BlockOperator& a, double t);

// Suspension of a self-adjoint loop: row i holds alpha_path(D(s_j), t_i)
// with t_i = i/(t_points-1). Closure data is inherited from the loop.
OperatorFamily suspend_loop(const OperatorFamily& loop, int t_points);

// Orientation reversal (reverses the column order; closure becomes W^*).
OperatorFamily reversed(const OperatorFamily& family);

// Signed count of eigenvalue zero crossings of a self-adjoint loop, using
// the closure identification for the final step. Per step, crossings are
// counted inside an adaptively chosen spectral window whose boundary is
// clear of both endpoint spectra; if no such window exists the grid is too
// coarse and UndersampledError is raised. Eigenvalues within 1e-9 of zero
// at a grid point raise NumericalError (refine instead of guessing).
int spectral_flow(const OperatorFamily& loop);

// Finite-rank regularizers assigned to grid-point sets, T + A invertible on
// each covered point.
struct PatchCover {
  struct Patch {
    std::vector<int> points;
    TraceClassPerturbation regularizer;
  };
  std::vector<Patch> patches;
};

// One patch per grid point, A = strength e^{i pi/4} * (projector onto
// singular directions with sigma < sigma_small). The rotated constant keeps
// T + A invertible with margin sin(pi/4) * strength on the lifted
// directions and, unlike a real constant, yields transition functions whose
// windings stay resolvable on families of real operators. The threshold
// must dominate the per-step spectral motion of the family, so that any
// direction crossing zero between neighboring grid points is lifted on
// both sides; the default covers adjacency steps up to the construction
// limit.
PatchCover spectral_patch_cover(const OperatorFamily& family, double sigma_small = 0.35,
                                double strength = 1.0);

// Rectangular bands of grid points sharing the regularizer built at the
// band's central point. Validity over the whole band is checked by
// patch_assignment; coarse bands on fast-varying families are rejected.
PatchCover banded_patch_cover(const OperatorFamily& family, int rows_per_band, int cols_per_band,
                              double sigma_small = 0.35, double strength = 1.0);

// First covering patch per grid point. Validates the cover: every point
// covered and smallest singular value of T + A above 1e-6 on each patch.
std::vector<int> patch_assignment(const OperatorFamily& family, const PatchCover& cover);

struct LinkRecord {
  int patch_from = 0;
  int patch_to = 0;
  int param_index = 0;  // tail grid-point id of the link
  double phase = 0.0;   // radians
};

// Flat Cech transport of a section germ around the circle: the product of
// unit-modulus chart-change factors at successive grid points. Splitting a
// patch leaves the value fixed to roundoff, and covers agree to roundoff
// wherever the transported data is flat (notably the quillen transport of
// self-adjoint loops); across curvature-carrying regions the transport is
// cover-dependent at grid resolution, as any discrete connection choice is.
Complex holonomy(const OperatorFamily& loop, const PatchCover& cover,
                 std::vector<LinkRecord>* links = nullptr, const Tolerances& tol = {});

enum class ChernSelector { quillen, kernel_det, cokernel_det };

// First Chern number of the selected line bundle over the suspension grid,
// computed as the plaquette sum of principal-value phases of link products
// (a discrete Cech curvature). Every interior edge enters two plaquettes
// with opposite orientation, so the sum is an exact multiple of 2 pi;
// plaquette phases >= pi/2 raise UndersampledError. The closure unitary twists the seam links. Selector
// quillen uses transition-function links from the cover; kernel_det and
// cokernel_det use overlap determinants of the canonical frames and require
// constant kernel rank. dim Ker = dim Coker is verified at every point.
int chern_number(const OperatorFamily& family, ChernSelector selector, const PatchCover& cover,
                 std::vector<LinkRecord>* links = nullptr, const Tolerances& tol = {});

// B(v) = (I_2 + v.sigma) + (-1) direct summand, over a sphere grid; the
// kernel is a line for every v and the family is self-adjoint.
OperatorFamily hopf_selfadjoint_family(int t_points, int s_points);

// Diagonal loop d_k(s) = (k+s-1/2)/sqrt(1+(k+s-1/2)^2), k = -m..m, with the
// index-shift closure e_k -> e_{k-1}; one eigenvalue flows upward through
// zero per period. The truncation's closure defect is a rank-one mismatch
// at the saturated edge slot (see sf_closure_residual).
OperatorFamily sf_base_loop(int m, int s_points);

OperatorFamily sf_suspension_family(int m, int t_points, int s_points);

// || D(1) - W D(0) W^* || for the formula continuation of the base loop;
// equals 2 f(m+1/2) concentrated on the wrap slot while every other slot
// matches exactly.
double sf_closure_residual(int m);

// Dispatch by the family-spec file names: "hopf_selfadjoint" (m ignored) or
// "sf_suspension". Sizes validated: sphere grid >= 16x16, m >= 8.
OperatorFamily builtin_family(const std::string& name, int grid_t, int grid_s, int m);

// Extract one latitude row of a suspension as a circle family (closure
// inherited); row -1 selects the middle row.
OperatorFamily latitude_circle(const OperatorFamily& family, int row = -1);

}  // namespace detline
