#pragma once

#include <Eigen/Dense>

#include "detline/numerics.hpp"
#include "detline/operator.hpp"

namespace detline {

// A point of the determinant-line fiber D_T written as the value the
// section takes in the chart of its anchor: the pair (A, f(A)) determines
// f on every chart that contains T.
struct SectionGerm {
  TraceClassPerturbation anchor;
  Complex value = {1.0, 0.0};
};

// A map L : Ker(T) -> H with rho_T o L invertible, written through an
// orthonormal basis of the kernel: column i of `images` is L applied to
// column i of `domain_basis`. Makes T + L o pi_T invertible.
struct Regularizer {
  Eigen::MatrixXcd domain_basis;  // n x d, orthonormal columns spanning Ker(T)
  Eigen::MatrixXcd images;        // n x d, ambient images L(e_i)

  int dim() const { return static_cast<int>(domain_basis.cols()); }
};

// A point of the Quillen fiber wedge^d Ker(T)^* (x) wedge^d Coker(T):
// coefficient * (e_1^* ^ ... ^ e_d^*) (x) (w_1 ^ ... ^ w_d), with the w_i
// stored as coordinate vectors in the canonical cokernel basis of T.
// Under a kernel-basis change with matrix g and a cokernel-image change
// with matrix a the coefficient transforms by det(g) / det(a), leaving
// canonical_scalar fixed.
struct DetLineElement {
  Eigen::MatrixXcd kernel_basis;     // n x d, any basis of Ker(T)
  Eigen::MatrixXcd cokernel_images;  // d x d, coordinates rho_T(L(e_i))
  Complex coefficient = {1.0, 0.0};

  int dim() const { return static_cast<int>(kernel_basis.cols()); }
};

// det_F{(T+A)(T+B)^{-1}}, the transition function between the charts of A
// and B. Throws DomainError naming the offending regularizer if T+A or T+B
// fails the invertibility check.
Complex transition(const BlockOperator& t, const TraceClassPerturbation& a,
                   const TraceClassPerturbation& b, const Tolerances& tol = {});

// |g_{A,C} - g_{A,B} g_{B,C}|; the cocycle identity makes this roundoff.
double cocycle_defect(const BlockOperator& t, const TraceClassPerturbation& a,
                      const TraceClassPerturbation& b, const TraceClassPerturbation& c,
                      const Tolerances& tol = {});

// The unique value f(B) of the section germ, f(B) = g_{A,B}(T) f(A).
Complex extend_section(const BlockOperator& t, const SectionGerm& germ,
                       const TraceClassPerturbation& b, const Tolerances& tol = {});

// Pairs the i-th canonical kernel vector with the i-th canonical cokernel
// vector, so rho_T o L is exactly the identity matrix in these bases.
Regularizer canonical_regularizer(const BlockOperator& t, double tol_rank = 1e-9);

// The block of T + L o pi_T.
Eigen::MatrixXcd regularized_block(const BlockOperator& t, const Regularizer& l);

// phi_T applied to the germ: coefficient f(A) * det_F{(T+A)(T+L pi_T)^{-1}}
// against the wedge of L's kernel basis and cokernel images. The result is
// independent (as a fiber element) of the anchor and of L.
DetLineElement quillen_fiber(const BlockOperator& t, const SectionGerm& germ,
                             const Regularizer& l, const Tolerances& tol = {});

// The coefficient of the element after changing to the canonical kernel and
// cokernel bases of kernel_cokernel(T); invariant under the transformation
// law, so it is the unit of comparison between fiber elements.
Complex canonical_scalar(const DetLineElement& elem, const BlockOperator& t,
                         const Tolerances& tol = {});

bool detline_equal(const DetLineElement& lhs, const DetLineElement& rhs, const BlockOperator& t,
                   double rtol = 1e-9, const Tolerances& tol = {});

// Central-difference Cauchy-Riemann residual of z -> g_{A,B}(T + zE) at
// z = 0; O(h^2) for the holomorphic transition functions.
double holomorphy_residual(const BlockOperator& t, const TraceClassPerturbation& a,
                           const TraceClassPerturbation& b, const TraceClassPerturbation& e,
                           double h, const Tolerances& tol = {});

}  // namespace detline
