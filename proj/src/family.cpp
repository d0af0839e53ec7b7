#include "detline/family.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "detline/errors.hpp"

namespace detline {

namespace {

constexpr double kAdjacencyLimit = 0.45;
constexpr double kCoverMargin = 1e-6;

double adjacency_distance(const BlockOperator& a, const BlockOperator& b) {
  // Frobenius dominates the operator norm; only fall back to the SVD when
  // the cheap bound is inconclusive.
  const double frob = (a.block() - b.block()).norm();
  if (frob < kAdjacencyLimit) return frob;
  return operator_distance(a, b);
}

LogDet checked_log_det(const Eigen::MatrixXcd& m, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (lu.rcond() < 1e-12) {
    throw DomainError(std::string(what) + ": operator is numerically singular; invalid cover");
  }
  return log_det(lu);
}

}  // namespace

OperatorFamily::OperatorFamily(FamilyBase base, int rows, int cols,
                               std::vector<BlockOperator> samples,
                               std::optional<Eigen::MatrixXcd> closure)
    : base_(base), rows_(rows), cols_(cols), samples_(std::move(samples)),
      closure_(std::move(closure)) {
  if (rows_ < 1 || cols_ < 1 || samples_.size() != static_cast<std::size_t>(rows_ * cols_)) {
    throw ValidationError("operator_family: sample count does not match the grid");
  }
  dim_ = samples_.front().size();
  for (const auto& s : samples_) {
    if (s.size() != dim_) throw ValidationError("operator_family: blocks of mixed size");
  }
  if (closure_.has_value()) {
    if (closure_->rows() != dim_ || closure_->cols() != dim_) {
      throw ValidationError("operator_family: closure unitary has wrong dimension");
    }
    const Eigen::MatrixXcd residual =
        closure_->adjoint() * (*closure_) - Eigen::MatrixXcd::Identity(dim_, dim_);
    if (residual.cwiseAbs().maxCoeff() > 1e-12) {
      throw ValidationError("operator_family: closure matrix is not unitary");
    }
  }
  // Grid adjacency, seam excluded (the seam is a chart identification).
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j + 1 < cols_; ++j) {
      const double d = adjacency_distance(at(i, j), at(i, j + 1));
      if (d >= kAdjacencyLimit) {
        throw ValidationError("operator_family: adjacent samples differ by " + std::to_string(d) +
                              " in operator norm; refine the grid");
      }
    }
  }
  for (int i = 0; i + 1 < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      const double d = adjacency_distance(at(i, j), at(i + 1, j));
      if (d >= kAdjacencyLimit) {
        throw ValidationError("operator_family: adjacent samples differ by " + std::to_string(d) +
                              " in operator norm; refine the grid");
      }
    }
  }
}

OperatorFamily OperatorFamily::circle(std::vector<BlockOperator> samples,
                                      std::optional<Eigen::MatrixXcd> closure) {
  const int cols = static_cast<int>(samples.size());
  return OperatorFamily(FamilyBase::circle, 1, cols, std::move(samples), std::move(closure));
}

OperatorFamily OperatorFamily::suspension(int t_points, int s_points,
                                          std::vector<BlockOperator> samples,
                                          std::optional<Eigen::MatrixXcd> closure) {
  return OperatorFamily(FamilyBase::suspension, t_points, s_points, std::move(samples),
                        std::move(closure));
}

Eigen::MatrixXcd OperatorFamily::closure_or_identity() const {
  if (closure_.has_value()) return *closure_;
  return Eigen::MatrixXcd::Identity(dim_, dim_);
}

BlockOperator alpha_path(const BlockOperator& a, double t) {
  if (t < 0.0 || t > 1.0) throw ValidationError("alpha_path: t must lie in [0,1]");
  if (!a.hermitian(1e-10)) throw ValidationError("alpha_path: block must be Hermitian");
  const int n = a.size();
  // The imaginary coupling keeps every point of the path Fredholm
  // (|h|^2 = cos^2 + sin^2 A^2 stays essentially invertible) and is what
  // makes the suspension of a flow loop carry its winding; a real
  // combination would produce a pointwise-real family whose index class is
  // forced to be trivial.
  return BlockOperator(cos_pi(t) * Eigen::MatrixXcd::Identity(n, n) +
                       Complex(0.0, sin_pi(t)) * a.block());
}

OperatorFamily suspend_loop(const OperatorFamily& loop, int t_points) {
  if (loop.base() != FamilyBase::circle) {
    throw ValidationError("suspend_loop: input must be a circle family");
  }
  if (!loop.has_closure()) {
    throw ValidationError("suspend_loop: loop must carry closure data");
  }
  if (t_points < 3) throw ValidationError("suspend_loop: need at least 3 suspension rows");
  std::vector<BlockOperator> samples;
  samples.reserve(static_cast<std::size_t>(t_points) * loop.cols());
  for (int i = 0; i < t_points; ++i) {
    const double t = static_cast<double>(i) / (t_points - 1);
    for (int j = 0; j < loop.cols(); ++j) {
      samples.push_back(alpha_path(loop.at(0, j), t));
    }
  }
  return OperatorFamily::suspension(t_points, loop.cols(), std::move(samples),
                                    loop.has_closure()
                                        ? std::optional<Eigen::MatrixXcd>(loop.closure_or_identity())
                                        : std::nullopt);
}

OperatorFamily reversed(const OperatorFamily& family) {
  std::vector<BlockOperator> samples;
  samples.reserve(family.point_count());
  for (int i = 0; i < family.rows(); ++i) {
    for (int j = family.cols() - 1; j >= 0; --j) samples.push_back(family.at(i, j));
  }
  std::optional<Eigen::MatrixXcd> closure;
  if (family.has_closure()) closure = family.closure_or_identity().adjoint().eval();
  if (family.base() == FamilyBase::circle) {
    return OperatorFamily::circle(std::move(samples), std::move(closure));
  }
  return OperatorFamily::suspension(family.rows(), family.cols(), std::move(samples),
                                    std::move(closure));
}

namespace {

std::vector<double> hermitian_eigenvalues(const BlockOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.block(), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + op.size());
  return out;
}

// Smallest window (-w, w) whose boundary keeps a clearance larger than the
// per-step eigenvalue motion on both endpoint spectra. Crossings are then
// exactly the change of the negative count inside the window, and closure
// artifacts far from zero stay outside.
double pick_window(const std::vector<double>& a, const std::vector<double>& b, double motion,
                   bool allow_full) {
  std::vector<double> mags;
  mags.reserve(a.size() + b.size());
  for (double v : a) mags.push_back(std::abs(v));
  for (double v : b) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end());
  // A window past the largest magnitude would count conjugation-closure
  // artifacts as crossings, so it is only offered on genuine continuity
  // steps.
  const std::size_t last = allow_full ? mags.size() : mags.size() - 1;
  double lo = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double hi = (k < mags.size()) ? mags[k] : mags.back() + 4.0 * motion;
    const double mid = 0.5 * (lo + hi);
    const double clearance = 0.5 * (hi - lo);
    if (mid > motion && clearance > motion) return mid;
    lo = hi;
  }
  return -1.0;
}

int negatives_inside(const std::vector<double>& eigs, double w) {
  int c = 0;
  for (double v : eigs) {
    if (v > -w && v < 0.0) ++c;
  }
  return c;
}

}  // namespace

int spectral_flow(const OperatorFamily& loop) {
  if (loop.base() != FamilyBase::circle) {
    throw ValidationError("spectral_flow: input must be a circle family");
  }
  const int s = loop.cols();
  std::vector<std::vector<double>> eigs(s);
  double scale = 0.0;
  for (int j = 0; j < s; ++j) {
    if (!loop.at(0, j).hermitian(1e-10)) {
      throw ValidationError("spectral_flow: sample " + std::to_string(j) + " is not Hermitian");
    }
    eigs[j] = hermitian_eigenvalues(loop.at(0, j));
    for (double v : eigs[j]) scale = std::max(scale, std::abs(v));
  }
  const double zero_tol = 1e-9 * std::max(scale, 1.0);
  for (int j = 0; j < s; ++j) {
    for (double v : eigs[j]) {
      if (std::abs(v) < zero_tol) {
        throw NumericalError("spectral_flow: eigenvalue within tolerance of zero at grid point " +
                             std::to_string(j) + "; refine the grid");
      }
    }
  }

  double interior_motion = 1e-12 * std::max(scale, 1.0);
  std::vector<double> motions(s, interior_motion);
  for (int j = 0; j + 1 < s; ++j) {
    motions[j] = std::max(operator_distance(loop.at(0, j), loop.at(0, j + 1)), motions[j]);
    interior_motion = std::max(interior_motion, motions[j]);
  }
  // The final step runs through the conjugation seam, where the matrix
  // difference overstates genuine eigenvalue motion; use the largest
  // interior step as the motion bound instead.
  motions[s - 1] = interior_motion;

  int total = 0;
  for (int j = 0; j < s; ++j) {
    const std::vector<double>& a = eigs[j];
    // Conjugation preserves spectra, so the continuation past the last
    // sample has exactly the spectrum of the first one.
    const std::vector<double>& b = eigs[(j + 1) % s];
    const bool twisted_seam = (j == s - 1) && loop.has_closure();
    const double w = pick_window(a, b, motions[j], /*allow_full=*/!twisted_seam);
    if (w <= 0.0) {
      throw UndersampledError("spectral_flow: no spectral window clears the step motion at step " +
                              std::to_string(j) + "; refine the grid");
    }
    total += negatives_inside(a, w) - negatives_inside(b, w);
  }
  return total;
}

namespace {

// Regularizers are spectral projections scaled by strength * e^{i pi/4}.
// The complex phase matters: families of real operators produce real
// transition functions whose plaquette fluxes degenerate to unresolvable
// +/- pi jumps, while the rotated constant keeps |sigma + c| >= sin(pi/4)
// and spreads the winding into accumulable phases.
constexpr double kRegularizerPhase = M_PI / 4.0;

Eigen::MatrixXcd spectral_regularizer(const Eigen::MatrixXcd& block, double sigma_small,
                                      double strength) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int n = static_cast<int>(block.rows());
  const Complex c = strength * std::polar(1.0, kRegularizerPhase);
  Eigen::MatrixXcd reg = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (svd.singularValues()(i) < sigma_small) {
      reg += c * svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
    }
  }
  return reg;
}

}  // namespace

PatchCover spectral_patch_cover(const OperatorFamily& family, double sigma_small,
                                double strength) {
  if (sigma_small <= 0.0 || strength <= sigma_small) {
    throw ValidationError("spectral_patch_cover: need 0 < sigma_small < strength");
  }
  PatchCover cover;
  cover.patches.reserve(family.point_count());
  for (int id = 0; id < family.point_count(); ++id) {
    cover.patches.push_back(
        {{id},
         TraceClassPerturbation(spectral_regularizer(family.at_id(id).block(), sigma_small,
                                                     strength))});
  }
  return cover;
}

PatchCover banded_patch_cover(const OperatorFamily& family, int rows_per_band, int cols_per_band,
                              double sigma_small, double strength) {
  if (rows_per_band < 1 || cols_per_band < 1) {
    throw ValidationError("banded_patch_cover: band sizes must be positive");
  }
  PatchCover cover;
  for (int i0 = 0; i0 < family.rows(); i0 += rows_per_band) {
    for (int j0 = 0; j0 < family.cols(); j0 += cols_per_band) {
      const int i1 = std::min(i0 + rows_per_band, family.rows());
      const int j1 = std::min(j0 + cols_per_band, family.cols());
      PatchCover::Patch patch;
      for (int i = i0; i < i1; ++i) {
        for (int j = j0; j < j1; ++j) patch.points.push_back(family.point_id(i, j));
      }
      const int mid = family.point_id((i0 + i1 - 1) / 2, (j0 + j1 - 1) / 2);
      patch.regularizer = TraceClassPerturbation(
          spectral_regularizer(family.at_id(mid).block(), sigma_small, strength));
      cover.patches.push_back(std::move(patch));
    }
  }
  return cover;
}

std::vector<int> patch_assignment(const OperatorFamily& family, const PatchCover& cover) {
  std::vector<int> assign(family.point_count(), -1);
  for (std::size_t p = 0; p < cover.patches.size(); ++p) {
    for (int id : cover.patches[p].points) {
      if (id < 0 || id >= family.point_count()) {
        throw DomainError("patch_cover: patch references a point outside the grid");
      }
      if (assign[id] == -1) assign[id] = static_cast<int>(p);
    }
  }
  for (int id = 0; id < family.point_count(); ++id) {
    if (assign[id] == -1) {
      throw DomainError("patch_cover: grid point " + std::to_string(id) + " is not covered");
    }
  }
  const int n = family.dim();
  for (const auto& patch : cover.patches) {
    for (int id : patch.points) {
      const Eigen::MatrixXcd m = family.at_id(id).block() + patch.regularizer.block_padded(n);
      if (smallest_singular_value(m) <= kCoverMargin) {
        throw DomainError("patch_cover: T + A loses invertibility at covered point " +
                          std::to_string(id));
      }
    }
  }
  return assign;
}

namespace {

// Link variables: exactly antisymmetric unit-modulus chart-change factors
// between adjacent grid points, evaluated at both ends. Across the seam the
// regularizers are pulled through the closure conjugation.
class LinkEngine {
 public:
  LinkEngine(const OperatorFamily& family, const PatchCover& cover, ChernSelector selector,
             const Tolerances& tol, std::vector<LinkRecord>* records)
      : family_(family), cover_(cover), selector_(selector),
        assign_(patch_assignment(family, cover)), w_(family.closure_or_identity()),
        twisted_(family.has_closure()), records_(records) {
    if (selector_ != ChernSelector::quillen) {
      kc_.reserve(family_.point_count());
      for (int id = 0; id < family_.point_count(); ++id) {
        kc_.push_back(kernel_cokernel(family_.at_id(id), tol.rank));
      }
      for (int id = 1; id < family_.point_count(); ++id) {
        if (kc_[id].dim() != kc_[0].dim()) {
          throw DomainError("chern_number: kernel dimension is not constant on the grid (" +
                            std::to_string(kc_[0].dim()) + " vs " + std::to_string(kc_[id].dim()) +
                            ")");
        }
      }
    }
  }

  // dim Ker = dim Coker bookkeeping at every grid point.
  void verify_index_zero(const Tolerances& tol) const {
    for (int id = 0; id < family_.point_count(); ++id) {
      const KernelCokernelData kc =
          (selector_ != ChernSelector::quillen) ? kc_[id] : kernel_cokernel(family_.at_id(id), tol.rank);
      if (static_cast<int>(kc.kernel_basis.cols()) != static_cast<int>(kc.cokernel_basis.cols())) {
        throw NumericalError("chern_number: index bookkeeping failed at grid point " +
                             std::to_string(id));
      }
    }
  }

  Complex link(int x, int y, bool seam) {
    const Complex u = (selector_ == ChernSelector::quillen) ? quillen_link(x, y, seam)
                                                            : frame_link(x, y, seam);
    if (records_ && u != Complex(1.0, 0.0)) {
      records_->push_back({assign_[x], assign_[y], x, std::arg(u)});
    }
    return u;
  }

 private:
  Complex cached_phase(int point, int patch) {
    const long long key =
        static_cast<long long>(point) * (static_cast<long long>(cover_.patches.size()) + 1) + patch;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const int n = family_.dim();
    const Eigen::MatrixXcd m =
        family_.at_id(point).block() + cover_.patches[patch].regularizer.block_padded(n);
    const Complex phase = checked_log_det(m, "chern/holonomy link").phase;
    cache_.emplace(key, phase);
    return phase;
  }

  // Phase of det(T_point + W^* A_patch W), the chart pulled through the
  // closure identification.
  Complex conjugated_phase(int point, int patch) {
    const int n = family_.dim();
    const Eigen::MatrixXcd reg = cover_.patches[patch].regularizer.block_padded(n);
    const Eigen::MatrixXcd conj_reg = w_.adjoint() * reg * w_;
    return checked_log_det(family_.at_id(point).block() + conj_reg, "chern/holonomy seam link")
        .phase;
  }

  Complex quillen_link(int x, int y, bool seam) {
    const int a = assign_[x];
    const int b = assign_[y];
    if (!seam || !twisted_) {
      if (a == b) return {1.0, 0.0};
      // Chart change g_{A,B} at the head of the edge, phase only.
      return cached_phase(y, a) * std::conj(cached_phase(y, b));
    }
    // Chart A continued through the seam arrives as W^* A W.
    return conjugated_phase(y, a) * std::conj(cached_phase(y, b));
  }

  Complex frame_link(int x, int y, bool seam) {
    const Eigen::MatrixXcd& fx = (selector_ == ChernSelector::kernel_det)
                                     ? kc_[x].kernel_basis
                                     : kc_[x].cokernel_basis;
    const Eigen::MatrixXcd& fy = (selector_ == ChernSelector::kernel_det)
                                     ? kc_[y].kernel_basis
                                     : kc_[y].cokernel_basis;
    if (fx.cols() == 0) return {1.0, 0.0};
    const Eigen::MatrixXcd overlap =
        (seam && twisted_) ? (fx.adjoint() * w_ * fy).eval() : (fx.adjoint() * fy).eval();
    const Complex u = overlap.determinant();
    if (std::abs(u) < 1e-6) {
      throw UndersampledError("chern_number: frame overlap collapsed between grid points " +
                              std::to_string(x) + " and " + std::to_string(y) +
                              "; refine the grid");
    }
    return u / std::abs(u);
  }

  const OperatorFamily& family_;
  const PatchCover& cover_;
  ChernSelector selector_;
  std::vector<int> assign_;
  Eigen::MatrixXcd w_;
  bool twisted_;
  std::vector<LinkRecord>* records_;
  std::vector<KernelCokernelData> kc_;
  std::unordered_map<long long, Complex> cache_;
};

}  // namespace

Complex holonomy(const OperatorFamily& loop, const PatchCover& cover,
                 std::vector<LinkRecord>* links, const Tolerances& tol) {
  if (loop.base() != FamilyBase::circle) {
    throw ValidationError("holonomy: input must be a circle family");
  }
  LinkEngine engine(loop, cover, ChernSelector::quillen, tol, links);
  Complex value{1.0, 0.0};
  const int s = loop.cols();
  for (int j = 0; j < s; ++j) {
    value *= engine.link(j, (j + 1) % s, /*seam=*/j == s - 1);
  }
  return value;
}

int chern_number(const OperatorFamily& family, ChernSelector selector, const PatchCover& cover,
                 std::vector<LinkRecord>* links, const Tolerances& tol) {
  if (family.base() != FamilyBase::suspension || family.rows() < 2) {
    throw ValidationError("chern_number: input must be a suspension family");
  }
  LinkEngine engine(family, cover, selector, tol, links);
  engine.verify_index_zero(tol);

  const int rows = family.rows();
  const int s = family.cols();
  std::vector<Complex> horizontal(static_cast<std::size_t>(rows) * s);
  std::vector<Complex> vertical(static_cast<std::size_t>(rows - 1) * s);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < s; ++j) {
      horizontal[static_cast<std::size_t>(i) * s + j] =
          engine.link(family.point_id(i, j), family.point_id(i, (j + 1) % s), j == s - 1);
    }
  }
  for (int i = 0; i + 1 < rows; ++i) {
    for (int j = 0; j < s; ++j) {
      vertical[static_cast<std::size_t>(i) * s + j] =
          engine.link(family.point_id(i, j), family.point_id(i + 1, j), false);
    }
  }

  // Plaquette field strengths; the fixed row-major reduction order keeps the
  // result bit-reproducible.
  double total = 0.0;
  for (int i = 0; i + 1 < rows; ++i) {
    for (int j = 0; j < s; ++j) {
      const int jn = (j + 1) % s;
      const Complex around = horizontal[static_cast<std::size_t>(i) * s + j] *
                             vertical[static_cast<std::size_t>(i) * s + jn] *
                             std::conj(horizontal[static_cast<std::size_t>(i + 1) * s + j]) *
                             std::conj(vertical[static_cast<std::size_t>(i) * s + j]);
      const double f = std::arg(around);
      if (std::abs(f) >= M_PI / 2.0) {
        throw UndersampledError("chern_number: plaquette phase " + std::to_string(f) +
                                " at cell (" + std::to_string(i) + "," + std::to_string(j) +
                                "); refine the grid");
      }
      total += f;
    }
  }
  const double c = total / (2.0 * M_PI);
  const double rounded = std::round(c);
  if (std::abs(c - rounded) > 1e-6) {
    throw NumericalError("chern_number: plaquette sum " + std::to_string(c) +
                         " is not an integer multiple of 2 pi");
  }
  return static_cast<int>(rounded);
}

namespace {

double sf_profile(double x) { return x / std::sqrt(1.0 + x * x); }

Eigen::MatrixXcd pauli(int k) {
  Eigen::MatrixXcd s(2, 2);
  switch (k) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

}  // namespace

OperatorFamily hopf_selfadjoint_family(int t_points, int s_points) {
  if (t_points < 3 || s_points < 3) {
    throw ValidationError("hopf_selfadjoint: grid too small");
  }
  std::vector<BlockOperator> samples;
  samples.reserve(static_cast<std::size_t>(t_points) * s_points);
  for (int i = 0; i < t_points; ++i) {
    const double t = static_cast<double>(i) / (t_points - 1);
    const double st = sin_pi(t);
    const double ct = cos_pi(t);
    for (int j = 0; j < s_points; ++j) {
      const double phi = 2.0 * M_PI * j / s_points;
      const Eigen::Vector3d v(st * std::cos(phi), st * std::sin(phi), ct);
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(3, 3);
      block.topLeftCorner(2, 2) = Eigen::MatrixXcd::Identity(2, 2) + v(0) * pauli(0) +
                                  v(1) * pauli(1) + v(2) * pauli(2);
      block(2, 2) = -1.0;
      samples.emplace_back(std::move(block));
    }
  }
  return OperatorFamily::suspension(t_points, s_points, std::move(samples));
}

// The grid carries a fixed fractional offset so the structural zero of the
// middle diagonal entry at s = 1/2 never lands on a sample.
constexpr double kLoopGridOffset = 0.381966011250105;

OperatorFamily sf_base_loop(int m, int s_points) {
  if (m < 1 || s_points < 4) throw ValidationError("sf_base_loop: sizes too small");
  const int n = 2 * m + 1;
  std::vector<BlockOperator> samples;
  samples.reserve(s_points);
  for (int j = 0; j < s_points; ++j) {
    const double s = (static_cast<double>(j) + kLoopGridOffset) / s_points;
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const int k = r - m;
      block(r, r) = sf_profile(k + s - 0.5);
    }
    samples.emplace_back(std::move(block));
  }
  // Index shift e_k -> e_{k-1}, cyclically completed to a unitary.
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 1; r < n; ++r) w(r - 1, r) = 1.0;
  w(n - 1, 0) = 1.0;
  return OperatorFamily::circle(std::move(samples), w);
}

OperatorFamily sf_suspension_family(int m, int t_points, int s_points) {
  return suspend_loop(sf_base_loop(m, s_points), t_points);
}

double sf_closure_residual(int m) {
  const int n = 2 * m + 1;
  Eigen::VectorXd d1(n);
  for (int r = 0; r < n; ++r) d1(r) = sf_profile(r - m + 0.5);
  Eigen::VectorXd shifted(n);
  for (int r = 0; r < n; ++r) shifted(r) = sf_profile(((r + 1) % n) - m - 0.5);
  return (d1 - shifted).cwiseAbs().maxCoeff();
}

OperatorFamily builtin_family(const std::string& name, int grid_t, int grid_s, int m) {
  if (name == "hopf_selfadjoint") {
    if (grid_t < 16 || grid_s < 16) {
      throw ValidationError("builtin_family: hopf_selfadjoint needs a sphere grid >= 16x16");
    }
    return hopf_selfadjoint_family(grid_t, grid_s);
  }
  if (name == "sf_suspension") {
    if (grid_t < 16 || grid_s < 16) {
      throw ValidationError("builtin_family: sf_suspension needs a grid >= 16x16");
    }
    if (m < 8) throw ValidationError("builtin_family: sf_suspension needs m >= 8");
    return sf_suspension_family(m, grid_t, grid_s);
  }
  throw ValidationError("builtin_family: unknown family '" + name + "'");
}

OperatorFamily latitude_circle(const OperatorFamily& family, int row) {
  if (family.base() != FamilyBase::suspension) {
    throw ValidationError("latitude_circle: input must be a suspension family");
  }
  if (row < 0) row = family.rows() / 2;
  if (row >= family.rows()) throw ValidationError("latitude_circle: row out of range");
  std::vector<BlockOperator> samples;
  samples.reserve(family.cols());
  for (int j = 0; j < family.cols(); ++j) samples.push_back(family.at(row, j));
  return OperatorFamily::circle(std::move(samples),
                                family.has_closure()
                                    ? std::optional<Eigen::MatrixXcd>(family.closure_or_identity())
                                    : std::nullopt);
}

}  // namespace detline
