#pragma once

// Single-fiber matrix model of a one-parameter deformation family of cyclic
// Higgs-type data on C^{2p+1}, its real locus, and the induced pencils of
// tangent maps on the spacelike Grassmannian of R^{p,p+1}.
//
// The complex fiber carries coordinates indexed 0..2p with grading labels
// p - j (so the first coordinate has label p, the middle one label 0). A
// family member is a nilpotent pattern N_t with entries on the first
// subdiagonal only; combined with its adjoint it yields, for each unit
// complex number z, a real endomorphism psi_z of the real locus which is
// q-anti-self-adjoint and swaps the two q-definite summands. Restricting to
// the q-positive summand produces a tangent map at the model basepoint, and
// z = 1, i span a two-dimensional pencil.
//
// The module also provides the complex structures that act on one q-definite
// summand (label parity equal to p: for odd p the q-negative summand carries
// the structure; for even p it lives on the quotient by the grading-0
// coordinate), the identity suites certifying how those structures interact
// with the pencils, a numeric winding certificate for the fiber bundle over
// the direction sphere at p = 3, and a deformation-path regularity check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "einfiber/linalg.hpp"
#include "einfiber/pencils.hpp"
#include "einfiber/quadratic_space.hpp"
#include "einfiber/report.hpp"
#include "einfiber/rng.hpp"
#include "einfiber/symspace.hpp"

namespace einfiber {

enum class GradingParity { kOdd, kEven };

inline GradingParity parity_of(int p) {
  return p % 2 == 0 ? GradingParity::kEven : GradingParity::kOdd;
}

namespace detail {
inline int label_parity(int label) { return ((label % 2) + 2) % 2; }
}  // namespace detail

// ---------------------------------------------------------------------------
// Deformation family
// ---------------------------------------------------------------------------

// One-parameter family of graded nilpotent patterns N_t. The only nonzero
// entries are N_t(j+1, j), the arrow from the coordinate with grading label
// i = p - j down to label i - 1, with coefficient in {1, t}:
//
//   label parity of the source equals the parity of p:  1 for i > 0, t else
//   otherwise:                                          t for i > 0, 1 else
//
// At t = 1 every arrow carries 1 (the constant-ones chain); at t = 0 the
// chain splits into short blocks. Coefficients are mirror-symmetric,
// c_i = c_{1-i}, which is exactly the condition for z N + conj(z) N^H to
// preserve the real locus; the sabotage constructor therefore zeroes a
// mirror pair of arrows, staying inside real endomorphisms while destroying
// regularity.
class HiggsPencilFamily {
 public:
  explicit HiggsPencilFamily(int p) : HiggsPencilFamily(p, parity_of(p)) {}

  HiggsPencilFamily(int p, GradingParity parity) : p_(p) {
    if (p < 3) {
      throw std::invalid_argument(
          "p ≥ 3 required; p = 2 treated in prior work");
    }
    if (parity != parity_of(p)) {
      throw std::invalid_argument(
          "HiggsPencilFamily: grading parity must match the parity of p");
    }
  }

  // Family with the arrows emanating from grading labels source_label and
  // 1 - source_label removed (both, to keep the pattern mirror-symmetric).
  static HiggsPencilFamily sabotaged(int p, int source_label) {
    HiggsPencilFamily fam(p);
    if (source_label > p || source_label < 1 - p) {
      throw std::invalid_argument(
          "HiggsPencilFamily::sabotaged: no arrow has that source label");
    }
    fam.sabotage_ = source_label;
    return fam;
  }

  int p() const { return p_; }
  int n() const { return 2 * p_ + 1; }
  GradingParity parity() const { return parity_of(p_); }
  bool is_sabotaged() const { return sabotage_.has_value(); }

  // Grading label carried by complex coordinate `col` (0-based).
  int grading_label(int col) const { return p_ - col; }

  double arrow_coefficient(int source_label, double t) const {
    if (source_label > p_ || source_label < 1 - p_) {
      throw std::invalid_argument(
          "HiggsPencilFamily: no arrow has that source label");
    }
    if (sabotage_ &&
        (source_label == *sabotage_ || source_label == 1 - *sabotage_)) {
      return 0.0;
    }
    if (detail::label_parity(source_label) == p_ % 2) {
      return source_label > 0 ? 1.0 : t;
    }
    return source_label > 0 ? t : 1.0;
  }

  Eigen::MatrixXcd nilpotent_pattern(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument(
          "HiggsPencilFamily: deformation parameter t must lie in [0, 1]");
    }
    Eigen::MatrixXcd pattern = Eigen::MatrixXcd::Zero(n(), n());
    for (int j = 0; j + 1 < n(); ++j) {
      pattern(j + 1, j) = arrow_coefficient(grading_label(j), t);
    }
    return pattern;
  }

 private:
  int p_;
  std::optional<int> sabotage_;
};

// ---------------------------------------------------------------------------
// Real locus chart
// ---------------------------------------------------------------------------

// The real locus of the complex fiber is the fixed set of the antilinear
// involution (lambda v)_j = conj(v_{2p-j}). An orthonormal real basis of it
// (which is simultaneously a unitary basis of C^{2p+1}) is, writing e_i for
// the complex coordinate with grading label i,
//
//   f(a_i) = (e_i + e_{-i}) / sqrt(2),  f(b_i) = i (e_i - e_{-i}) / sqrt(2)
//
// for i = p..1, followed by the grading-0 coordinate.  In this chart the
// quadratic form is diagonal with entries +1 on labels whose parity differs
// from p and -1 on the others, so the chart splits into a q-positive
// p-dimensional summand and a q-negative (p+1)-dimensional one; their
// enumeration orders below define the dictionary to the model basepoint.
class RealLocusChart {
 public:
  explicit RealLocusChart(int p) : p_(p) {
    if (p < 3) {
      throw std::invalid_argument(
          "p ≥ 3 required; p = 2 treated in prior work");
    }
    const int n = dim();
    const double s = 1.0 / std::sqrt(2.0);
    const std::complex<double> is(0.0, s);
    basis_ = Eigen::MatrixXcd::Zero(n, n);
    q_signs_ = Eigen::VectorXd::Zero(n);
    for (int i = p; i >= 1; --i) {
      const int col = 2 * (p - i);
      basis_(p - i, col) = s;
      basis_(p + i, col) = s;
      basis_(p - i, col + 1) = is;
      basis_(p + i, col + 1) = -is;
      q_signs_[col] = grading_sign(i);
      q_signs_[col + 1] = grading_sign(i);
    }
    basis_(p, n - 1) = 1.0;
    q_signs_[n - 1] = grading_sign(0);
    for (int k = 0; k < n; ++k) {
      (q_signs_[k] > 0.0 ? base_idx_ : perp_idx_).push_back(k);
    }
  }

  int p() const { return p_; }
  int dim() const { return 2 * p_ + 1; }
  const Eigen::MatrixXcd& basis() const { return basis_; }
  const Eigen::VectorXd& q_signs() const { return q_signs_; }

  // Chart coordinates spanning the q-positive / q-negative summand, in the
  // enumeration order used for the model dictionary (descending grading
  // label, with the grading-0 coordinate last when it belongs to the list).
  const std::vector<int>& base_indices() const { return base_idx_; }
  const std::vector<int>& perp_indices() const { return perp_idx_; }

  // +1 when the label parity differs from the parity of p, else -1.
  double grading_sign(int label) const {
    return detail::label_parity(label) != p_ % 2 ? 1.0 : -1.0;
  }

  Eigen::VectorXcd conjugation(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      out[j] = std::conj(v[v.size() - 1 - j]);
    }
    return out;
  }

  // Distance of v from the real locus in the max norm; zero exactly on it.
  double membership_residual(const Eigen::VectorXcd& v) const {
    return (conjugation(v) - v).cwiseAbs().maxCoeff();
  }

  Eigen::VectorXcd embed(const Eigen::VectorXd& x) const {
    return basis_ * x.cast<std::complex<double>>();
  }

  Eigen::VectorXd coords(const Eigen::VectorXcd& v) const {
    return (basis_.adjoint() * v).real();
  }

 private:
  int p_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXd q_signs_;
  std::vector<int> base_idx_;
  std::vector<int> perp_idx_;
};

inline Eigen::VectorXd gather_coords(const Eigen::VectorXd& x,
                                     const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = x[idx[k]];
  }
  return out;
}

// Dictionary to the model quadratic space: the k-th q-positive chart
// coordinate corresponds to column k of the basepoint's spacelike basis and
// the k-th q-negative coordinate to column k of its timelike complement.
// Both Gram matrices match (+I and -I), so this is an isometry.
inline Eigen::VectorXd chart_to_model(const RealLocusChart& chart,
                                      const SpacelikePoint& at,
                                      const Eigen::VectorXd& x) {
  if (x.size() != chart.dim() || at.space().n() != chart.dim()) {
    throw std::invalid_argument("chart_to_model: dimension mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(chart.dim());
  const auto& base = chart.base_indices();
  const auto& perp = chart.perp_indices();
  for (std::size_t k = 0; k < base.size(); ++k) {
    out += x[base[k]] * at.base_basis().col(static_cast<Eigen::Index>(k));
  }
  for (std::size_t k = 0; k < perp.size(); ++k) {
    out += x[perp[k]] * at.perp_basis().col(static_cast<Eigen::Index>(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complex structure on the summand of full label parity
// ---------------------------------------------------------------------------

// The coordinates with label parity equal to the parity of p form, over the
// reals, a direct sum of the 2-planes span{f(a_i), f(b_i)} (plus the
// grading-0 coordinate when p is even). Multiplication by ∓i on e_{±i}
// (odd p) respectively ±i on e_{±i} (even p) preserves the real locus and
// induces an exact integer rotation on each 2-plane:
//
//   odd p:  (x_a, x_b) -> (x_b, -x_a)   on the q-negative summand
//   even p: (x_a, x_b) -> (-x_b, x_a)   on the quotient by the grading-0
//                                        coordinate (realized by deletion)
struct ComplexStructureJ {
  GradingParity parity = GradingParity::kOdd;
  std::vector<int> domain;  // chart coordinate indices the structure acts on
  Eigen::MatrixXd matrix;   // square of size domain.size(), J^2 = -I exactly
};

inline ComplexStructureJ build_J(const HiggsPencilFamily& fam) {
  const RealLocusChart chart(fam.p());
  ComplexStructureJ out;
  out.parity = fam.parity();
  if (out.parity == GradingParity::kOdd) {
    out.domain = chart.perp_indices();
  } else {
    for (int k = 0; k + 1 < chart.dim(); ++k) out.domain.push_back(k);
  }
  const int nd = static_cast<int>(out.domain.size());
  out.matrix = Eigen::MatrixXd::Zero(nd, nd);
  for (int m = 0; m + 1 < nd; m += 2) {
    if (out.parity == GradingParity::kOdd) {
      out.matrix(m, m + 1) = 1.0;
      out.matrix(m + 1, m) = -1.0;
    } else {
      out.matrix(m, m + 1) = -1.0;
      out.matrix(m + 1, m) = 1.0;
    }
  }
  return out;
}

// Applies the structure to a full chart vector: coordinates off the domain
// are annihilated (for even p this realizes the quotient projection; for odd
// p the inputs of interest are supported on the domain to begin with).
inline Eigen::VectorXd apply_J_full(const ComplexStructureJ& j,
                                    const Eigen::VectorXd& x) {
  const Eigen::VectorXd rotated =
      j.matrix * gather_coords(x, j.domain);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (std::size_t k = 0; k < j.domain.size(); ++k) {
    out[j.domain[k]] = rotated[static_cast<Eigen::Index>(k)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pencil construction
// ---------------------------------------------------------------------------

struct ChartEndomorphism {
  Eigen::MatrixXd chart;    // real matrix in chart coordinates
  double reality_residual;  // largest |imaginary part| discarded
};

// Assembles psi_z = z N_t + conj(z) N_t^H in the real chart. Preconditions:
// |z| = 1 (within 1e-12). The result must be real (residual above 1e-12 is
// an invariant violation) and must swap the two q-definite summands; the
// same-sign blocks are sums of structural zeros and are checked to vanish
// bitwise.
inline ChartEndomorphism build_psi_chart(const RealLocusChart& chart,
                                         const HiggsPencilFamily& fam,
                                         double t, std::complex<double> z) {
  if (chart.p() != fam.p()) {
    throw std::invalid_argument("build_psi: chart and family sizes differ");
  }
  if (std::abs(std::abs(z) - 1.0) > 1e-12) {
    throw std::invalid_argument("build_psi: z must lie on the unit circle");
  }
  const Eigen::MatrixXcd pattern = fam.nilpotent_pattern(t);
  const Eigen::MatrixXcd hermitian_part =
      z * pattern + std::conj(z) * pattern.adjoint();
  const Eigen::MatrixXcd in_chart =
      chart.basis().adjoint() * (hermitian_part * chart.basis());
  ChartEndomorphism out;
  out.reality_residual = in_chart.imag().cwiseAbs().maxCoeff();
  if (out.reality_residual > 1e-12) {
    throw std::runtime_error(
        "build_psi: endomorphism does not preserve the real locus");
  }
  out.chart = in_chart.real();
  for (int r : chart.base_indices()) {
    for (int c : chart.base_indices()) {
      if (out.chart(r, c) != 0.0) {
        throw std::runtime_error(
            "build_psi: q-positive diagonal block is not exactly zero");
      }
    }
  }
  for (int r : chart.perp_indices()) {
    for (int c : chart.perp_indices()) {
      if (out.chart(r, c) != 0.0) {
        throw std::runtime_error(
            "build_psi: q-negative diagonal block is not exactly zero");
      }
    }
  }
  return out;
}

// The q-positive -> q-negative block of psi_z as a tangent map at the model
// basepoint. q-anti-self-adjointness makes the opposite block its transpose,
// so this block is the full content of the endomorphism.
inline TangentMap build_psi(const HiggsPencilFamily& fam, double t,
                            std::complex<double> z) {
  const QuadraticSpace space(fam.p());
  const RealLocusChart chart(fam.p());
  const ChartEndomorphism psi = build_psi_chart(chart, fam, t, z);
  const auto& base = chart.base_indices();
  const auto& perp = chart.perp_indices();
  Eigen::MatrixXd block(static_cast<Eigen::Index>(perp.size()),
                        static_cast<Eigen::Index>(base.size()));
  for (std::size_t b = 0; b < perp.size(); ++b) {
    for (std::size_t a = 0; a < base.size(); ++a) {
      block(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
          psi.chart(perp[b], base[a]);
    }
  }
  return TangentMap{SpacelikePoint::basepoint(space), std::move(block)};
}

inline Pencil pencil_at(const HiggsPencilFamily& fam, double t) {
  TangentMap g1 = build_psi(fam, t, {1.0, 0.0});
  TangentMap gi = build_psi(fam, t, {0.0, 1.0});
  SpacelikePoint base = g1.base;
  return Pencil(std::move(base), {std::move(g1), std::move(gi)});
}

// Connected blocks of z N_t + conj(z) N_t^H along the chain of complex
// coordinates, together with the numeric rank of each diagonal block. At
// t = 1 there is a single block of corank one; at t = 0 the chain splits
// into rank-2 blocks of size 2, plus (odd p) one central size-3 block of
// rank 2 or (even p) one central size-1 block of rank 0.
struct PsiBlockStructure {
  std::vector<std::pair<int, int>> blocks;  // inclusive coordinate ranges
  std::vector<int> ranks;
  int total_rank = 0;
};

inline PsiBlockStructure psi_block_structure(const HiggsPencilFamily& fam,
                                             double t,
                                             std::complex<double> z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "psi_block_structure: z must lie on the unit circle");
  }
  const Eigen::MatrixXcd pattern = fam.nilpotent_pattern(t);
  const Eigen::MatrixXcd hermitian_part =
      z * pattern + std::conj(z) * pattern.adjoint();
  PsiBlockStructure out;
  const int n = fam.n();
  int start = 0;
  for (int j = 0; j < n; ++j) {
    const bool linked = j + 1 < n && std::abs(pattern(j + 1, j)) > 0.0;
    if (linked) continue;
    const int size = j - start + 1;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        hermitian_part.block(start, start, size, size));
    const Eigen::VectorXd& sv = svd.singularValues();
    int rank = 0;
    if (sv.size() > 0 && sv[0] > 0.0) {
      for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv[k] > kRankTol * sv[0]) ++rank;
      }
    }
    out.blocks.emplace_back(start, j);
    out.ranks.push_back(rank);
    out.total_rank += rank;
    start = j + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regularity sweep over the deformation square
// ---------------------------------------------------------------------------

struct SweepResult {
  double min_margin = std::numeric_limits<double>::infinity();
  double argmin_t = 0.0;
  double argmin_theta = 0.0;
};

// Minimum over the (t, theta) grid of the relative smallest singular value
// of the pencil direction cos(theta) psi_1 + sin(theta) psi_i. The grid is
// t = i/(t_steps-1) for i = 0..t_steps-1 and theta = pi j/dir_steps for
// j = 0..dir_steps-1.
inline SweepResult regularity_sweep(const HiggsPencilFamily& fam, int t_steps,
                                    int dir_steps) {
  if (t_steps < 2) {
    throw std::invalid_argument("regularity_sweep: t_steps must be at least 2");
  }
  if (dir_steps < 8) {
    throw std::invalid_argument(
        "regularity_sweep: dir_steps must be at least 8");
  }
  SweepResult out;
  const int p = fam.p();
  for (int i = 0; i < t_steps; ++i) {
    const double t = static_cast<double>(i) / (t_steps - 1);
    const Eigen::MatrixXd m1 = build_psi(fam, t, {1.0, 0.0}).m;
    const Eigen::MatrixXd mi = build_psi(fam, t, {0.0, 1.0}).m;
    for (int j = 0; j < dir_steps; ++j) {
      const double theta = std::numbers::pi * j / dir_steps;
      const Eigen::MatrixXd direction =
          std::cos(theta) * m1 + std::sin(theta) * mi;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(direction);
      const Eigen::VectorXd& sv = svd.singularValues();
      const double margin = sv[0] > 0.0 ? sv[p - 1] / sv[0] : 0.0;
      if (margin < out.min_margin) {
        out.min_margin = margin;
        out.argmin_t = t;
        out.argmin_theta = theta;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity suites
// ---------------------------------------------------------------------------

// For odd p the complex structure lives on the q-negative summand and the
// verified identities are, for unit directions u in the q-positive summand
// and unit z:
//   (a) J(psi_z(u)) = psi_{iz}(u)        (rotation of the pencil parameter)
//   (b) J preserves the fiber R_u = span{psi_1(u), psi_i(u)}
//   (c) J preserves its orthocomplement inside the q-negative summand
//   (d) J is q-unitary on its domain
// Identity (a) holds for the t = 0 member; the deformation direction is
// anti-holomorphic, so at t = 1 it fails by design (the failing residual is
// reported, not asserted, by this function).
inline CheckReport verify_odd_identities(int p, int n_samples,
                                         std::uint64_t seed, double t = 0.0) {
  if (p < 3 || p % 2 == 0) {
    throw std::invalid_argument("verify_odd_identities: requires odd p ≥ 3");
  }
  if (n_samples < 1) {
    throw std::invalid_argument(
        "verify_odd_identities: n_samples must be positive");
  }
  const HiggsPencilFamily fam(p);
  const RealLocusChart chart(p);
  const ComplexStructureJ j = build_J(fam);
  const int dim = chart.dim();
  const Eigen::MatrixXd psi1 = build_psi_chart(chart, fam, t, {1.0, 0.0}).chart;
  const Eigen::MatrixXd psii = build_psi_chart(chart, fam, t, {0.0, 1.0}).chart;
  const auto& base = chart.base_indices();
  const auto& perp = chart.perp_indices();
  const int nd = static_cast<int>(j.domain.size());

  const double r_unitary =
      (j.matrix.transpose() * j.matrix - Eigen::MatrixXd::Identity(nd, nd))
          .cwiseAbs()
          .maxCoeff();
  double r_rotation = 0.0;
  double r_fiber = 0.0;
  double r_fiber_perp = 0.0;

  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd u_base = sphere_sample(p, seed, 0, s);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < p; ++k) u[base[k]] = u_base[k];
    const double ang =
        2.0 * std::numbers::pi * CounterRng(seed, 1, s).uniform();
    const double c = std::cos(ang);
    const double sn = std::sin(ang);

    const Eigen::VectorXd w1 = psi1 * u;
    const Eigen::VectorXd wi = psii * u;
    const Eigen::VectorXd pz_u = c * w1 + sn * wi;
    const Eigen::VectorXd piz_u = -sn * w1 + c * wi;
    r_rotation = std::max(
        r_rotation,
        (apply_J_full(j, pz_u) - piz_u).cwiseAbs().maxCoeff());

    Eigen::MatrixXd span(dim, 2);
    span.col(0) = w1;
    span.col(1) = wi;
    const Eigen::MatrixXd fiber = orthonormal_columns(span, kRankTol);
    Eigen::MatrixXd j_fiber(dim, fiber.cols());
    for (Eigen::Index k = 0; k < fiber.cols(); ++k) {
      j_fiber.col(k) = apply_J_full(j, fiber.col(k));
    }
    r_fiber = std::max(r_fiber, subspace_distance(fiber, j_fiber));

    Eigen::MatrixXd rows(2, p + 1);
    rows.row(0) = gather_coords(w1, perp).transpose();
    rows.row(1) = gather_coords(wi, perp).transpose();
    const Eigen::MatrixXd complement = null_space(rows, kRankTol);
    const Eigen::MatrixXd j_complement = j.matrix * complement;
    r_fiber_perp =
        std::max(r_fiber_perp, subspace_distance(complement, j_complement));
  }

  CheckReport report;
  report.name = "odd_identities_p" + std::to_string(p);
  report.n_samples = n_samples;
  report.max_residual =
      std::max({r_rotation, r_fiber, r_fiber_perp, r_unitary});
  report.passed = report.max_residual <= kIdentityTol;
  report.details = {{"j_intertwines_pencil_rotation", r_rotation},
                    {"j_preserves_fiber_R", r_fiber},
                    {"j_preserves_fiber_R_perp", r_fiber_perp},
                    {"j_q_unitary", r_unitary},
                    {"deformation_t", t}};
  return report;
}

// For even p the complex structure lives on the quotient of the chart by the
// grading-0 coordinate (realized by deleting that coordinate) and restricts
// to both q-definite summands. Verified at the t = 0 member, for unit
// directions u in the q-positive summand and unit z:
//   (a) J(psi_z(u)) = psi_z(J(u))        (the pencil maps are J-linear)
//   (b) the grading-0 direction lies in the orthocomplement of the fiber R_u
//   (c) R_w = R_u exactly for w in span{u, J(u)} (and generically not
//       otherwise; the minimal generic separation is reported)
//   (d) the q-orthocomplement of psi_z(span{u, Ju}) inside the q-negative
//       quotient summand equals psi_z of the complement of span{u, Ju}
//   (e) inside the q-positive summand, the Euclidean complement of u splits
//       as R J(u) ⊕ complement of span{u, Ju}, and u ⟂ J(u) with
//       |(u, J(u))| = sqrt(2) |u| (the section never vanishes)
inline CheckReport verify_even_identities(int p, int n_samples,
                                          std::uint64_t seed) {
  if (p < 4 || p % 2 == 1) {
    throw std::invalid_argument("verify_even_identities: requires even p ≥ 4");
  }
  if (n_samples < 1) {
    throw std::invalid_argument(
        "verify_even_identities: n_samples must be positive");
  }
  const double t = 0.0;
  const HiggsPencilFamily fam(p);
  const RealLocusChart chart(p);
  const ComplexStructureJ j = build_J(fam);
  const int dim = chart.dim();
  const Eigen::MatrixXd psi1 = build_psi_chart(chart, fam, t, {1.0, 0.0}).chart;
  const Eigen::MatrixXd psii = build_psi_chart(chart, fam, t, {0.0, 1.0}).chart;
  const auto& base = chart.base_indices();
  const auto& perp = chart.perp_indices();
  // q-negative coordinates of the quotient: every q-negative chart
  // coordinate except the grading-0 one (which sits last).
  std::vector<int> perp_pairs(perp.begin(), perp.end() - 1);

  Eigen::VectorXd domain_signs(static_cast<Eigen::Index>(j.domain.size()));
  for (std::size_t k = 0; k < j.domain.size(); ++k) {
    domain_signs[static_cast<Eigen::Index>(k)] = chart.q_signs()[j.domain[k]];
  }
  const double r_unitary = (j.matrix.transpose() *
                                domain_signs.asDiagonal() * j.matrix -
                            Eigen::MatrixXd(domain_signs.asDiagonal()))
                               .cwiseAbs()
                               .maxCoeff();

  double r_commute = 0.0;
  double r_center = 0.0;
  double r_line = 0.0;
  double r_swap = 0.0;
  double r_split = 0.0;
  double r_section = 0.0;
  double generic_min = std::numeric_limits<double>::infinity();
  double section_min = std::numeric_limits<double>::infinity();

  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd u_base = sphere_sample(p, seed, 0, s);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < p; ++k) u[base[k]] = u_base[k];
    CounterRng rng(seed, 1, s);
    const double ang = 2.0 * std::numbers::pi * rng.uniform();
    const double c = std::cos(ang);
    const double sn = std::sin(ang);

    const Eigen::VectorXd w1 = psi1 * u;
    const Eigen::VectorXd wi = psii * u;
    const Eigen::VectorXd ju = apply_J_full(j, u);

    // (a)
    const Eigen::VectorXd lhs = apply_J_full(j, c * w1 + sn * wi);
    const Eigen::VectorXd rhs = c * (psi1 * ju) + sn * (psii * ju);
    r_commute = std::max(r_commute, (lhs - rhs).cwiseAbs().maxCoeff());

    // (b): the grading-0 component of the fiber vanishes.
    r_center = std::max({r_center, std::abs(w1[dim - 1]),
                         std::abs(wi[dim - 1])});

    // (c)
    Eigen::MatrixXd span_u(dim, 2);
    span_u.col(0) = w1;
    span_u.col(1) = wi;
    const Eigen::MatrixXd fiber_u = orthonormal_columns(span_u, kRankTol);
    const double beta = 2.0 * std::numbers::pi * rng.uniform();
    const Eigen::VectorXd w = std::cos(beta) * u + std::sin(beta) * ju;
    Eigen::MatrixXd span_w(dim, 2);
    span_w.col(0) = psi1 * w;
    span_w.col(1) = psii * w;
    const Eigen::MatrixXd fiber_w = orthonormal_columns(span_w, kRankTol);
    r_line = std::max(r_line, subspace_distance(fiber_u, fiber_w));

    const Eigen::VectorXd g_base = sphere_sample(p, seed, 2, s);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < p; ++k) g[base[k]] = g_base[k];
    Eigen::MatrixXd span_g(dim, 2);
    span_g.col(0) = psi1 * g;
    span_g.col(1) = psii * g;
    const Eigen::MatrixXd fiber_g = orthonormal_columns(span_g, kRankTol);
    generic_min = std::min(generic_min, subspace_distance(fiber_u, fiber_g));

    // (d): complement of span{u, Ju} inside the q-positive summand, its
    // image, and the q-orthocomplement of the image of span{u, Ju}, all in
    // quotient coordinates.
    const Eigen::VectorXd ju_base = gather_coords(ju, base);
    Eigen::MatrixXd line_rows(2, p);
    line_rows.row(0) = u_base.transpose();
    line_rows.row(1) = ju_base.transpose();
    const Eigen::MatrixXd complement = null_space(line_rows, kRankTol);
    const Eigen::VectorXd pz_u = c * w1 + sn * wi;
    const Eigen::VectorXd pz_ju = c * (psi1 * ju) + sn * (psii * ju);
    Eigen::MatrixXd image_rows(2, p);
    image_rows.row(0) = gather_coords(pz_u, perp_pairs).transpose();
    image_rows.row(1) = gather_coords(pz_ju, perp_pairs).transpose();
    const Eigen::MatrixXd image_ortho = null_space(image_rows, kRankTol);
    Eigen::MatrixXd complement_image(p, complement.cols());
    for (Eigen::Index k = 0; k < complement.cols(); ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      for (int a = 0; a < p; ++a) v[base[a]] = complement(a, k);
      complement_image.col(k) =
          gather_coords(c * (psi1 * v) + sn * (psii * v), perp_pairs);
    }
    const Eigen::MatrixXd complement_image_on =
        orthonormal_columns(complement_image, kRankTol);
    r_swap =
        std::max(r_swap, subspace_distance(image_ortho, complement_image_on));

    // (e)
    const double ortho = std::abs(u_base.dot(ju_base));
    const Eigen::MatrixXd u_perp =
        null_space(u_base.transpose(), kRankTol);
    Eigen::MatrixXd candidate(p, 1 + complement.cols());
    candidate.col(0) = ju_base;
    candidate.rightCols(complement.cols()) = complement;
    r_split = std::max(
        {r_split, ortho, subspace_distance(u_perp, candidate)});
    const double section_norm = std::hypot(u_base.norm(), ju_base.norm());
    r_section =
        std::max(r_section, std::abs(section_norm - std::numbers::sqrt2));
    section_min = std::min(section_min, ju_base.norm());
  }

  CheckReport report;
  report.name = "even_identities_p" + std::to_string(p);
  report.n_samples = n_samples;
  report.max_residual = std::max(
      {r_commute, r_center, r_line, r_swap, r_split, r_section, r_unitary});
  report.passed = report.max_residual <= kIdentityTol;
  report.details = {{"psi_j_commute", r_commute},
                    {"center_in_fiber_R_perp", r_center},
                    {"fiber_R_constant_on_complex_line", r_line},
                    {"orthocomplement_image_swap", r_swap},
                    {"tangent_splitting", r_split},
                    {"section_norm_identity", r_section},
                    {"section_min_norm", section_min},
                    {"generic_R_separation_min", generic_min},
                    {"j_q_unitary", r_unitary}};
  return report;
}

// ---------------------------------------------------------------------------
// Winding certificate for 2-plane bundles over the direction sphere
// ---------------------------------------------------------------------------

struct WindingResult {
  int winding = 0;         // nearest integer to the accumulated turn count
  double turns = 0.0;      // accumulated transition angle / 2 pi
  double integer_defect = 0.0;  // |turns - winding|
};

// First Chern number of a continuous field of J-invariant Euclidean
// 2-planes over S^2, computed as the winding of the transition function
// between hemisphere frames. A frame is spread from each pole by projection
// transport along meridians; on the equator the two frames differ by a unit
// complex number (rotation within the fiber, measured with J), and the
// winding of that transition around the equator is the certificate. The
// `fiber` callback must return an orthonormal basis (columns) of the fiber
// over the given unit direction; only the spanned plane matters.
inline WindingResult transition_winding(
    const std::function<Eigen::MatrixXd(const Eigen::Vector3d&)>& fiber,
    const Eigen::MatrixXd& complex_structure, int equator_steps,
    int lat_steps = 64) {
  if (equator_steps < 256) {
    throw std::invalid_argument(
        "transition_winding: equator_steps must be at least 256");
  }
  if (lat_steps < 2) {
    throw std::invalid_argument(
        "transition_winding: lat_steps must be at least 2");
  }
  const double pi = std::numbers::pi;
  const auto sphere_point = [](double theta, double phi) {
    return Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                           std::sin(theta) * std::sin(phi), std::cos(theta));
  };
  const auto fiber_checked = [&](const Eigen::Vector3d& x) {
    Eigen::MatrixXd b = fiber(x);
    if (b.cols() != 2) {
      throw std::runtime_error("transition_winding: fiber is not a 2-plane");
    }
    return b;
  };
  const Eigen::VectorXd north_seed =
      fiber_checked(sphere_point(0.0, 0.0)).col(0);
  const Eigen::VectorXd south_seed =
      fiber_checked(sphere_point(pi, 0.0)).col(0);
  const auto transport = [&](Eigen::VectorXd w, bool from_north, double phi) {
    for (int l = 1; l <= lat_steps; ++l) {
      const double theta = from_north ? 0.5 * pi * l / lat_steps
                                      : pi - 0.5 * pi * l / lat_steps;
      const Eigen::MatrixXd b = fiber_checked(sphere_point(theta, phi));
      w = b * (b.transpose() * w);
      const double norm = w.norm();
      if (norm < 0.2) {
        throw std::runtime_error(
            "transition_winding: projection transport degenerated; increase "
            "lat_steps");
      }
      w /= norm;
    }
    return w;
  };
  std::vector<std::complex<double>> transitions(
      static_cast<std::size_t>(equator_steps));
  for (int e = 0; e < equator_steps; ++e) {
    const double phi = 2.0 * pi * e / equator_steps;
    const Eigen::VectorXd wn = transport(north_seed, true, phi);
    const Eigen::VectorXd ws = transport(south_seed, false, phi);
    const std::complex<double> g(wn.dot(ws),
                                 wn.dot(complex_structure * ws));
    if (std::abs(g) < 0.5) {
      throw std::runtime_error(
          "transition_winding: hemisphere frames nearly orthogonal; increase "
          "lat_steps");
    }
    transitions[static_cast<std::size_t>(e)] = g;
  }
  double total = 0.0;
  for (int e = 0; e < equator_steps; ++e) {
    total += std::arg(transitions[static_cast<std::size_t>((e + 1) %
                                                           equator_steps)] /
                      transitions[static_cast<std::size_t>(e)]);
  }
  WindingResult out;
  out.turns = total / (2.0 * pi);
  out.winding = static_cast<int>(std::llround(out.turns));
  out.integer_defect = std::abs(out.turns - out.winding);
  return out;
}

// Winding certificate for the fiber bundle at p = 3: over each unit
// direction u in the q-positive summand, the fiber is the orthocomplement of
// span{psi_1(u), psi_i(u)} inside the q-negative summand at the t = 0
// member, a J-invariant 2-plane. Triviality of the bundle corresponds to
// winding 0.
inline WindingResult chern_winding_p3(int equator_steps, int lat_steps = 64) {
  const int p = 3;
  const HiggsPencilFamily fam(p);
  const RealLocusChart chart(p);
  const ComplexStructureJ j = build_J(fam);
  const Eigen::MatrixXd psi1 =
      build_psi_chart(chart, fam, 0.0, {1.0, 0.0}).chart;
  const Eigen::MatrixXd psii =
      build_psi_chart(chart, fam, 0.0, {0.0, 1.0}).chart;
  const auto& base = chart.base_indices();
  const auto& perp = chart.perp_indices();
  const auto fiber = [&](const Eigen::Vector3d& x) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(chart.dim());
    for (int k = 0; k < p; ++k) u[base[k]] = x[k];
    Eigen::MatrixXd rows(2, p + 1);
    rows.row(0) = gather_coords(psi1 * u, perp).transpose();
    rows.row(1) = gather_coords(psii * u, perp).transpose();
    return null_space(rows, kRankTol);
  };
  return transition_winding(fiber, j.matrix, equator_steps, lat_steps);
}

inline int chern_number_p3(int equator_steps, int lat_steps = 64) {
  const WindingResult w = chern_winding_p3(equator_steps, lat_steps);
  if (w.integer_defect > 0.01) {
    throw std::runtime_error(
        "chern_number_p3: accumulated winding is not integral");
  }
  return w.winding;
}

// Calibration bundles over S^2 in R^4 = C^2, run through the identical
// winding routine: the tautological complex line bundle (winding ±1) and the
// constant bundle (winding 0).
inline Eigen::MatrixXd complex_structure_c2() {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
  j(0, 1) = -1.0;
  j(1, 0) = 1.0;
  j(2, 3) = -1.0;
  j(3, 2) = 1.0;
  return j;
}

inline WindingResult winding_tautological(int equator_steps,
                                          int lat_steps = 64) {
  const Eigen::MatrixXd j = complex_structure_c2();
  const auto fiber = [&](const Eigen::Vector3d& x) {
    const double theta = std::acos(std::clamp(x[2], -1.0, 1.0));
    const double phi = std::atan2(x[1], x[0]);
    Eigen::VectorXd v(4);
    v << std::cos(theta / 2.0), 0.0, std::sin(theta / 2.0) * std::cos(phi),
        std::sin(theta / 2.0) * std::sin(phi);
    Eigen::MatrixXd b(4, 2);
    b.col(0) = v;
    b.col(1) = j * v;
    return b;
  };
  return transition_winding(fiber, j, equator_steps, lat_steps);
}

inline WindingResult winding_trivial(int equator_steps, int lat_steps = 64) {
  const Eigen::MatrixXd j = complex_structure_c2();
  Eigen::MatrixXd constant_plane = Eigen::MatrixXd::Zero(4, 2);
  constant_plane(0, 0) = 1.0;
  constant_plane(1, 1) = 1.0;
  const auto fiber = [constant_plane](const Eigen::Vector3d&) {
    return constant_plane;
  };
  return transition_winding(fiber, j, equator_steps, lat_steps);
}

// ---------------------------------------------------------------------------
// Deformation-path check
// ---------------------------------------------------------------------------

// Certifies that the whole deformation path stays inside regular pencils
// (margin above kRegularityTol on a t grid) and that the fiber dimension of
// the base construction is constantly p - 2 at t in {0, 1/2, 1}. On failure
// the first offending grid value of t is reported in the details
// ("regularity_fail_t" / "fiber_dim_fail_t", -1 when no failure).
inline CheckReport deformation_path_check(const HiggsPencilFamily& fam,
                                          int t_steps, int dir_steps = 64,
                                          std::uint64_t seed = 0) {
  if (t_steps < 2) {
    throw std::invalid_argument(
        "deformation_path_check: t_steps must be at least 2");
  }
  if (dir_steps < 8) {
    throw std::invalid_argument(
        "deformation_path_check: dir_steps must be at least 8");
  }
  const int p = fam.p();
  double min_margin = std::numeric_limits<double>::infinity();
  double regularity_fail_t = -1.0;
  for (int i = 0; i < t_steps; ++i) {
    const double t = static_cast<double>(i) / (t_steps - 1);
    const Eigen::MatrixXd m1 = build_psi(fam, t, {1.0, 0.0}).m;
    const Eigen::MatrixXd mi = build_psi(fam, t, {0.0, 1.0}).m;
    double margin_at_t = std::numeric_limits<double>::infinity();
    for (int jdir = 0; jdir < dir_steps; ++jdir) {
      const double theta = std::numbers::pi * jdir / dir_steps;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(std::cos(theta) * m1 +
                                            std::sin(theta) * mi);
      const Eigen::VectorXd& sv = svd.singularValues();
      margin_at_t =
          std::min(margin_at_t, sv[0] > 0.0 ? sv[p - 1] / sv[0] : 0.0);
    }
    min_margin = std::min(min_margin, margin_at_t);
    if (margin_at_t <= kRegularityTol && regularity_fail_t < 0.0) {
      regularity_fail_t = t;
    }
  }

  double max_membership = 0.0;
  double fiber_dim_fail_t = -1.0;
  for (const double t : {0.0, 0.5, 1.0}) {
    const Pencil pen = pencil_at(fam, t);
    try {
      const auto samples = base_sample(pen, 12, 4, seed);
      for (const auto& sample : samples) {
        max_membership = std::max(max_membership,
                                  base_membership_residual(pen, sample.ell));
      }
    } catch (const std::runtime_error&) {
      if (fiber_dim_fail_t < 0.0) fiber_dim_fail_t = t;
    }
  }

  CheckReport report;
  report.name = "deformation_path_p" + std::to_string(p);
  report.n_samples = t_steps;
  report.max_residual = max_membership;
  report.passed = regularity_fail_t < 0.0 && fiber_dim_fail_t < 0.0 &&
                  max_membership <= kIdentityTol;
  report.details = {{"min_margin", min_margin},
                    {"regularity_fail_t", regularity_fail_t},
                    {"fiber_dim_fail_t", fiber_dim_fail_t},
                    {"fiber_sphere_dim", static_cast<double>(p - 2)}};
  return report;
}

}  // namespace einfiber
