#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "einfiber/flags.hpp"
#include "einfiber/quadratic_space.hpp"
#include "einfiber/rng.hpp"
#include "einfiber/symspace.hpp"

namespace einfiber {

// A pencil of tangent maps at a common spacelike p-plane: a d-dimensional
// subspace of Hom(P, P-perp) given by generators. d = 2 throughout the
// artifact (surface case), but 2 <= d <= p is accepted.
class Pencil {
 public:
  Pencil(SpacelikePoint base, std::vector<TangentMap> gens)
      : base_(std::move(base)), gens_(std::move(gens)) {
    const int p = base_.space().p();
    const int d = static_cast<int>(gens_.size());
    if (d < 2 || d > p)
      throw std::invalid_argument("pencil: need 2 <= d <= p generators");
    Eigen::MatrixXd gram(d, d);
    for (int i = 0; i < d; ++i) {
      if ((gens_[i].base.base_basis() - base_.base_basis()).norm() >= 1e-12)
        throw std::invalid_argument("pencil: generator at a different point");
      for (int j = 0; j < d; ++j)
        gram(i, j) = metric(gens_[i], gens_[j]);
    }
    // Independence via the normalized metric Gram determinant.
    Eigen::VectorXd scale = gram.diagonal().cwiseSqrt();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gram(i, j) /= scale[i] * scale[j];
    if (!(gram.determinant() > 1e-10))
      throw std::invalid_argument("pencil: generators are dependent");
  }

  const SpacelikePoint& base() const { return base_; }
  const std::vector<TangentMap>& gens() const { return gens_; }
  int d() const { return static_cast<int>(gens_.size()); }

  // cos(theta) psi_1 + sin(theta) psi_2 (the d = 2 direction circle).
  TangentMap direction(double theta) const {
    if (d() != 2)
      throw std::invalid_argument("direction sweep is defined for d = 2");
    return TangentMap{base_, std::cos(theta) * gens_[0].m +
                                 std::sin(theta) * gens_[1].m};
  }

 private:
  SpacelikePoint base_;
  std::vector<TangentMap> gens_;
};

// Ein-regularity of the whole pencil, by sweeping n_dirs equally spaced
// directions over [0, pi) (theta and theta + pi span the same line). Returns
// (regular, min relative p-th singular value over the sweep).
inline std::pair<bool, double> pencil_regular(const Pencil& pen, int n_dirs,
                                              double tol = kRegularityTol) {
  if (n_dirs < 8) throw std::invalid_argument("pencil_regular: n_dirs >= 8");
  double min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_dirs; ++k) {
    const double theta = std::numbers::pi * k / n_dirs;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pen.direction(theta).m);
    const Eigen::VectorXd& s = svd.singularValues();
    const double margin = s[0] > 0.0 ? s[s.size() - 1] / s[0] : 0.0;
    min_margin = std::min(min_margin, margin);
  }
  return {min_margin > tol, min_margin};
}

// The bundle fiber R_u = {psi(u) : psi in the pencil}, as a
// Euclidean-orthonormal basis of a subspace of P-perp.
inline Eigen::MatrixXd bundle_R(const Pencil& pen, const Eigen::VectorXd& u) {
  Eigen::MatrixXd img(u.size(), pen.d());
  for (int i = 0; i < pen.d(); ++i) img.col(i) = pen.gens()[i].apply(u);
  return orthonormal_columns(img, kRankTol);
}

// The q-orthogonal complement R^perp_u of R_u inside P-perp. Since q is
// negative definite on P-perp, -q is an inner product in the cached
// coordinates there, and q-orthogonality is plain Euclidean orthogonality of
// coordinate vectors. Returns an ambient basis whose q-Gram is -I.
inline Eigen::MatrixXd bundle_R_perp(const Pencil& pen,
                                     const Eigen::VectorXd& u) {
  const SpacelikePoint& at = pen.base();
  Eigen::MatrixXd coords(pen.d(), at.space().p() + 1);
  for (int i = 0; i < pen.d(); ++i)
    coords.row(i) = at.perp_coords(pen.gens()[i].apply(u)).transpose();
  const Eigen::MatrixXd ns = null_space(coords, kRankTol);
  return at.perp_basis() * ns;
}

// One point of the base of the pencil: an isotropic line [u + v] with
// u spacelike-unit in P and v timelike-unit q-orthogonal to R_u.
struct BaseSamplePoint {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  EinPoint ell;
};

// Residual of the defining base condition: max_i |q(v, psi_i(u))| after the
// transverse decomposition of ell over the pencil's base point.
inline double base_membership_residual(const Pencil& pen,
                                       const EinPoint& ell) {
  const auto [u, v] = decompose(ell, pen.base());
  double residual = 0.0;
  for (const TangentMap& psi : pen.gens())
    residual = std::max(residual,
                        std::abs(pen.base().space().q(v, psi.apply(u))));
  return residual;
}

inline bool base_membership(const Pencil& pen, const EinPoint& ell,
                            double tol = kIdentityTol) {
  return base_membership_residual(pen, ell) <= tol;
}

// Deterministic sample of the base: n_u points u in the unit sphere of P
// (canonical sign), and for each u, n_fiber unit-timelike points v in
// R^perp_u. Fiber stream keys depend only on (seed, u-index, fiber-index),
// so samples are reproducible individually.
inline std::vector<BaseSamplePoint> base_sample(const Pencil& pen, int n_u,
                                                int n_fiber,
                                                std::uint64_t seed) {
  const SpacelikePoint& at = pen.base();
  const int p = at.space().p();
  std::vector<BaseSamplePoint> out;
  out.reserve(static_cast<std::size_t>(n_u) * n_fiber);
  for (int i = 0; i < n_u; ++i) {
    const Eigen::VectorXd u =
        canonical_sign(at.base_basis() * sphere_sample(p, seed, 0, i));
    const Eigen::MatrixXd fiber_basis = bundle_R_perp(pen, u);
    if (fiber_basis.cols() != p - pen.d() + 1)
      throw std::runtime_error("base_sample: fiber dimension collapse");
    for (int j = 0; j < n_fiber; ++j) {
      const Eigen::VectorXd v =
          fiber_basis *
          sphere_sample(static_cast<int>(fiber_basis.cols()), seed, i + 1, j);
      out.push_back(BaseSamplePoint{u, v, EinPoint(at.space(), u + v)});
    }
  }
  return out;
}

}  // namespace einfiber
