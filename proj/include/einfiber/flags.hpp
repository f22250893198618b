#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "einfiber/quadratic_space.hpp"
#include "einfiber/symspace.hpp"

namespace einfiber {

// Flips the sign so the first coordinate whose magnitude is above
// rel_tol * max becomes positive. Resolves the v ~ -v ambiguity of projective
// representatives deterministically, making point clouds bitwise comparable.
inline Eigen::VectorXd canonical_sign(Eigen::VectorXd v,
                                      double rel_tol = 1e-9) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > rel_tol * scale) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

// A point of the Einstein universe Ein^{p-1,p}: an isotropic line, stored as
// its unit, sign-canonical representative.
struct EinPoint {
  Eigen::VectorXd rep;

  EinPoint(const QuadraticSpace& space, const Eigen::VectorXd& direction) {
    const double norm = direction.norm();
    if (norm == 0.0)
      throw std::invalid_argument("ein point: zero direction");
    rep = canonical_sign(direction / norm);
    if (std::abs(space.q(rep)) > kIdentityTol)
      throw std::invalid_argument("ein point: direction is not isotropic");
  }
};

// A maximal isotropic p-plane, stored with a Euclidean-orthonormal basis
// (q degenerates on an isotropic plane, so Euclidean linear algebra is the
// right tool for membership questions).
struct IsotropicFlag {
  Eigen::MatrixXd basis;

  IsotropicFlag(const QuadraticSpace& space, const Eigen::MatrixXd& span) {
    basis = orthonormal_columns(span, kRankTol);
    if (basis.cols() != space.p())
      throw std::invalid_argument("isotropic flag: span is not p-dimensional");
    if (space.q_gram(basis).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("isotropic flag: plane is not isotropic");
  }
};

// Thickening membership: ell lies in the set K_T of isotropic lines contained
// in T iff the Euclidean projection residual onto span(T) vanishes.
inline bool in_thickening(const EinPoint& ell, const IsotropicFlag& flag,
                          double tol = kContainTol) {
  const Eigen::VectorXd residual =
      ell.rep - flag.basis * (flag.basis.transpose() * ell.rep);
  return residual.norm() <= tol;
}

// Unique transverse decomposition ell = [u + z] with u in P spacelike-unit
// and z in P-perp timelike-unit; the sign pair is canonicalized through u.
// Existence and uniqueness: q vanishes on ell but is definite on both P and
// P-perp, so both components are nonzero and q(u', u') = -q(z', z') > 0 for
// any representative u' + z'.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose(
    const EinPoint& ell, const SpacelikePoint& at) {
  const QuadraticSpace& space = at.space();
  const Eigen::VectorXd u_raw =
      at.base_basis() * at.base_coords(ell.rep);  // q-projection onto P
  const Eigen::VectorXd z_raw = ell.rep - u_raw;
  const double qu = space.q(u_raw);
  if (qu <= 0.0)
    throw std::invalid_argument("decompose: line not transverse to P-perp");
  const double s = 1.0 / std::sqrt(qu);
  Eigen::VectorXd u = s * u_raw;
  Eigen::VectorXd z = s * z_raw;
  const Eigen::VectorXd u_canon = canonical_sign(u);
  if ((u_canon - u).norm() > 0.0) z = -z;
  return {u_canon, z};
}

// The S^p-fibration Ein^{p-1,p} -> P(P): ell maps to the line through its
// spacelike component. Returned as the unit sign-canonical direction.
inline Eigen::VectorXd fibration_project(const EinPoint& ell,
                                         const SpacelikePoint& at) {
  return decompose(ell, at).first;
}

// Pointing criterion: a tangent vector points toward a point of Ein iff it
// has rank one; the target is the graph line [u + phi(u)/sigma_1] over the
// line orthogonal to the kernel. Returns absent for rank != 1.
inline std::optional<EinPoint> points_toward_ein(const TangentMap& phi,
                                                 double tol = kRankTol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      phi.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s[0] <= 0.0) return std::nullopt;                  // zero map
  if (s.size() > 1 && s[1] > tol * s[0]) return std::nullopt;  // rank >= 2
  const Eigen::VectorXd u = phi.base.base_basis() * svd.matrixV().col(0);
  const Eigen::VectorXd z = phi.base.perp_basis() * svd.matrixU().col(0);
  return EinPoint(phi.base.space(), u + z);
}

}  // namespace einfiber
