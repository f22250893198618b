#pragma once

#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "einfiber/quadratic_space.hpp"
#include "einfiber/rng.hpp"

namespace einfiber {

// A point of the Riemannian symmetric space of SO_0(p,p+1), modeled as a
// spacelike p-plane P. Construction q-orthonormalizes the given spanning set
// (Cholesky = Gram-Schmidt in matrix form) and caches q-orthonormal bases of
// P (Gram +I) and of the q-orthogonal complement P-perp (Gram -I); every
// tangent-space operation reduces to plain matrix algebra in these bases.
class SpacelikePoint {
 public:
  SpacelikePoint(const QuadraticSpace& space, const Eigen::MatrixXd& span)
      : space_(space) {
    if (span.rows() != space.n() || span.cols() != space.p())
      throw std::invalid_argument("spacelike point: span must be n x p");
    base_basis_ = q_orthonormalize(space, span, +1.0);
    perp_basis_ =
        q_orthonormalize(space, space.orthogonal_complement(base_basis_), -1.0);
  }

  // The model basepoint: P0 = span{(e_i + e_{n-1-i})/sqrt(2)}. Uses the
  // adapted bases verbatim so model computations are exact.
  static SpacelikePoint basepoint(const QuadraticSpace& space) {
    return SpacelikePoint(space, space.spacelike_basis(),
                          space.timelike_basis());
  }

  const QuadraticSpace& space() const { return space_; }
  const Eigen::MatrixXd& base_basis() const { return base_basis_; }
  const Eigen::MatrixXd& perp_basis() const { return perp_basis_; }

  // q-orthonormal coordinates of an ambient vector assumed to lie in P
  // (resp. P-perp). Gram +I gives a = B^T [q] v; Gram -I gives b = -C^T [q] w.
  Eigen::VectorXd base_coords(const Eigen::VectorXd& v) const {
    return base_basis_.transpose() * space_.form() * v;
  }
  Eigen::VectorXd perp_coords(const Eigen::VectorXd& w) const {
    return -perp_basis_.transpose() * space_.form() * w;
  }

 private:
  SpacelikePoint(const QuadraticSpace& space, Eigen::MatrixXd base,
                 Eigen::MatrixXd perp)
      : space_(space),
        base_basis_(std::move(base)),
        perp_basis_(std::move(perp)) {}

  // Returns span * L^{-T} where sign * (span^T [q] span) = L L^T; the result
  // has q-Gram equal to sign * I. Failure of the Cholesky factorization means
  // the plane does not have the required definiteness.
  static Eigen::MatrixXd q_orthonormalize(const QuadraticSpace& space,
                                          const Eigen::MatrixXd& span,
                                          double sign) {
    Eigen::MatrixXd gram = sign * space.q_gram(span);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("plane does not have the required q-sign");
    Eigen::MatrixXd lt = llt.matrixU();
    return lt.triangularView<Eigen::Upper>()
        .solve<Eigen::OnTheRight>(span);
  }

  QuadraticSpace space_;
  Eigen::MatrixXd base_basis_;
  Eigen::MatrixXd perp_basis_;
};

// A tangent vector of the spacelike Grassmannian at `base`, i.e. a linear map
// phi: P -> P-perp, stored as its (p+1) x p matrix in the cached bases.
struct TangentMap {
  SpacelikePoint base;
  Eigen::MatrixXd m;

  // Ambient action on v in P: phi(v) in P-perp.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    return base.perp_basis() * (m * base.base_coords(v));
  }
};

inline bool same_base(const TangentMap& a, const TangentMap& b) {
  return (a.base.base_basis() - b.base.base_basis()).norm() < 1e-12;
}

// Matrix of the q-adjoint phi^{*q}: P-perp -> P, defined by
// q(phi^{*q} w, u) = q(w, phi u). In bases with Gram +I on P and -I on
// P-perp this is minus the transpose.
inline Eigen::MatrixXd q_adjoint(const TangentMap& phi) {
  return -phi.m.transpose();
}

// Ambient action of the q-adjoint on w in P-perp.
inline Eigen::VectorXd apply_q_adjoint(const TangentMap& phi,
                                       const Eigen::VectorXd& w) {
  return phi.base.base_basis() * (q_adjoint(phi) * phi.base.perp_coords(w));
}

// Riemannian metric g(phi, psi) = -tr(phi^{*q} psi) = tr(M^T N): the
// Frobenius pairing of the coordinate matrices, positive definite.
inline double metric(const TangentMap& phi, const TangentMap& psi) {
  if (!same_base(phi, psi))
    throw std::invalid_argument("metric: tangent maps at different points");
  return (phi.m.transpose() * psi.m).trace();
}

// The ambient so(p,p+1) element A_phi = [[0, -phi^{*q}], [phi, 0]] in the
// P (+) P-perp splitting, pushed back to standard coordinates. Coordinate
// extraction against q contributes B^T [q] on P and -C^T [q] on P-perp.
inline Eigen::MatrixXd embed_A(const TangentMap& phi) {
  const Eigen::MatrixXd& b = phi.base.base_basis();
  const Eigen::MatrixXd& c = phi.base.perp_basis();
  const Eigen::MatrixXd& f = phi.base.space().form();
  return c * phi.m * b.transpose() * f - b * phi.m.transpose() * c.transpose() * f;
}

// Cartan projection mu(phi) = (mu_1 >= ... >= mu_p >= 0): the nonnegative
// half of the spectrum of A_phi. In the adapted bases A_phi is represented by
// the symmetric matrix [[0, M^T], [M, 0]], so its spectrum is computed with a
// self-adjoint solver; the acceptance oracle recomputes it from the ambient
// matrix with a general eigensolver.
inline Eigen::VectorXd cartan_projection(const TangentMap& phi) {
  const int p = phi.base.space().p();
  const int n = 2 * p + 1;
  Eigen::MatrixXd rep = Eigen::MatrixXd::Zero(n, n);
  rep.topRightCorner(p, p + 1) = phi.m.transpose();
  rep.bottomLeftCorner(p + 1, p) = phi.m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep,
                                                    Eigen::EigenvaluesOnly);
  Eigen::VectorXd mu(p);
  for (int i = 0; i < p; ++i)
    mu[i] = std::max(0.0, es.eigenvalues()[n - 1 - i]);  // descending
  return mu;
}

// Ein-regularity: rank(phi) = p, tested as a relative singular-value margin
// sigma_p > tol * sigma_1 (equivalently mu_p > 0 in the open Weyl chamber
// direction that makes flag limits unique).
inline bool is_ein_regular(const TangentMap& phi,
                           double tol = kRegularityTol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi.m);
  const Eigen::VectorXd& s = svd.singularValues();
  return s[0] > 0.0 && s[s.size() - 1] > tol * s[0];
}

// Tangent vector at `at` of the curve exp(tX)·P, X in so(p,p+1): the
// composite P -> R^n -> P-perp of X with the q-orthogonal projection.
inline TangentMap tangent_from_ambient(const SpacelikePoint& at,
                                       const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd& f = at.space().form();
  Eigen::MatrixXd m =
      -at.perp_basis().transpose() * f * x * at.base_basis();
  return TangentMap{at, std::move(m)};
}

// Derivative of the model geodesic ray diag(e^t, 1, ..., 1, e^{-t})·P0 at
// t = 0; its generator is tau = diag(1, 0, ..., 0, -1).
inline TangentMap model_ray_derivative(const QuadraticSpace& space) {
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(space.n(), space.n());
  tau(0, 0) = 1.0;
  tau(space.n() - 1, space.n() - 1) = -1.0;
  return tangent_from_ambient(SpacelikePoint::basepoint(space), tau);
}

// Pushforward of phi by g in SO(p,p+1): the tangent map g phi g^{-1} at the
// point g·P, expressed in the adapted bases of g·P. Uses g^{-1} = [q] g^T [q].
inline TangentMap pushforward(const TangentMap& phi, const Eigen::MatrixXd& g) {
  const QuadraticSpace& space = phi.base.space();
  const Eigen::MatrixXd& f = space.form();
  SpacelikePoint moved(space, g * phi.base.base_basis());
  const Eigen::MatrixXd g_inv = f * g.transpose() * f;
  const Eigen::MatrixXd conj = g * embed_A(phi) * g_inv;
  return tangent_from_ambient(moved, conj);
}

// Deterministic sample of so(p,p+1): [q] K with K skew-symmetric, since
// ([q]K)^T [q] + [q] ([q]K) = K^T + K = 0 when [q]^2 = I.
inline Eigen::MatrixXd random_so_q(const QuadraticSpace& space,
                                   std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) {
  const int n = space.n();
  CounterRng rng(seed, stream, index);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.gaussian();
      k(i, j) = v;
      k(j, i) = -v;
    }
  return space.form() * k;
}

// Deterministic sample of the identity component SO_0(p,p+1) as exp of a
// Lie-algebra element, scaled to keep conditioning moderate.
inline Eigen::MatrixXd random_group_element(const QuadraticSpace& space,
                                            std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t index,
                                            double scale = 0.5) {
  Eigen::MatrixXd a = scale * random_so_q(space, seed, stream, index);
  return a.exp();
}

}  // namespace einfiber
