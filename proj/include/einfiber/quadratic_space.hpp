#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "einfiber/linalg.hpp"

namespace einfiber {

// Shared numerical tolerances.
inline constexpr double kRankTol = 1e-9;        // rank / isotropy (relative)
inline constexpr double kRegularityTol = 1e-6;  // singular-value ratio margin
inline constexpr double kContainTol = 1e-8;     // subspace containment
inline constexpr double kIdentityTol = 1e-10;   // algebraic identity residuals

// The pseudo-Euclidean space R^{p,p+1}, modeled on R^n with n = 2p+1 and the
// symmetric bilinear form q(x, y) = sum_{i != p} x_i y_{n-1-i} - x_p y_p.
// This anti-diagonal normalization has signature (p, p+1), satisfies
// [q]^2 = I, and makes every standard basis vector e_i with i != p isotropic,
// which keeps upper-triangular group elements easy to reason about.
class QuadraticSpace {
 public:
  explicit QuadraticSpace(int p) : p_(p), n_(2 * p + 1) {
    if (p < 3)
      throw std::invalid_argument(
          "p ≥ 3 required; p = 2 treated in prior work");
    form_ = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) form_(i, n_ - 1 - i) = 1.0;
    form_(p_, p_) = -1.0;
  }

  int p() const { return p_; }
  int n() const { return n_; }
  const Eigen::MatrixXd& form() const { return form_; }

  double q(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot(form_ * y);
  }
  double q(const Eigen::VectorXd& x) const { return q(x, x); }

  // Gram matrix of q restricted to the columns of `basis`.
  Eigen::MatrixXd q_gram(const Eigen::MatrixXd& basis) const {
    return basis.transpose() * form_ * basis;
  }

  // (positive, negative) inertia of q restricted to span(basis).
  std::pair<int, int> signature(const Eigen::MatrixXd& basis,
                                double rel_tol = kRankTol) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_gram(basis));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double scale = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev[i] > rel_tol * scale) ++pos;
      if (ev[i] < -rel_tol * scale) ++neg;
    }
    return {pos, neg};
  }

  // q-orthogonal complement of span(basis), with Euclidean-orthonormal basis.
  Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& basis) const {
    return null_space(basis.transpose() * form_, kRankTol);
  }

  // Basepoint of the spacelike Grassmannian: the p-plane
  // P0 = span{(e_i + e_{n-1-i})/sqrt(2), i = 0..p-1}, on which q is positive
  // definite. Its q-orthogonal complement is spanned by the timelike basis.
  // Both bases below are simultaneously q-orthonormal (q = +I resp. -I) and
  // Euclidean-orthonormal, so coordinates in them are well conditioned.
  Eigen::MatrixXd spacelike_basis() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_, p_);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < p_; ++i) {
      b(i, i) = s;
      b(n_ - 1 - i, i) = s;
    }
    return b;
  }

  Eigen::MatrixXd timelike_basis() const {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_, p_ + 1);
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < p_; ++j) {
      c(j, j) = s;
      c(n_ - 1 - j, j) = -s;
    }
    c(p_, p_) = 1.0;
    return c;
  }

 private:
  int p_;
  int n_;
  Eigen::MatrixXd form_;
};

inline QuadraticSpace make_space(int p) { return QuadraticSpace(p); }

}  // namespace einfiber
