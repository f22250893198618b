// Tangent calculus at spacelike p-planes: q-adjoints, the invariant metric,
// the so(p,p+1) embedding A_phi, Cartan projections, Ein-regularity, and
// naturality under the group action. Oracles used here are independent of the
// implementation: defining bilinear identities evaluated on ambient vectors,
// and a general (non-self-adjoint) eigensolver applied to the ambient matrix.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include <einfiber/flags.hpp>
#include <einfiber/quadratic_space.hpp>
#include <einfiber/rng.hpp>
#include <einfiber/symspace.hpp>

using namespace einfiber;

namespace {

TangentMap random_tangent(const SpacelikePoint& at, std::uint64_t seed,
                          std::uint64_t index) {
  const int p = at.space().p();
  CounterRng rng(seed, 100, index);
  Eigen::MatrixXd m(p + 1, p);
  for (int j = 0; j < p; ++j) m.col(j) = rng.gaussian_vector(p + 1);
  return TangentMap{at, std::move(m)};
}

TangentMap random_tangent_of_rank(const SpacelikePoint& at, int rank,
                                  std::uint64_t seed, std::uint64_t index) {
  const int p = at.space().p();
  CounterRng rng(seed, 200, index);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p);
  for (int k = 0; k < rank; ++k)
    m += rng.gaussian_vector(p + 1) * rng.gaussian_vector(p).transpose();
  return TangentMap{at, std::move(m)};
}

// Sorted nonnegative spectrum of the ambient matrix, via the general
// eigensolver: the independent oracle for cartan_projection.
Eigen::VectorXd ambient_spectrum_oracle(const TangentMap& phi) {
  const int p = phi.base.space().p();
  Eigen::EigenSolver<Eigen::MatrixXd> es(embed_A(phi));
  REQUIRE(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-8);
  std::vector<double> re(es.eigenvalues().size());
  for (size_t i = 0; i < re.size(); ++i) re[i] = es.eigenvalues()[i].real();
  std::sort(re.begin(), re.end(), std::greater<double>());
  Eigen::VectorXd mu(p);
  for (int i = 0; i < p; ++i) mu[i] = re[i];
  return mu;
}

}  // namespace

TEST_CASE("spacelike points cache q-orthonormal adapted bases") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const int n = sp.n();
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXd g = random_group_element(sp, 5, 0, trial);
      SpacelikePoint pt(sp, g * sp.spacelike_basis());
      REQUIRE((sp.q_gram(pt.base_basis()) - Eigen::MatrixXd::Identity(p, p))
                  .norm() < 1e-11);
      REQUIRE((sp.q_gram(pt.perp_basis()) +
               Eigen::MatrixXd::Identity(p + 1, p + 1))
                  .norm() < 1e-11);
      REQUIRE((pt.base_basis().transpose() * sp.form() * pt.perp_basis())
                  .norm() < 1e-11);
      REQUIRE(pt.base_basis().rows() == n);
    }
    // A span containing a timelike direction is rejected.
    Eigen::MatrixXd bad = sp.spacelike_basis();
    bad.col(0) = sp.timelike_basis().col(0);
    REQUIRE_THROWS_AS(SpacelikePoint(sp, bad), std::invalid_argument);
  }
}

TEST_CASE("q-adjoint satisfies its defining bilinear identity") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 20; ++trial) {
      const TangentMap phi = random_tangent(at, 42, trial);
      CounterRng rng(43, 0, trial);
      const Eigen::VectorXd u = at.base_basis() * rng.gaussian_vector(p);
      const Eigen::VectorXd w = at.perp_basis() * rng.gaussian_vector(p + 1);
      const double lhs = sp.q(apply_q_adjoint(phi, w), u);
      const double rhs = sp.q(w, phi.apply(u));
      REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
      // Double adjoint: -( -M^T )^T = M.
      REQUIRE((-q_adjoint(phi).transpose() - phi.m).norm() == 0.0);
    }
  }
}

TEST_CASE("q-adjoint of a rank-one map: image, kernel, frozen metric value") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    const Eigen::VectorXd a = sphere_sample(p, 7, 0, p);
    const Eigen::VectorXd b = sphere_sample(p + 1, 7, 1, p);
    const Eigen::VectorXd u0 = at.base_basis() * a;
    const Eigen::VectorXd z0 = at.perp_basis() * b;
    const TangentMap phi{at, b * a.transpose()};  // u0 -> z0

    REQUIRE((phi.apply(u0) - z0).norm() < 1e-14);
    REQUIRE((apply_q_adjoint(phi, z0) + u0).norm() < 1e-14);

    // Kernel: any w q-orthogonal to z0 inside P-perp is annihilated.
    CounterRng rng(8, 0, p);
    Eigen::VectorXd c = rng.gaussian_vector(p + 1);
    c -= c.dot(b) * b;
    const Eigen::VectorXd w = at.perp_basis() * c;
    REQUIRE(apply_q_adjoint(phi, w).norm() < 1e-13);

    REQUIRE(metric(phi, phi) == Catch::Approx(1.0).margin(1e-14));
  }
}

TEST_CASE("metric: symmetry, positivity, base-point guard") {
  QuadraticSpace sp(4);
  SpacelikePoint at = SpacelikePoint::basepoint(sp);
  for (int trial = 0; trial < 50; ++trial) {
    const TangentMap phi = random_tangent(at, 10, 2 * trial);
    const TangentMap psi = random_tangent(at, 10, 2 * trial + 1);
    REQUIRE(metric(phi, psi) ==
            Catch::Approx(metric(psi, phi)).margin(1e-13));
    REQUIRE(metric(phi, phi) > 0.0);
  }
  const Eigen::MatrixXd g = random_group_element(sp, 11, 0, 0);
  SpacelikePoint moved(sp, g * sp.spacelike_basis());
  const TangentMap phi = random_tangent(at, 12, 0);
  const TangentMap psi = random_tangent(moved, 12, 1);
  REQUIRE_THROWS_AS(metric(phi, psi), std::invalid_argument);
}

TEST_CASE("embed_A: so(p,p+1) membership, block action, rank doubling") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    const Eigen::MatrixXd& f = sp.form();

    const TangentMap zero{at, Eigen::MatrixXd::Zero(p + 1, p)};
    REQUIRE(embed_A(zero).norm() == 0.0);

    for (int trial = 0; trial < 10; ++trial) {
      const TangentMap phi = random_tangent(at, 20, trial);
      const Eigen::MatrixXd a = embed_A(phi);
      REQUIRE((a.transpose() * f + f * a).norm() < 1e-12);

      CounterRng rng(21, 0, trial);
      const Eigen::VectorXd u = at.base_basis() * rng.gaussian_vector(p);
      const Eigen::VectorXd w = at.perp_basis() * rng.gaussian_vector(p + 1);
      REQUIRE((a * u - phi.apply(u)).norm() < 1e-13);
      REQUIRE((a * w + apply_q_adjoint(phi, w)).norm() < 1e-13);
    }

    for (int rank = 1; rank <= p; ++rank)
      for (int trial = 0; trial < 6; ++trial) {
        const TangentMap phi =
            random_tangent_of_rank(at, rank, 22, 10 * rank + trial);
        REQUIRE(numeric_rank(phi.m, kRankTol) == rank);
        REQUIRE(numeric_rank(embed_A(phi), kRankTol) == 2 * rank);
      }
  }
}

TEST_CASE("spectrum of the ambient matrix is symmetric about zero") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 20; ++trial) {
      const TangentMap phi = random_tangent(at, 30, trial);
      Eigen::EigenSolver<Eigen::MatrixXd> es(embed_A(phi));
      std::vector<double> re(es.eigenvalues().size());
      for (size_t i = 0; i < re.size(); ++i)
        re[i] = es.eigenvalues()[i].real();
      std::sort(re.begin(), re.end());
      const int n = sp.n();
      for (int i = 0; i < n; ++i)
        REQUIRE(std::abs(re[i] + re[n - 1 - i]) < 1e-10);
    }
  }
}

TEST_CASE("cartan projection: model ray is (1, 0, ..., 0)") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const TangentMap ray = model_ray_derivative(sp);

    Eigen::MatrixXd expected_m = Eigen::MatrixXd::Zero(p + 1, p);
    expected_m(0, 0) = 1.0;
    REQUIRE((ray.m - expected_m).norm() < 1e-15);

    const Eigen::VectorXd mu = cartan_projection(ray);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(p);
    expected[0] = 1.0;
    REQUIRE((mu - expected).cwiseAbs().maxCoeff() < 1e-13);
    REQUIRE_FALSE(is_ein_regular(ray));

    const TangentMap zero{SpacelikePoint::basepoint(sp),
                          Eigen::MatrixXd::Zero(p + 1, p)};
    REQUIRE(cartan_projection(zero).norm() == 0.0);
  }
}

TEST_CASE("cartan projection matches the ambient eigenvalue oracle") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 30; ++trial) {
      const TangentMap phi = random_tangent(at, 40, trial);
      const Eigen::VectorXd mu = cartan_projection(phi);
      REQUIRE(std::is_sorted(mu.data(), mu.data() + p,
                             std::greater<double>()));
      REQUIRE(mu[p - 1] >= 0.0);
      REQUIRE((mu - ambient_spectrum_oracle(phi)).cwiseAbs().maxCoeff() <
              1e-10);
    }
  }
}

TEST_CASE("ein regularity agrees with the Weyl-chamber margin") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);

    Eigen::MatrixXd id_pattern = Eigen::MatrixXd::Zero(p + 1, p);
    id_pattern.topRows(p) = Eigen::MatrixXd::Identity(p, p);
    REQUIRE(is_ein_regular(TangentMap{at, id_pattern}));

    for (int trial = 0; trial < 30; ++trial) {
      const TangentMap phi = random_tangent(at, 50, trial);
      const Eigen::VectorXd mu = cartan_projection(phi);
      REQUIRE(is_ein_regular(phi) == (mu[p - 1] > kRegularityTol * mu[0]));
    }
    for (int rank = 1; rank < p; ++rank)
      REQUIRE_FALSE(
          is_ein_regular(random_tangent_of_rank(at, rank, 51, rank)));
  }
}

TEST_CASE("tangent_from_ambient inverts embed_A") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 10; ++trial) {
      const TangentMap phi = random_tangent(at, 60, trial);
      const TangentMap back = tangent_from_ambient(at, embed_A(phi));
      REQUIRE((back.m - phi.m).norm() < 1e-12);
    }
  }
}

TEST_CASE("cartan projection is invariant under the group action") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 10; ++trial) {
      const TangentMap phi = random_tangent(at, 70, trial);
      const Eigen::MatrixXd g = random_group_element(sp, 71, 0, trial);
      const TangentMap moved = pushforward(phi, g);
      REQUIRE((cartan_projection(moved) - cartan_projection(phi))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
      REQUIRE(std::abs(metric(moved, moved) - metric(phi, phi)) <
              1e-8 * (1.0 + metric(phi, phi)));
    }
  }
}
