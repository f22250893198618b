// Isotropic lines and maximal isotropic planes: canonical representatives,
// thickening membership, the transverse decomposition over a spacelike
// p-plane, the sphere-fibration projection, and the rank-one pointing
// dictionary. Frozen model values were derived by hand in the anti-diagonal
// form (see the basepoint decomposition of [e_0]).
#include <catch2/catch_amalgamated.hpp>

#include <einfiber/flags.hpp>
#include <einfiber/quadratic_space.hpp>
#include <einfiber/rng.hpp>
#include <einfiber/symspace.hpp>

using namespace einfiber;

namespace {

Eigen::VectorXd unit_axis(int n, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[i] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("canonical sign flips on the first significant coordinate") {
  Eigen::VectorXd v(3);
  v << -1e-12, -2.0, 1.0;
  const Eigen::VectorXd c = canonical_sign(v);
  REQUIRE(c[1] == 2.0);
  REQUIRE(c[2] == -1.0);
  Eigen::VectorXd w(3);
  w << 0.5, -2.0, 1.0;
  REQUIRE((canonical_sign(w) - w).norm() == 0.0);
}

TEST_CASE("ein points: normalization, canonical sign, isotropy guard") {
  QuadraticSpace sp(3);
  const EinPoint ell(sp, -3.7 * unit_axis(7, 0));
  REQUIRE((ell.rep - unit_axis(7, 0)).norm() == 0.0);
  REQUIRE(std::abs(ell.rep.norm() - 1.0) < 1e-15);
  REQUIRE_THROWS_AS(EinPoint(sp, unit_axis(7, 3)), std::invalid_argument);
  REQUIRE_THROWS_AS(EinPoint(sp, unit_axis(7, 0) + unit_axis(7, 6)),
                    std::invalid_argument);  // spacelike direction
}

TEST_CASE("isotropic flags: model plane accepted, non-isotropic rejected") {
  QuadraticSpace sp(3);
  Eigen::MatrixXd span(7, 3);
  span.col(0) = unit_axis(7, 0);
  span.col(1) = unit_axis(7, 1);
  span.col(2) = unit_axis(7, 2);
  const IsotropicFlag flag(sp, span);
  REQUIRE(sp.q_gram(flag.basis).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd bad = span;
  bad.col(2) = unit_axis(7, 3);  // timelike center direction
  REQUIRE_THROWS_AS(IsotropicFlag(sp, bad), std::invalid_argument);
  bad.col(2) = unit_axis(7, 2) + unit_axis(7, 4);  // spacelike combination
  REQUIRE_THROWS_AS(IsotropicFlag(sp, bad), std::invalid_argument);
}

TEST_CASE("thickening membership: containment verdicts and invariance") {
  QuadraticSpace sp(3);
  Eigen::MatrixXd span(7, 3);
  span.col(0) = unit_axis(7, 0);
  span.col(1) = unit_axis(7, 1);
  span.col(2) = unit_axis(7, 2);
  const IsotropicFlag flag(sp, span);

  REQUIRE(in_thickening(EinPoint(sp, unit_axis(7, 0)), flag));
  REQUIRE(in_thickening(EinPoint(sp, unit_axis(7, 1) - 2.0 * unit_axis(7, 2)),
                        flag));
  REQUIRE_FALSE(in_thickening(EinPoint(sp, unit_axis(7, 4)), flag));
  REQUIRE_FALSE(in_thickening(
      EinPoint(sp, unit_axis(7, 0) + unit_axis(7, 5)), flag));

  // Projective well-definedness: rescaled representative, re-based flag.
  CounterRng rng(3, 0, 0);
  Eigen::MatrixXd change(3, 3);
  for (int j = 0; j < 3; ++j) change.col(j) = rng.gaussian_vector(3);
  const IsotropicFlag rebased(sp, span * change);
  for (int trial = 0; trial < 20; ++trial) {
    CounterRng tr(4, 0, trial);
    const Eigen::VectorXd dir =
        tr.gaussian_vector(7);  // generic, usually outside
    Eigen::VectorXd inside = span * tr.gaussian_vector(3);
    const EinPoint ell(sp, inside);
    REQUIRE(in_thickening(ell, flag));
    REQUIRE(in_thickening(ell, rebased));
    (void)dir;
  }
}

TEST_CASE("decompose: frozen model values at the basepoint") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const int n = sp.n();
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    const EinPoint ell(sp, unit_axis(n, 0));
    const auto [u, z] = decompose(ell, at);
    const double s = 1.0 / std::sqrt(2.0);
    REQUIRE((u - s * (unit_axis(n, 0) + unit_axis(n, n - 1))).norm() < 1e-15);
    REQUIRE((z - s * (unit_axis(n, 0) - unit_axis(n, n - 1))).norm() < 1e-15);
    REQUIRE(sp.q(u) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(sp.q(z) == Catch::Approx(-1.0).margin(1e-14));
    REQUIRE(sp.q(u, z) == Catch::Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("decompose round trip with canonical signs") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd u =
          at.base_basis() * sphere_sample(p, 90, 0, trial);
      const Eigen::VectorXd z =
          at.perp_basis() * sphere_sample(p + 1, 90, 1, trial);
      const EinPoint ell(sp, u + z);
      const auto [u2, z2] = decompose(ell, at);
      const double sign = (u2 - u).norm() < (u2 + u).norm() ? 1.0 : -1.0;
      REQUIRE((u2 - sign * u).norm() < 1e-10);
      REQUIRE((z2 - sign * z).norm() < 1e-10);
      REQUIRE(sp.q(u2) == Catch::Approx(1.0).margin(1e-10));
      REQUIRE(sp.q(z2) == Catch::Approx(-1.0).margin(1e-10));
      // Canonical sign of the returned pair is carried by u.
      REQUIRE((canonical_sign(u2) - u2).norm() == 0.0);
    }
  }
}

TEST_CASE("decompose works at a moved base point") {
  QuadraticSpace sp(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd g = random_group_element(sp, 91, 0, trial);
    SpacelikePoint at(sp, g * sp.spacelike_basis());
    const Eigen::VectorXd u =
        at.base_basis() * sphere_sample(4, 92, 0, trial);
    const Eigen::VectorXd z =
        at.perp_basis() * sphere_sample(5, 92, 1, trial);
    const EinPoint ell(sp, u + z);
    const auto [u2, z2] = decompose(ell, at);
    REQUIRE(sp.q(u2) == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(sp.q(z2) == Catch::Approx(-1.0).margin(1e-10));
    REQUIRE(std::min((u2 - u).norm(), (u2 + u).norm()) < 1e-9);
  }
}

TEST_CASE("fibration projection collapses each fiber sphere to its base") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);
    const Eigen::VectorXd u =
        at.base_basis() * sphere_sample(p, 95, 0, p);
    const Eigen::VectorXd u_canon = canonical_sign(u);
    for (int k = 0; k < 25; ++k) {
      const Eigen::VectorXd z =
          at.perp_basis() * sphere_sample(p + 1, 95, 1, 100 * p + k);
      REQUIRE(sp.q(z) == Catch::Approx(-1.0).margin(1e-12));
      const Eigen::VectorXd base = fibration_project(EinPoint(sp, u + z), at);
      REQUIRE((base - u_canon).norm() < 1e-12);
    }
  }
}

TEST_CASE("pointing dictionary: rank-one maps point to their graph lines") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    SpacelikePoint at = SpacelikePoint::basepoint(sp);

    // Model ray points toward [e_0].
    const auto model = points_toward_ein(model_ray_derivative(sp));
    REQUIRE(model.has_value());
    REQUIRE((model->rep - unit_axis(sp.n(), 0)).norm() < 1e-15);

    const TangentMap zero{at, Eigen::MatrixXd::Zero(p + 1, p)};
    REQUIRE_FALSE(points_toward_ein(zero).has_value());

    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::VectorXd a = sphere_sample(p, 96, 0, trial);
      const Eigen::VectorXd b = sphere_sample(p + 1, 96, 1, trial);
      const double lambda = 0.25 + 3.0 * CounterRng(96, 2, trial).uniform();
      const TangentMap phi{at, lambda * b * a.transpose()};
      const auto ell = points_toward_ein(phi);
      REQUIRE(ell.has_value());
      const Eigen::VectorXd expected =
          canonical_sign((at.base_basis() * a + at.perp_basis() * b) /
                         std::sqrt(2.0));
      REQUIRE((ell->rep - expected).norm() < 1e-12);

      // Round trip through decompose recovers the constructing pair.
      const auto [u2, z2] = decompose(*ell, at);
      const Eigen::VectorXd u0 = at.base_basis() * a;
      const double sign = (u2 - u0).norm() < (u2 + u0).norm() ? 1.0 : -1.0;
      REQUIRE((u2 - sign * u0).norm() < 1e-10);
      REQUIRE((z2 - sign * at.perp_basis() * b).norm() < 1e-10);
    }

    // Generic full-rank maps point nowhere.
    for (int trial = 0; trial < 10; ++trial) {
      CounterRng rng(97, 0, trial);
      Eigen::MatrixXd m(p + 1, p);
      for (int j = 0; j < p; ++j) m.col(j) = rng.gaussian_vector(p + 1);
      REQUIRE_FALSE(points_toward_ein(TangentMap{at, m}).has_value());
    }
  }
}

TEST_CASE("pointing is equivariant under the group action") {
  QuadraticSpace sp(3);
  SpacelikePoint at = SpacelikePoint::basepoint(sp);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd a = sphere_sample(3, 98, 0, trial);
    const Eigen::VectorXd b = sphere_sample(4, 98, 1, trial);
    const TangentMap phi{at, b * a.transpose()};
    const Eigen::MatrixXd g = random_group_element(sp, 99, 0, trial);
    const auto moved = points_toward_ein(pushforward(phi, g));
    REQUIRE(moved.has_value());
    const EinPoint expected(sp, g * points_toward_ein(phi)->rep);
    REQUIRE((moved->rep - expected.rep).norm() < 1e-8);
  }
}
