// Foundations: the model form on R^{2p+1}, adapted bases, q-orthogonal
// complements, and the deterministic sampling primitives. Frozen values below
// were computed by hand from the definitions (anti-diagonal ones with a -1 at
// the center).
#include <catch2/catch_amalgamated.hpp>

#include <einfiber/linalg.hpp>
#include <einfiber/quadratic_space.hpp>
#include <einfiber/rng.hpp>

using einfiber::CounterRng;
using einfiber::kRankTol;
using einfiber::null_space;
using einfiber::numeric_rank;
using einfiber::orthonormal_columns;
using einfiber::QuadraticSpace;
using einfiber::sphere_sample;
using einfiber::subspace_distance;

TEST_CASE("form matrix entries, p = 3") {
  QuadraticSpace sp(3);
  REQUIRE(sp.p() == 3);
  REQUIRE(sp.n() == 7);
  const Eigen::MatrixXd& f = sp.form();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      double expect = (j == 6 - i) ? 1.0 : 0.0;
      if (i == 3 && j == 3) expect = -1.0;
      REQUIRE(f(i, j) == expect);
    }
  }
}

TEST_CASE("form is a symmetric involution with signature (p, p+1)") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const int n = sp.n();
    const Eigen::MatrixXd& f = sp.form();
    REQUIRE((f - f.transpose()).norm() == 0.0);
    REQUIRE((f * f - Eigen::MatrixXd::Identity(n, n)).norm() == 0.0);
    auto [pos, neg] = sp.signature(Eigen::MatrixXd::Identity(n, n));
    REQUIRE(pos == p);
    REQUIRE(neg == p + 1);
  }
}

TEST_CASE("p below 3 is rejected with the documented message") {
  REQUIRE_THROWS_AS(QuadraticSpace(2), std::invalid_argument);
  REQUIRE_THROWS_WITH(QuadraticSpace(2),
                      "p ≥ 3 required; p = 2 treated in prior work");
  REQUIRE_THROWS_AS(QuadraticSpace(0), std::invalid_argument);
}

TEST_CASE("adapted bases are q- and Euclidean-orthonormal and complementary") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const Eigen::MatrixXd b = sp.spacelike_basis();
    const Eigen::MatrixXd c = sp.timelike_basis();
    REQUIRE((sp.q_gram(b) - Eigen::MatrixXd::Identity(p, p)).norm() < 1e-14);
    REQUIRE((sp.q_gram(c) + Eigen::MatrixXd::Identity(p + 1, p + 1)).norm() <
            1e-14);
    REQUIRE((b.transpose() * b - Eigen::MatrixXd::Identity(p, p)).norm() <
            1e-14);
    REQUIRE(
        (c.transpose() * c - Eigen::MatrixXd::Identity(p + 1, p + 1)).norm() <
        1e-14);
    REQUIRE((b.transpose() * sp.form() * c).norm() < 1e-14);

    const Eigen::MatrixXd perp = sp.orthogonal_complement(b);
    REQUIRE(perp.cols() == p + 1);
    REQUIRE(subspace_distance(perp, c) < 1e-12);
  }
}

TEST_CASE("basepoint plane for p = 3 contains the expected vectors") {
  QuadraticSpace sp(3);
  const Eigen::MatrixXd b = sp.spacelike_basis();
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd b0(7);
  b0 << s, 0, 0, 0, 0, 0, s;  // (e_0 + e_6)/sqrt(2)
  REQUIRE((b.col(0) - b0).norm() == 0.0);
  REQUIRE(sp.q(b0) == Catch::Approx(1.0).margin(1e-15));
  Eigen::VectorXd c0(7);
  c0 << s, 0, 0, 0, 0, 0, -s;  // (e_0 - e_6)/sqrt(2)
  REQUIRE(sp.q(c0) == Catch::Approx(-1.0).margin(1e-15));
  REQUIRE(sp.q(b0, c0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("complement dimension and inertia additivity on random subspaces") {
  for (int p : {3, 4, 5, 6}) {
    QuadraticSpace sp(p);
    const int n = sp.n();
    for (int trial = 0; trial < 10; ++trial) {
      const int m =
          1 + static_cast<int>(CounterRng(7, p, trial).next_u64() % (n - 1));
      CounterRng rng(11, p, trial);
      Eigen::MatrixXd a(n, m);
      for (int j = 0; j < m; ++j) a.col(j) = rng.gaussian_vector(n);
      const Eigen::MatrixXd w = orthonormal_columns(a, kRankTol);
      REQUIRE(w.cols() == m);
      const Eigen::MatrixXd wp = sp.orthogonal_complement(w);
      REQUIRE(wp.cols() == n - m);
      auto [pos1, neg1] = sp.signature(w);
      auto [pos2, neg2] = sp.signature(wp);
      REQUIRE(pos1 + pos2 == p);
      REQUIRE(neg1 + neg2 == p + 1);
    }
  }
}

TEST_CASE("sphere_sample is deterministic, unit, and key-separated") {
  const Eigen::VectorXd v1 = sphere_sample(5, 42, 0, 17);
  const Eigen::VectorXd v2 = sphere_sample(5, 42, 0, 17);
  REQUIRE((v1 - v2).norm() == 0.0);
  REQUIRE(std::abs(v1.norm() - 1.0) < 1e-14);
  REQUIRE((sphere_sample(5, 42, 0, 18) - v1).norm() > 1e-3);
  REQUIRE((sphere_sample(5, 42, 1, 17) - v1).norm() > 1e-3);
  REQUIRE((sphere_sample(5, 43, 0, 17) - v1).norm() > 1e-3);
}

TEST_CASE("gaussian sample moments") {
  CounterRng rng(1, 2, 3);
  const int kN = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  REQUIRE(std::abs(sum / kN) < 0.02);
  REQUIRE(std::abs(sum_sq / kN - 1.0) < 0.02);
}

TEST_CASE("rank, null space, and column span on rank-deficient input") {
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
  Eigen::VectorXd b(4);
  b << 1.0, -2.0, 0.5, 3.0;
  const Eigen::MatrixXd m = a * b.transpose();  // 6x4, rank one
  REQUIRE(numeric_rank(m, kRankTol) == 1);

  const Eigen::MatrixXd ns = null_space(m, kRankTol);
  REQUIRE(ns.cols() == 3);
  REQUIRE((m * ns).norm() < 1e-12);
  REQUIRE((ns.transpose() * ns - Eigen::MatrixXd::Identity(3, 3)).norm() <
          1e-13);

  const Eigen::MatrixXd oc = orthonormal_columns(m, kRankTol);
  REQUIRE(oc.cols() == 1);
  REQUIRE(subspace_distance(oc, Eigen::MatrixXd(a / a.norm())) < 1e-12);
}
