// Walkthrough: build a pencil, check its regularity, sample its base, and
// test the samples against word thickenings — the library's core loop, at
// desk scale, with every number printed.

#include <cstdio>

#include <einfiber/verify.hpp>

using namespace einfiber;

int main() {
  const int p = 3;
  const QuadraticSpace space(p);
  std::printf("model space: signature (%d, %d), dimension %d\n", p, p + 1,
              space.n());

  // The equivariant pencil: derivative directions of the totally geodesic
  // map at the plane fixed by the embedded rotation circle.
  const Pencil pen = geodesic_pencil(space);
  const auto [regular, margin] = pencil_regular(pen, 64);
  std::printf("geodesic pencil: d = %d, regular = %s, margin = %.6f "
              "(expected 1/p = %.6f)\n",
              pen.d(), regular ? "yes" : "no", margin, 1.0 / p);

  // The deformation family at the model basepoint: regularity over the
  // whole (t, direction) grid.
  const HiggsPencilFamily fam(p);
  const SweepResult sweep = regularity_sweep(fam, 17, 32);
  std::printf("deformation family: min margin %.6f at t = %.3f "
              "(17 x 32 grid)\n",
              sweep.min_margin, sweep.argmin_t);

  // Base samples: isotropic lines [u + z] with every pencil direction
  // annihilating the pair. Fiber over each u is a (p-2)-sphere.
  const int n_u = 4, n_fiber = 3;
  const auto samples = base_sample(pen, n_u, n_fiber, /*seed=*/7);
  std::printf("base samples: %zu lines over %d base directions\n",
              samples.size(), n_u);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const BaseSamplePoint& s = samples[k];
    std::printf("  [%zu] residual %.2e, q(ell) = %+.2e, ell = (", k,
                base_membership_residual(pen, s.ell), space.q(s.ell.rep));
    for (int i = 0; i < space.n(); ++i)
      std::printf("%s%+.3f", i ? ", " : "", s.ell.rep[i]);
    std::printf(")\n");
  }

  // Fiber bundle dimensions at the first sampled base direction.
  const Eigen::VectorXd u = samples.front().u;
  std::printf("fiber bundles at u: dim R_u = %ld (expect 2), "
              "dim R_u-perp = %ld (expect p - 1 = %d)\n",
              static_cast<long>(bundle_R(pen, u).cols()),
              static_cast<long>(bundle_R_perp(pen, u).cols()), p - 1);

  // Discontinuity-domain scan: attracting flags of short reduced words in
  // the surface group versus the sampled base.
  Eigen::MatrixXd points(space.n(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k)
    points.col(static_cast<Eigen::Index>(k)) = samples[k].ell.rep;
  const HitchinRep rep{p, fuchsian_genus2(), {}};
  const DomainScan scan = scan_domain(rep, /*max_word_length=*/4, points);
  std::printf("domain scan (words <= 4): %ld flags tested, %ld violations, "
              "clearance %.4f\n",
              scan.flags_tested, scan.violations, scan.min_distance);

  // The global twist of the fiber field over the base sphere.
  const WindingResult w = chern_winding_p3(/*equator_steps=*/512);
  std::printf("fiber field winding over the base sphere: %d "
              "(turns %.2e, defect %.2e)\n",
              w.winding, w.turns, w.integer_defect);

  return 0;
}
