#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "einfiber/flags.hpp"
#include "einfiber/linalg.hpp"
#include "einfiber/pencils.hpp"
#include "einfiber/quadratic_space.hpp"
#include "einfiber/symspace.hpp"

namespace einfiber {

// ---------------------------------------------------------------------------
// SL(2,R) elements and the genus-2 Fuchsian group
// ---------------------------------------------------------------------------

struct SL2Element {
  Eigen::Matrix2d m;

  explicit SL2Element(const Eigen::Matrix2d& mat) : m(mat) {
    if (std::abs(m.determinant() - 1.0) > 1e-12)
      throw std::invalid_argument("sl2 element: determinant must be 1");
  }
};

// Exact inverse through the adjugate (det = 1).
inline Eigen::Matrix2d sl2_inverse(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv;
}

namespace detail {

using Cplx = std::complex<double>;

// SU(1,1) isometries of the Poincare disk.
inline Eigen::Matrix2cd disk_translate(Cplx p) {
  const double s = 1.0 / std::sqrt(1.0 - std::norm(p));
  Eigen::Matrix2cd m;
  m << s, s * p, s * std::conj(p), s;
  return m;
}

inline Eigen::Matrix2cd disk_rotate(double theta) {
  Eigen::Matrix2cd m;
  m << std::polar(1.0, theta / 2.0), 0.0, 0.0, std::polar(1.0, -theta / 2.0);
  return m;
}

inline Cplx disk_apply(const Eigen::Matrix2cd& m, Cplx z) {
  return (m(0, 0) * z + m(0, 1)) / (m(1, 0) * z + m(1, 1));
}

// Sends p to 0 and q onto the positive real axis.
inline Eigen::Matrix2cd disk_align(Cplx p, Cplx q) {
  const Eigen::Matrix2cd t = disk_translate(p).inverse();
  return disk_rotate(-std::arg(disk_apply(t, q))) * t;
}

// The unique orientation-preserving isometry with p1 -> q1 and p2 -> q2
// (hyperbolic distances must agree).
inline Eigen::Matrix2cd disk_segment_map(Cplx p1, Cplx p2, Cplx q1, Cplx q2) {
  return disk_align(q1, q2).inverse() * disk_align(p1, p2);
}

// Conjugate SU(1,1) to SL(2,R) by the Cayley-type intertwiner
// [[1, -i], [1, i]]; the result of conjugating an SU(1,1) element is real.
inline Eigen::Matrix2d to_sl2r(const Eigen::Matrix2cd& m) {
  Eigen::Matrix2cd k;
  k << Cplx(1, 0), Cplx(0, -1), Cplx(1, 0), Cplx(0, 1);
  const Eigen::Matrix2cd real_m = k.inverse() * m * k;
  return real_m.real();
}

}  // namespace detail

// Side pairings of the regular hyperbolic octagon with interior angle pi/4
// (angle sum 2pi, so the quotient is a closed genus-2 surface). With vertices
// v_k at disk radius tanh(r/2), cosh(r) = cot^2(pi/8), the map X_k carries
// side (v_{k+2}, v_{k+3}) reversed onto (v_k, v_{k+1}); the returned tuple
// (X_0, X_1^{-1}, X_4, X_5^{-1}) satisfies the surface-group relation
// [a1,b1][a2,b2] = I exactly (to roundoff) in SL(2,R), not just in PSL.
inline std::array<SL2Element, 4> fuchsian_genus2() {
  using detail::Cplx;
  const double r = std::acosh(std::pow(1.0 / std::tan(std::numbers::pi / 8.0), 2.0));
  const double rd = std::tanh(r / 2.0);
  std::array<Cplx, 8> v;
  for (int k = 0; k < 8; ++k)
    v[k] = std::polar(rd, k * std::numbers::pi / 4.0);
  const auto pairing = [&](int k) {
    return detail::disk_segment_map(v[(k + 2) % 8], v[(k + 3) % 8],
                                    v[(k + 1) % 8], v[k % 8]);
  };
  return {SL2Element(detail::to_sl2r(pairing(0))),
          SL2Element(detail::to_sl2r(pairing(1).inverse())),
          SL2Element(detail::to_sl2r(pairing(4))),
          SL2Element(detail::to_sl2r(pairing(5).inverse()))};
}

// ---------------------------------------------------------------------------
// The symmetric power Sym^{2p} and the principal embedding
// ---------------------------------------------------------------------------

namespace detail {

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

inline void fill_powers(double x, int n, std::vector<double>& out) {
  out.assign(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) out[i] = out[i - 1] * x;
}

}  // namespace detail

// Action of g on the degree-n symmetric power of R^2 in the monomial basis
// m_a = x^{n-a} y^a: substitute x -> g00 x + g10 y, y -> g01 x + g11 y and
// expand. Functorial, so an exact group homomorphism; diag(l, 1/l) acts
// diagonally with weights l^{n-2a}.
inline Eigen::MatrixXd sym_power(const Eigen::Matrix2d& g, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
  std::vector<double> pow_a, pow_c, pow_b, pow_d;
  detail::fill_powers(g(0, 0), n, pow_a);
  detail::fill_powers(g(1, 0), n, pow_c);
  detail::fill_powers(g(0, 1), n, pow_b);
  detail::fill_powers(g(1, 1), n, pow_d);
  for (int a = 0; a <= n; ++a) {
    // (g00 x + g10 y)^{n-a} (g01 x + g11 y)^a, collected by y-degree i + j.
    for (int i = 0; i <= n - a; ++i) {
      const double left =
          detail::binomial(n - a, i) * pow_a[n - a - i] * pow_c[i];
      for (int j = 0; j <= a; ++j) {
        out(i + j, a) +=
            left * detail::binomial(a, j) * pow_b[a - j] * pow_d[j];
      }
    }
  }
  return out;
}

// Derivative of sym_power at the identity: the Lie-algebra action, tridiagonal
// in the monomial basis.
inline Eigen::MatrixXd dsym_power(const Eigen::Matrix2d& x, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    out(a, a) = (n - a) * x(0, 0) + a * x(1, 1);
    if (a + 1 <= n) out(a + 1, a) = (n - a) * x(1, 0);
    if (a - 1 >= 0) out(a - 1, a) = a * x(0, 1);
  }
  return out;
}

// Precomputed intertwining data for one rank: the invariant symmetric form S
// on Sym^{2p} (unique up to scale by irreducibility), and a congruence T with
// T^T S T = [q], so that conjugation by T carries the symmetric-power action
// into SO(p,p+1) in model coordinates.
struct PrincipalCache {
  Eigen::MatrixXd sym_form;  // S, normalized: corner |S(0, n)| = 1
  Eigen::MatrixXd t;
  Eigen::MatrixXd t_inv;
};

// The cache is computed in extended precision and rounded once at the end:
// the form defect of an embedded image scales like ||eta||^2 times the error
// in the stored intertwiner, so squeezing that error down to pure storage
// rounding buys two extra digits on every downstream residual.
inline const PrincipalCache& principal_cache(int p) {
  static std::mutex mu;
  static std::map<int, PrincipalCache> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto it = cache.find(p);
  if (it != cache.end()) return it->second;

  using Ld = long double;
  using MatL = Eigen::Matrix<Ld, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = 2 * p;
  const int dim = n + 1;

  // Solve d^T S + S d = 0 over the sl2 triple; vec(S) spans the null space.
  // The Lie-algebra actions of the triple have small integer entries, so
  // casting them up is exact.
  Eigen::Matrix2d e, f, h;
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  h << 1, 0, 0, -1;
  const MatL id = MatL::Identity(dim, dim);
  MatL sys(3 * dim * dim, dim * dim);
  int row = 0;
  for (const Eigen::Matrix2d& x : {e, f, h}) {
    const MatL dt = dsym_power(x, n).transpose().cast<Ld>();
    sys.middleRows(row, dim * dim) =
        Eigen::kroneckerProduct(id, dt) + Eigen::kroneckerProduct(dt, id);
    row += dim * dim;
  }
  Eigen::FullPivLU<MatL> lu(sys);
  lu.setThreshold(Ld(1e-10));  // relative to the largest pivot
  if (lu.dimensionOfKernel() != 1)
    throw std::runtime_error("invariant form is not unique");
  const MatL kernel = lu.kernel();
  MatL s = Eigen::Map<const MatL>(kernel.data(), dim, dim);
  s = Ld(0.5) * (s + s.transpose());
  s /= s.cwiseAbs().maxCoeff();

  // Fix the overall sign so the inertia is (p, p+1) like the model form.
  Eigen::SelfAdjointEigenSolver<MatL> es(s);
  int pos = 0;
  for (int i = 0; i < dim; ++i)
    if (es.eigenvalues()[i] > 0) ++pos;
  if (pos == p + 1) {
    s = -s;
    es.compute(s);
    pos = dim - pos;
  }
  if (pos != p)
    throw std::runtime_error("invariant form has unexpected inertia");

  // S = W J0 W^T with J0 = diag(I_p, -I_{p+1}): positives first.
  MatL w(dim, dim);
  int col = 0;
  for (int i = dim - 1; i >= 0; --i)
    if (es.eigenvalues()[i] > 0)
      w.col(col++) = es.eigenvectors().col(i) * std::sqrt(es.eigenvalues()[i]);
  for (int i = 0; i < dim; ++i)
    if (es.eigenvalues()[i] <= 0)
      w.col(col++) = es.eigenvectors().col(i) * std::sqrt(-es.eigenvalues()[i]);

  // [q] = U J0 U^T with the explicit adapted bases (rebuilt here in extended
  // precision, mirroring QuadraticSpace), so T = W^{-T} U^T gives
  // T^T S T = U J0 U^T = [q].
  MatL u = MatL::Zero(dim, dim);
  const Ld rsqrt2 = Ld(1) / std::sqrt(Ld(2));
  for (int i = 0; i < p; ++i) {
    u(i, i) = rsqrt2;              // spacelike: (e_i + e_{n-1-i}) / sqrt(2)
    u(dim - 1 - i, i) = rsqrt2;
    u(i, p + i) = rsqrt2;          // timelike: (e_i - e_{n-1-i}) / sqrt(2)
    u(dim - 1 - i, p + i) = -rsqrt2;
  }
  u(p, 2 * p) = 1;                 // timelike: e_p
  const MatL t = w.transpose().fullPivLu().solve(u.transpose());
  PrincipalCache pc;
  pc.sym_form = s.cast<double>();
  pc.t = t.cast<double>();
  pc.t_inv = t.fullPivLu().inverse().cast<double>();
  return cache.emplace(p, std::move(pc)).first->second;
}

// Principal embedding of a 2x2 matrix with determinant 1 (up to roundoff;
// the input is rescaled by 1/sqrt(det) so long word products stay on the
// group). Output preserves the model form and has determinant 1.
inline Eigen::MatrixXd principal_embed(const Eigen::Matrix2d& g, int p) {
  const double det = g.determinant();
  if (!(det > 0.0))
    throw std::invalid_argument("principal embed: determinant must be positive");
  const PrincipalCache& pc = principal_cache(p);
  return pc.t_inv * sym_power(g / std::sqrt(det), 2 * p) * pc.t;
}

inline Eigen::MatrixXd principal_embed(const SL2Element& g, int p) {
  return principal_embed(g.m, p);
}

// Derivative of the principal embedding: sl(2,R) -> so(p,p+1).
inline Eigen::MatrixXd principal_embed_derivative(const Eigen::Matrix2d& x,
                                                  int p) {
  const PrincipalCache& pc = principal_cache(p);
  return pc.t_inv * dsym_power(x, 2 * p) * pc.t;
}

namespace detail {

// Newton projection toward the isometry group of the involutive model form:
// with Y = F eta^T F eta, the update eta (3I - Y)/2 squares the form defect.
// Only applied to stored group constants (generator images); word images
// must stay untouched because the update's own roundoff, while tangent to
// the isometry manifold, moves large-norm elements measurably and drags
// their attracting planes along.
inline Eigen::MatrixXd isometry_polish(const QuadraticSpace& space,
                                       Eigen::MatrixXd eta, int rounds) {
  const Eigen::Index dim = eta.rows();
  for (int r = 0; r < rounds; ++r) {
    const Eigen::MatrixXd y =
        space.form() * eta.transpose() * space.form() * eta;
    eta = eta * (1.5 * Eigen::MatrixXd::Identity(dim, dim) - 0.5 * y);
  }
  return eta;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hitchin representations of the genus-2 surface group
// ---------------------------------------------------------------------------

// Reduced words in the generators: letters +-1..+-4 stand for a1, b1, a2, b2
// and their inverses. Enumeration order is length first, then lexicographic
// in the letter order (1, -1, 2, -2, 3, -3, 4, -4).
using Word = std::vector<std::int8_t>;

struct HitchinRep {
  int p;
  std::array<SL2Element, 4> gen_sl2;    // a1, b1, a2, b2
  std::array<Eigen::MatrixXd, 4> gens;  // their principal images

  // Builds the representation at the fixed Fuchsian point. Generator images
  // are re-projected onto the isometry group before validation; note that at
  // p >= 5 their norms are so large that even entrywise rounding of an exact
  // isometry to double breaks the form beyond the constructor tolerance, so
  // construction reports failure there rather than storing unusable images.
  static HitchinRep fuchsian(int p_rank) {
    const QuadraticSpace space(p_rank);
    HitchinRep rep{p_rank, fuchsian_genus2(), {}};
    for (int i = 0; i < 4; ++i) {
      rep.gens[i] = detail::isometry_polish(
          space, principal_embed(rep.gen_sl2[i], p_rank), 3);
      const double residual =
          (rep.gens[i].transpose() * space.form() * rep.gens[i] -
           space.form())
              .norm();
      if (residual > 1e-8)
        throw std::runtime_error("hitchin rep: generator breaks the form");
    }
    if (relator_residual(rep) > 1e-6)
      throw std::runtime_error("hitchin rep: relator violated");
    return rep;
  }

  // Residual of the surface-group relation under the embedded representation,
  // evaluated through the 2x2 lift (the embedding is an exact homomorphism,
  // so this avoids the norm blow-up of multiplying the big images).
  static double relator_residual(const std::array<SL2Element, 4>& gen_sl2,
                                 int p_rank) {
    const Word relator = {1, 2, -1, -2, 3, 4, -3, -4};
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    for (const std::int8_t letter : relator) {
      const Eigen::Matrix2d& g = gen_sl2[std::abs(letter) - 1].m;
      m = m * (letter > 0 ? g : sl2_inverse(g));
    }
    const Eigen::MatrixXd image = principal_embed(m, p_rank);
    return (image - Eigen::MatrixXd::Identity(image.rows(), image.cols()))
        .norm();
  }

  static double relator_residual(const HitchinRep& rep) {
    return relator_residual(rep.gen_sl2, rep.p);
  }

  friend Eigen::Matrix2d sl2_word(const HitchinRep& rep, const Word& w) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    for (const std::int8_t letter : w) {
      const Eigen::Matrix2d& g = rep.gen_sl2[std::abs(letter) - 1].m;
      m = m * (letter > 0 ? g : sl2_inverse(g));
    }
    return m;
  }

  friend Eigen::MatrixXd embed_word(const HitchinRep& rep, const Word& w) {
    return principal_embed(sl2_word(rep, w), rep.p);
  }
};

namespace detail {

inline int letter_rank(std::int8_t letter) {
  return (std::abs(letter) - 1) * 2 + (letter < 0 ? 1 : 0);
}

inline std::int8_t rank_letter(int rank) {
  const std::int8_t idx = static_cast<std::int8_t>(rank / 2 + 1);
  return rank % 2 == 0 ? idx : static_cast<std::int8_t>(-idx);
}

// Depth-first enumeration of reduced words with the running 2x2 product;
// calls visit(word, product) at every node of length <= max_len.
template <typename F>
void walk_reduced(const std::array<Eigen::Matrix2d, 8>& letters, Word& word,
                  const Eigen::Matrix2d& product, int max_len, F& visit) {
  if (static_cast<int>(word.size()) == max_len) return;
  const int last =
      word.empty() ? -1 : letter_rank(word.back());
  for (int r = 0; r < 8; ++r) {
    if (last >= 0 && (last ^ 1) == r) continue;  // cancellation
    word.push_back(rank_letter(r));
    const Eigen::Matrix2d next = product * letters[r];
    visit(static_cast<const Word&>(word), next);
    walk_reduced(letters, word, next, max_len, visit);
    word.pop_back();
  }
}

inline std::array<Eigen::Matrix2d, 8> letter_matrices(const HitchinRep& rep) {
  std::array<Eigen::Matrix2d, 8> letters;
  for (int i = 0; i < 4; ++i) {
    letters[2 * i] = rep.gen_sl2[i].m;
    letters[2 * i + 1] = sl2_inverse(rep.gen_sl2[i].m);
  }
  return letters;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Limit planes and the thickening domain
// ---------------------------------------------------------------------------

struct LimitPlane {
  IsotropicFlag flag;
  double gap;  // |lambda_p| / |lambda_{p+1}| - 1
};

// Attracting isotropic p-plane of a proximal element: the span of the p
// largest-modulus eigenvalues' eigenvectors. Absent when the spectral gap is
// below the threshold or the top block is not real (non-loxodromic input);
// callers skip and count such words.
inline std::optional<LimitPlane> limit_plane(const QuadraticSpace& space,
                                             const Eigen::MatrixXd& g,
                                             double gap_threshold = 0.5) {
  const int p = space.p();
  const int n = space.n();
  Eigen::EigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) return std::nullopt;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
  });
  const double top = std::abs(es.eigenvalues()[idx[p - 1]]);
  const double next = std::abs(es.eigenvalues()[idx[p]]);
  const double ratio = next > 0.0 ? top / next
                                  : std::numeric_limits<double>::infinity();
  if (!(ratio > 1.0 + gap_threshold)) return std::nullopt;

  Eigen::MatrixXd basis(n, p);
  for (int i = 0; i < p; ++i) {
    const std::complex<double> lambda = es.eigenvalues()[idx[i]];
    if (std::abs(lambda.imag()) > 1e-8 * std::abs(lambda))
      return std::nullopt;  // complex pair among the leading block
    Eigen::VectorXcd v = es.eigenvectors().col(idx[i]);
    int jmax = 0;
    v.cwiseAbs().maxCoeff(&jmax);
    v *= std::polar(1.0, -std::arg(v[jmax]));  // rotate to a real vector
    if (v.imag().norm() > 1e-6 * v.real().norm()) return std::nullopt;
    basis.col(i) = v.real();
  }
  // The nonsymmetric eigensolver only delivers the plane to about
  // eps * ||g||; a few rounds of subspace iteration (linear rate 1/ratio)
  // polish it to machine precision before the isotropy validation.
  basis = orthonormal_columns(basis, kRankTol);
  if (basis.cols() != p) return std::nullopt;
  for (int round = 0; round < 4; ++round) {
    basis = orthonormal_columns(g * basis, kRankTol);
    if (basis.cols() != p) return std::nullopt;
  }
  // Snap to the nearest totally isotropic plane: with the model form an
  // involution, B -> B - 1/2 F B (B^T F B) kills the q-Gram to second
  // order, absorbing the form-preservation defect of the computed image.
  for (int round = 0; round < 3; ++round)
    basis -= 0.5 * space.form() * basis * space.q_gram(basis);
  try {
    return LimitPlane{IsotropicFlag(space, basis), ratio - 1.0};
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

namespace detail {

// Attracting plane of the embedded image of a 2x2 element, computed from the
// 2x2 eigenvectors instead of the big matrix. With V = [v+ v-] the
// eigenvector basis, the top-p eigenplane of the symmetric-power action is
// spanned by the images of the leading monomials, i.e. the binary forms
// divisible by the attracting linear form to order >= n-p+1; per-column
// scaling drops out of the span, so no determinant normalization is needed.
// Unlike the dense eigensolver route, the accuracy here is independent of
// the word length: the eigenvector columns stay unit scale no matter how
// large the embedded image is.
inline std::optional<LimitPlane> limit_plane_sl2(const QuadraticSpace& space,
                                                 const Eigen::Matrix2d& g,
                                                 double gap_threshold) {
  const int p = space.p();
  const double tr = g.trace();
  const double det = g.determinant();
  const double disc = tr * tr - 4.0 * det;
  if (!(disc > 0.0)) return std::nullopt;  // elliptic or parabolic
  // Largest-modulus eigenvalue first; the second via the product to avoid
  // cancellation. Embedded eigenvalue moduli are |mu+|^{n-k} |mu-|^k, so the
  // proximality ratio at index p is |mu+ / mu-|.
  const double mu_plus =
      (tr >= 0.0 ? tr + std::sqrt(disc) : tr - std::sqrt(disc)) / 2.0;
  const double mu_minus = det / mu_plus;
  const double ratio = std::abs(mu_plus / mu_minus);
  if (!(ratio > 1.0 + gap_threshold)) return std::nullopt;

  const auto eigvec = [&g](double mu) {
    // Null vector of (g - mu I) from its better-scaled row.
    const Eigen::Vector2d v1(g(0, 1), mu - g(0, 0));
    const Eigen::Vector2d v2(mu - g(1, 1), g(1, 0));
    return (v1.norm() >= v2.norm() ? v1 : v2).normalized();
  };
  Eigen::Matrix2d v;
  v.col(0) = eigvec(mu_plus);
  v.col(1) = eigvec(mu_minus);

  const PrincipalCache& pc = principal_cache(p);
  Eigen::MatrixXd basis =
      pc.t_inv * sym_power(v, 2 * p).leftCols(p);
  basis = orthonormal_columns(basis, kRankTol);
  if (basis.cols() != p) return std::nullopt;  // axis endpoints collide
  for (int round = 0; round < 3; ++round)
    basis -= 0.5 * space.form() * basis * space.q_gram(basis);
  try {
    return LimitPlane{IsotropicFlag(space, basis), ratio - 1.0};
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Attracting plane of the principal image of an SL(2,R) element, evaluated
// through the lift. Agrees with the matrix overload on desk-scale images and
// stays accurate for word images whose embedded norm makes the dense
// eigenproblem hopeless.
inline std::optional<LimitPlane> limit_plane(const QuadraticSpace& space,
                                             const SL2Element& g,
                                             double gap_threshold = 0.5) {
  return detail::limit_plane_sl2(space, g.m, gap_threshold);
}

struct BoundarySample {
  Word word;
  IsotropicFlag flag;
  double gap;
};

struct LimitSetSample {
  std::vector<BoundarySample> samples;
  long words_total = 0;
  long skipped = 0;  // words failing the gap or realness test
};

// Finite stand-in for the limit set: one attracting flag per reduced word of
// length <= max_word_length that passes the proximality gap, deduplicated by
// subspace distance <= 1e-6 (first word in length-then-lex order wins).
// Duplicate lookups go through a sorted invariant key (a fixed bilinear probe
// of the projector), which is 1-Lipschitz in the subspace distance.
inline LimitSetSample sample_limit_set(const HitchinRep& rep,
                                       int max_word_length,
                                       double gap_threshold = 0.5) {
  const QuadraticSpace space(rep.p);
  const Eigen::VectorXd probe1 = sphere_sample(space.n(), 12345, 7, 0);
  const Eigen::VectorXd probe2 = sphere_sample(space.n(), 12345, 7, 1);
  LimitSetSample out;
  std::multimap<double, std::size_t> key_index;
  const auto letters = detail::letter_matrices(rep);

  for (int len = 1; len <= max_word_length; ++len) {
    Word word;
    auto visit = [&](const Word& w, const Eigen::Matrix2d& product) {
      if (static_cast<int>(w.size()) != len) return;
      ++out.words_total;
      const auto plane = detail::limit_plane_sl2(space, product, gap_threshold);
      if (!plane) {
        ++out.skipped;
        return;
      }
      const double key =
          probe1.dot(plane->flag.basis * (plane->flag.basis.transpose() * probe2));
      const auto lo = key_index.lower_bound(key - 1e-5);
      const auto hi = key_index.upper_bound(key + 1e-5);
      for (auto it = lo; it != hi; ++it) {
        if (subspace_distance(out.samples[it->second].flag.basis,
                              plane->flag.basis) <= 1e-6)
          return;  // duplicate of an earlier (shorter or lex-smaller) word
      }
      key_index.emplace(key, out.samples.size());
      out.samples.push_back(BoundarySample{w, plane->flag, plane->gap});
    };
    detail::walk_reduced(letters, word, Eigen::Matrix2d::Identity(), len,
                         visit);
  }
  return out;
}

// One-sided domain membership: true iff ell avoids every sampled thickening.
// A finite sample makes "false" a certified exclusion, while "true" is only
// as strong as the sample is dense.
inline bool in_domain(const EinPoint& ell,
                      const std::vector<BoundarySample>& samples,
                      double tol = kContainTol) {
  for (const BoundarySample& s : samples)
    if (in_thickening(ell, s.flag, tol)) return false;
  return true;
}

struct DomainScan {
  long words_total = 0;
  long skipped = 0;
  long flags_tested = 0;
  long violations = 0;  // (flag, point) pairs in containment
  double min_distance = std::numeric_limits<double>::infinity();
};

// Streaming sweep over every reduced word of length <= max_word_length,
// testing the given points (columns, unit norm) against each attracting
// flag without storing the flags. min_distance is the smallest containment
// residual seen, i.e. the margin by which the point set clears the sampled
// thickenings.
inline DomainScan scan_domain(const HitchinRep& rep, int max_word_length,
                              const Eigen::MatrixXd& points,
                              double gap_threshold = 0.5,
                              double tol = kContainTol) {
  const QuadraticSpace space(rep.p);
  DomainScan scan;
  const auto letters = detail::letter_matrices(rep);
  Word word;
  auto visit = [&](const Word&, const Eigen::Matrix2d& product) {
    ++scan.words_total;
    const auto plane = detail::limit_plane_sl2(space, product, gap_threshold);
    if (!plane) {
      ++scan.skipped;
      return;
    }
    ++scan.flags_tested;
    const Eigen::MatrixXd& b = plane->flag.basis;
    const Eigen::MatrixXd residual = points - b * (b.transpose() * points);
    for (int j = 0; j < residual.cols(); ++j) {
      const double dist = residual.col(j).norm();
      if (dist <= tol) ++scan.violations;
      scan.min_distance = std::min(scan.min_distance, dist);
    }
  };
  detail::walk_reduced(letters, word, Eigen::Matrix2d::Identity(),
                       max_word_length, visit);
  return scan;
}

// ---------------------------------------------------------------------------
// The equivariant totally geodesic pencil
// ---------------------------------------------------------------------------

// The spacelike p-plane fixed by the image of SO(2) under the principal
// embedding: the q-positive part of the invariant-plane decomposition of the
// infinitesimal rotation. This is the image of the disk's center under the
// equivariant totally geodesic map.
inline SpacelikePoint rotation_fixed_point(const QuadraticSpace& space) {
  const int p = space.p();
  const int n = space.n();
  Eigen::Matrix2d k;
  k << 0, 1, -1, 0;
  const Eigen::MatrixXd kk = principal_embed_derivative(k, p);
  Eigen::EigenSolver<Eigen::MatrixXd> es(kk);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();

  Eigen::MatrixXd span(n, p);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()[i];
    if (lambda.imag() > 1e-9 * scale) {
      // One representative per conjugate pair: the rotation 2-plane.
      const Eigen::VectorXd re = es.eigenvectors().col(i).real();
      const Eigen::VectorXd im = es.eigenvectors().col(i).imag();
      Eigen::MatrixXd plane(n, 2);
      plane << re, im;
      if (space.signature(orthonormal_columns(plane, kRankTol)) ==
          std::make_pair(2, 0)) {
        if (col + 2 > p) throw std::runtime_error("fixed plane too large");
        span.col(col++) = re;
        span.col(col++) = im;
      }
    } else if (std::abs(lambda) <= 1e-9 * scale) {
      Eigen::VectorXcd v = es.eigenvectors().col(i);
      int jmax = 0;
      v.cwiseAbs().maxCoeff(&jmax);
      v *= std::polar(1.0, -std::arg(v[jmax]));
      const Eigen::VectorXd real_v = v.real();
      if (space.q(real_v) > 0.0) {
        if (col + 1 > p) throw std::runtime_error("fixed plane too large");
        span.col(col++) = real_v;
      }
    }
  }
  if (col != p) throw std::runtime_error("fixed plane has wrong dimension");
  return SpacelikePoint(space, span);
}

// The tangent pencil of the equivariant totally geodesic disk at the
// rotation-fixed point: the image of the Cartan complement of sl(2,R). The
// Cartan projection of each unit direction is (2p, 2p-2, ..., 2), so every
// direction is Ein-regular with relative margin 1/p.
inline Pencil geodesic_pencil(const QuadraticSpace& space) {
  const SpacelikePoint at = rotation_fixed_point(space);
  Eigen::Matrix2d s1, s2;
  s1 << 1, 0, 0, -1;
  s2 << 0, 1, 1, 0;
  const TangentMap psi1 =
      tangent_from_ambient(at, principal_embed_derivative(s1, space.p()));
  const TangentMap psi2 =
      tangent_from_ambient(at, principal_embed_derivative(s2, space.p()));
  return Pencil(at, {psi1, psi2});
}

}  // namespace einfiber
