#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace einfiber {

// SplitMix64 finalizer (Steele/Lea/Flood). Used both to derive keys and as the
// output function of the counter-based generator below.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator keyed by (seed, stream, index): the i-th sample of a
// run is reproducible without generating the first i-1 samples, so sample
// loops can be reordered or parallelized without changing output. Streams
// separate independent sampling axes (e.g. base points vs fiber points).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    state_ = splitmix64_mix(seed + 0x9e3779b97f4a7c15ULL);
    state_ = splitmix64_mix(state_ ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
    state_ = splitmix64_mix(state_ ^ (0x8cb92ba72f3d8dd7ULL * (index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // in (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd gaussian_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian();
    return v;
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Deterministic unit vector on S^{dim-1}.
inline Eigen::VectorXd sphere_sample(int dim, std::uint64_t seed,
                                     std::uint64_t stream,
                                     std::uint64_t index) {
  CounterRng rng(seed, stream, index);
  Eigen::VectorXd v = rng.gaussian_vector(dim);
  double norm = v.norm();
  while (norm < 1e-12) {  // degenerate draw; continue the same stream
    v = rng.gaussian_vector(dim);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace einfiber
