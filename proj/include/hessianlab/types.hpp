#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hessianlab {

template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad usage or malformed configuration (CLI exit code 2)
struct ConfigError : Error {
  using Error::Error;
};

// lambda lies outside Gamma_k; failing_j is the smallest j with sigma_j <= 0
struct ConeViolation : Error {
  int failing_j;
  ConeViolation(int j, const std::string& what) : Error(what), failing_j(j) {}
};

// Deterministic splittable RNG (SplitMix64 core).  std:: distributions are
// implementation-defined, so uniforms are derived from raw bits directly.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    r.next_u64();
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  double log_uniform(double a, double b) {
    if (b < a) std::swap(a, b);
    return a * std::exp(next_double() * std::log(b / a));
  }

  int uniform_int(int a, int b) {  // inclusive range
    return a + int(next_u64() % std::uint64_t(b - a + 1));
  }

  VectorXd gaussian_vec(int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      // Box-Muller from two uniforms
      double u1 = std::max(next_double(), 1e-300);
      double u2 = next_double();
      v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    return v;
  }

  VectorXd unit_vec(int n) {
    VectorXd v = gaussian_vec(n);
    double norm = v.norm();
    if (norm < 1e-300) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return v / norm;
  }
};

}  // namespace hessianlab
