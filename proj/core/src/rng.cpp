#include "fleetsample/rng.hpp"

#include <cmath>
#include <numbers>

namespace fleetsample {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t RngStream::categorical(const Eigen::Ref<const Vector>& probs) {
  const double u = uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs(k) <= 0.0) continue;
    last_positive = static_cast<std::size_t>(k);
    cumulative += probs(k);
    if (u < cumulative) return static_cast<std::size_t>(k);
  }
  // u landed in the rounding gap above the cumulative sum.
  return last_positive;
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape + 1 and scale back by U^(1/shape).
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Vector RngStream::dirichlet(std::size_t n, double alpha) {
  Vector g(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = gamma(alpha);
  const double s = g.sum();
  if (!(s > 0.0)) return Vector::Constant(g.size(), 1.0 / static_cast<double>(n));
  return g / s;
}

RngStream make_substream(std::uint64_t seed, int robot, int round, StreamPurpose purpose) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(robot)));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(round)));
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  return RngStream(h);
}

}  // namespace fleetsample
