#include "wsbm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wsbm {

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
  // Affine in index (odd multiplier), then two mixing rounds.
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  return splitmix64_mix(splitmix64_mix(z));
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return splitmix64_mix(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::standard_normal() {
  // Marsaglia polar method; second deviate cached.
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::normal(double mean, double sd) {
  return mean + sd * standard_normal();
}

double Rng::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
  // -log1p(-u) is safe at u == 0 and never hits log(0).
  return -std::log1p(-uniform()) / rate;
}

double Rng::gamma(double shape, double rate) {
  if (shape < 0.0 || rate <= 0.0) {
    throw std::invalid_argument("gamma: shape must be >= 0 and rate > 0");
  }
  if (shape == 0.0) return 0.0;
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a).
    const double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang (2000), "A Simple Method for Generating Gamma
  // Variables", shape >= 1.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

bool Rng::bernoulli(double prob) {
  return uniform() < prob;
}

std::uint64_t Rng::binomial(std::uint64_t count, double prob) {
  if (prob <= 0.0) return 0;
  if (prob >= 1.0) return count;
  const double u = uniform();
  // Walk the pmf from k = 0; stable for the small count*prob used here.
  double pmf = std::exp(static_cast<double>(count) * std::log1p(-prob));
  double cdf = pmf;
  const double odds = prob / (1.0 - prob);
  std::uint64_t k = 0;
  while (u > cdf && k < count) {
    pmf *= static_cast<double>(count - k) / static_cast<double>(k + 1) * odds;
    ++k;
    cdf += pmf;
  }
  return k;
}

std::size_t Rng::categorical(const std::vector<double>& probs) {
  const double u = uniform();
  double cdf = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cdf += probs[i];
    if (u < cdf) return i;
  }
  return probs.size() - 1;
}

}  // namespace wsbm
