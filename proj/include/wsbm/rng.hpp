#ifndef WSBM_RNG_HPP
#define WSBM_RNG_HPP

#include <cstdint>
#include <vector>

namespace wsbm {

// Name recorded in output metadata so runs can be reproduced elsewhere.
inline constexpr const char* kRngName = "splitmix64";

// splitmix64 finalizer (Steele, Lea, Flanagan / Vigna). Bijective on 64 bits.
std::uint64_t splitmix64_mix(std::uint64_t z);

// Seed for stream `index` of a run with base seed `base`. Pure function of
// (base, index); distinct indices give distinct seeds.
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index);

// Small deterministic generator. splitmix64 core, so seeding is O(1) and
// per-trial streams are cheap to construct.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  double standard_normal();
  double normal(double mean, double sd);

  // Exponential with the given rate.
  double exponential(double rate);

  // Gamma with shape/rate parameterization (Marsaglia-Tsang squeeze for
  // shape >= 1, boosted for shape < 1). shape == 0 returns 0.
  double gamma(double shape, double rate);

  bool bernoulli(double prob);

  // Inversion sampler; O(count * prob) expected, intended for small means.
  std::uint64_t binomial(std::uint64_t count, double prob);

  // Index distributed according to `probs` (must sum to 1).
  std::size_t categorical(const std::vector<double>& probs);

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wsbm

#endif
