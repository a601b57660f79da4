#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "wsbm/divergence.hpp"
#include "wsbm/model.hpp"
#include "wsbm/rng.hpp"

using wsbm::DivergenceResult;
using wsbm::exponential_divergence;
using wsbm::exponential_exponent;
using wsbm::gaussian_divergence;
using wsbm::gaussian_exponent;
using wsbm::Matrix;

TEST_CASE("identical columns give zero divergence at the conventional t") {
  const DivergenceResult d =
      gaussian_divergence({1.0, -2.0}, {1.0, -2.0}, {0.5, 3.0}, {0.5, 3.0});
  CHECK(d.value == 0.0);
  CHECK(d.t_star == 0.5);
  REQUIRE(d.terms.size() == 2);
  CHECK(d.terms[0] == doctest::Approx(0.0).epsilon(1e-15));

  const DivergenceResult e = exponential_divergence({2.0, 3.0}, {2.0, 3.0}, {5.0, 7.0});
  CHECK(e.value == 0.0);
  CHECK(e.t_star == 0.5);
}

TEST_CASE("variance-only Gaussian pair has the closed-form maximizer 1/ln2 - 1") {
  // D(t) = 0.5 (log(1 + t) - t log 2) for variances (1, 2) and equal means.
  const DivergenceResult d = gaussian_divergence({0.0}, {0.0}, {1.0}, {2.0});
  CHECK(d.t_star == doctest::Approx(1.0 / std::log(2.0) - 1.0).epsilon(1e-7));
  CHECK(d.value == doctest::Approx(0.029830050570804825).epsilon(1e-12));

  // Swapping the columns mirrors the maximizer and keeps the value.
  const DivergenceResult swapped = gaussian_divergence({0.0}, {0.0}, {2.0}, {1.0});
  CHECK(swapped.value == doctest::Approx(d.value).epsilon(1e-12));
  CHECK(swapped.t_star == doctest::Approx(1.0 - d.t_star).epsilon(1e-7));
}

TEST_CASE("exponential rate pair (1,2) matches its closed form") {
  // D(t) = log(1 + t) - t log 2, maximized at t = 1/ln2 - 1.
  const DivergenceResult d = exponential_divergence({1.0}, {2.0}, {1.0});
  CHECK(d.t_star == doctest::Approx(0.4426950408889634).epsilon(1e-7));
  CHECK(d.value == doctest::Approx(0.059660101141609634).epsilon(1e-12));

  // Weight p scales the value linearly and leaves the maximizer alone.
  const DivergenceResult scaled = exponential_divergence({1.0}, {2.0}, {250.0});
  CHECK(scaled.value == doctest::Approx(250.0 * d.value).epsilon(1e-10));
  CHECK(scaled.t_star == doctest::Approx(d.t_star).epsilon(1e-6));
}

TEST_CASE("equal-variance Gaussian divergence is the quadratic gap formula") {
  // Equal variances: D(t) = sum_k t(1-t) (mu_a - mu_b)_k^2 / (2 Sigma_k),
  // maximized at t = 1/2 with value sum_k gap^2 / (8 Sigma).
  const DivergenceResult d =
      gaussian_divergence({50.0, 0.0}, {0.0, 50.0}, {50.0, 50.0}, {50.0, 50.0});
  CHECK(d.value == doctest::Approx(12.5).epsilon(1e-10));
  CHECK(d.t_star == doctest::Approx(0.5).epsilon(1e-7));
  REQUIRE(d.terms.size() == 2);
  CHECK(d.terms[0] == doctest::Approx(6.25).epsilon(1e-8));
  CHECK(d.terms[0] + d.terms[1] == doctest::Approx(d.value).epsilon(1e-12));
}

TEST_CASE("the exponent vanishes at both endpoints of t") {
  const std::vector<double> mu_a{1.0, 2.0}, mu_b{-1.0, 0.5};
  const std::vector<double> sig_a{1.0, 2.0}, sig_b{3.0, 0.7};
  CHECK(std::abs(gaussian_exponent(mu_a, mu_b, sig_a, sig_b, 0.0)) < 1e-10);
  CHECK(std::abs(gaussian_exponent(mu_a, mu_b, sig_a, sig_b, 1.0)) < 1e-10);
  CHECK(std::abs(exponential_exponent({1.0, 3.0}, {2.0, 0.5}, {4.0, 9.0}, 0.0)) < 1e-10);
  CHECK(std::abs(exponential_exponent({1.0, 3.0}, {2.0, 0.5}, {4.0, 9.0}, 1.0)) < 1e-10);
}

TEST_CASE("reported terms sum to the value at the maximizer") {
  const DivergenceResult d =
      gaussian_divergence({1.0, -0.5, 2.0}, {0.0, 0.5, 1.0}, {1.0, 2.0, 0.5},
                          {2.0, 1.0, 0.5});
  double total = 0.0;
  for (double term : d.terms) total += term;
  CHECK(total == doctest::Approx(d.value).epsilon(1e-9));
  CHECK(total == doctest::Approx(
                     gaussian_exponent({1.0, -0.5, 2.0}, {0.0, 0.5, 1.0},
                                       {1.0, 2.0, 0.5}, {2.0, 1.0, 0.5}, d.t_star))
                     .epsilon(1e-12));
}

TEST_CASE("divergence is nonnegative and zero only for identical columns") {
  wsbm::Rng rng(2024);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t k = 1 + rep % 3;
    std::vector<double> mu_a(k), mu_b(k), sig_a(k), sig_b(k);
    for (std::size_t i = 0; i < k; ++i) {
      mu_a[i] = rng.normal(0.0, 3.0);
      mu_b[i] = rng.normal(0.0, 3.0);
      sig_a[i] = 0.1 + 4.0 * rng.uniform();
      sig_b[i] = 0.1 + 4.0 * rng.uniform();
    }
    const DivergenceResult d = gaussian_divergence(mu_a, mu_b, sig_a, sig_b);
    REQUIRE(d.value >= 0.0);
    REQUIRE(d.t_star >= 0.0);
    REQUIRE(d.t_star <= 1.0);
    // Distinct parameters must produce strictly positive divergence.
    REQUIRE(d.value > 1e-12);

    std::vector<double> la(k), lb(k), p(k);
    for (std::size_t i = 0; i < k; ++i) {
      la[i] = 0.2 + 3.0 * rng.uniform();
      lb[i] = 0.2 + 3.0 * rng.uniform();
      p[i] = 1.0 + std::floor(20.0 * rng.uniform());
    }
    const DivergenceResult e = exponential_divergence(la, lb, p);
    REQUIRE(e.value >= 0.0);
    REQUIRE(e.value > 1e-12);
  }
}

TEST_CASE("Gaussian divergence is invariant under a common mean shift") {
  wsbm::Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const double shift = rng.normal(0.0, 5.0);
    std::vector<double> mu_a{rng.normal(0.0, 2.0), rng.normal(0.0, 2.0)};
    std::vector<double> mu_b{rng.normal(0.0, 2.0), rng.normal(0.0, 2.0)};
    const std::vector<double> sig_a{0.5 + rng.uniform(), 0.5 + rng.uniform()};
    const std::vector<double> sig_b{0.5 + rng.uniform(), 0.5 + rng.uniform()};
    const double base = gaussian_divergence(mu_a, mu_b, sig_a, sig_b).value;
    for (auto& m : mu_a) m += shift;
    for (auto& m : mu_b) m += shift;
    const double moved = gaussian_divergence(mu_a, mu_b, sig_a, sig_b).value;
    REQUIRE(moved == doctest::Approx(base).epsilon(1e-8));
  }
}

TEST_CASE("exponential divergence is invariant under a common rate rescaling") {
  wsbm::Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const double scale = 0.1 + 10.0 * rng.uniform();
    std::vector<double> la{0.3 + rng.uniform(), 0.3 + rng.uniform()};
    std::vector<double> lb{0.3 + rng.uniform(), 0.3 + rng.uniform()};
    const std::vector<double> p{3.0, 11.0};
    const double base = exponential_divergence(la, lb, p).value;
    for (auto& l : la) l *= scale;
    for (auto& l : lb) l *= scale;
    const double moved = exponential_divergence(la, lb, p).value;
    REQUIRE(moved == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("coordinates contribute additively") {
  // The K = 3 objective is a sum over coordinates, so the joint divergence
  // of independent coordinates evaluated at a common t equals the sum of the
  // per-coordinate exponents there.
  const std::vector<double> mu_a{1.0, -2.0, 0.5}, mu_b{0.0, 1.0, 0.5};
  const std::vector<double> sig_a{1.0, 0.5, 2.0}, sig_b{2.0, 0.5, 1.0};
  for (double t : {0.1, 0.37, 0.5, 0.82}) {
    double per_coord = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      per_coord += gaussian_exponent({mu_a[k]}, {mu_b[k]}, {sig_a[k]}, {sig_b[k]}, t);
    }
    CHECK(gaussian_exponent(mu_a, mu_b, sig_a, sig_b, t) ==
          doctest::Approx(per_coord).epsilon(1e-13));
  }
}

TEST_CASE("the optimizer never loses to a fine grid scan") {
  wsbm::Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const std::vector<double> mu_a{rng.normal(0.0, 4.0)}, mu_b{rng.normal(0.0, 4.0)};
    const std::vector<double> sig_a{0.2 + 3.0 * rng.uniform()};
    const std::vector<double> sig_b{0.2 + 3.0 * rng.uniform()};
    const DivergenceResult d = gaussian_divergence(mu_a, mu_b, sig_a, sig_b);
    for (int i = 0; i <= 500; ++i) {
      const double t = double(i) / 500.0;
      REQUIRE(d.value >= gaussian_exponent(mu_a, mu_b, sig_a, sig_b, t) - 1e-9);
    }
  }
}

TEST_CASE("t outside the unit interval is rejected") {
  CHECK_THROWS_AS(gaussian_exponent({0.0}, {1.0}, {1.0}, {1.0}, -0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(gaussian_exponent({0.0}, {1.0}, {1.0}, {1.0}, 1.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(exponential_exponent({1.0}, {2.0}, {1.0}, 2.0),
                  std::invalid_argument);
}

namespace {

wsbm::EdgeModel binary_gaussian(double in_mean, double out_mean) {
  return wsbm::GaussianEdgeModel{
      Matrix::from_rows({{in_mean, out_mean}, {out_mean, in_mean}}),
      Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}})};
}

}  // namespace

TEST_CASE("pairwise minimum finds the cloned column pair") {
  // Columns 1 and 2 of the mean table are identical, so their divergence is
  // exactly zero and must be selected over the distinct pair (0, *).
  const wsbm::CommunityModel comm = wsbm::build_community_model(10, {0.2, 0.4, 0.4});
  const wsbm::EdgeModel edges = wsbm::GaussianEdgeModel{
      Matrix::from_rows({{5.0, 1.0, 1.0}, {1.0, 2.0, 2.0}, {1.0, 2.0, 2.0}}),
      Matrix::from_rows({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}})};
  const wsbm::MinPairwiseResult min = wsbm::min_pairwise_divergence(comm, edges);
  CHECK(min.value == 0.0);
  CHECK(min.pair_i == 1);
  CHECK(min.pair_j == 2);
  CHECK(min.all_values[0][1] > 1.0);
  CHECK(min.all_values[0][1] == min.all_values[1][0]);

  // All columns identical: ties resolve to the lexicographically first pair.
  const wsbm::MinPairwiseResult flat = wsbm::min_pairwise_divergence(
      wsbm::build_community_model(9, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
      wsbm::GaussianEdgeModel{
          Matrix::from_rows({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}),
          Matrix::from_rows({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}})});
  CHECK(flat.value == 0.0);
  CHECK(flat.pair_i == 0);
  CHECK(flat.pair_j == 1);
}

TEST_CASE("binary symmetric model reproduces the hand-computed margin") {
  // p = 500, in-mean 0.3: divergence = 2 * (500*0.3)^2 / (8*500) = 11.25.
  const wsbm::CommunityModel comm = wsbm::build_community_model(1000, {0.5, 0.5});
  const wsbm::MinPairwiseResult min =
      wsbm::min_pairwise_divergence(comm, binary_gaussian(0.3, 0.0));
  CHECK(min.value == doctest::Approx(11.25).epsilon(1e-9));
  CHECK(min.argmin.normalized ==
        doctest::Approx(11.25 / std::log(1000.0)).epsilon(1e-9));

  const wsbm::ThresholdReport above =
      wsbm::recovery_predicate(comm, binary_gaussian(0.3, 0.0), wsbm::Regime::order_log);
  CHECK(above.possible);
  CHECK(above.margin == doctest::Approx(11.25 / std::log(1000.0) - 1.0).epsilon(1e-9));
  CHECK(above.conclusive);

  // Shrinking the gap to 0.2 lands below threshold: 5.0 / log(1000) - 1 < 0.
  const wsbm::ThresholdReport below =
      wsbm::recovery_predicate(comm, binary_gaussian(0.2, 0.0), wsbm::Regime::order_log);
  CHECK_FALSE(below.possible);
  CHECK(below.margin == doctest::Approx(5.0 / std::log(1000.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("the automatic regime defers to omega only far from the threshold") {
  const wsbm::CommunityModel comm = wsbm::build_community_model(1000, {0.5, 0.5});
  // Margin 0.63: stays on the order-log rule.
  const wsbm::ThresholdReport near =
      wsbm::recovery_predicate(comm, binary_gaussian(0.3, 0.0), wsbm::Regime::automatic);
  CHECK(near.regime_used == wsbm::Regime::order_log);
  CHECK(near.possible);

  // Ratio 11.25 * 16 / log(1000) > 10: switches to the omega rule, where any
  // positive separation suffices.
  const wsbm::ThresholdReport far =
      wsbm::recovery_predicate(comm, binary_gaussian(1.2, 0.0), wsbm::Regime::automatic);
  CHECK(far.regime_used == wsbm::Regime::omega);
  CHECK(far.possible);
  CHECK(far.margin == doctest::Approx(180.0).epsilon(1e-9));

  // Tiny divergence: ratio below 0.1 also switches to omega.
  const wsbm::ThresholdReport tiny =
      wsbm::recovery_predicate(comm, binary_gaussian(0.02, 0.0), wsbm::Regime::automatic);
  CHECK(tiny.regime_used == wsbm::Regime::omega);
  CHECK(tiny.possible);

  // A hair above the order-log threshold is flagged inconclusive.
  const double log_n = std::log(1000.0);
  const double gap = std::sqrt(8.0 * 1.02 * log_n / 1000.0);
  const wsbm::ThresholdReport close =
      wsbm::recovery_predicate(comm, binary_gaussian(gap, 0.0), wsbm::Regime::order_log);
  CHECK(close.possible);
  CHECK_FALSE(close.conclusive);
}

TEST_CASE("regime names parse and print consistently") {
  CHECK(wsbm::parse_regime("auto") == wsbm::Regime::automatic);
  CHECK(wsbm::parse_regime("omega") == wsbm::Regime::omega);
  CHECK(wsbm::parse_regime("order-log") == wsbm::Regime::order_log);
  CHECK(wsbm::parse_regime("order_log") == wsbm::Regime::order_log);
  CHECK_THROWS_AS(wsbm::parse_regime("bogus"), std::invalid_argument);
  CHECK(wsbm::regime_name(wsbm::Regime::omega) == "omega");
  CHECK(wsbm::parse_regime(wsbm::regime_name(wsbm::Regime::order_log)) ==
        wsbm::Regime::order_log);
}

TEST_CASE("pairwise divergence rejects mismatched or single-community input") {
  const wsbm::CommunityModel comm = wsbm::build_community_model(10, {0.5, 0.5});
  const wsbm::EdgeModel three = wsbm::GaussianEdgeModel{
      Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}),
      Matrix::from_rows({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}})};
  CHECK_THROWS_AS(wsbm::min_pairwise_divergence(comm, three), std::invalid_argument);

  const wsbm::CommunityModel one = wsbm::build_community_model(10, {1.0});
  const wsbm::EdgeModel single = wsbm::GaussianEdgeModel{
      Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}})};
  CHECK_THROWS_AS(wsbm::min_pairwise_divergence(one, single), std::invalid_argument);
}

TEST_CASE("vector length mismatches are rejected") {
  CHECK_THROWS_AS(gaussian_divergence({0.0, 1.0}, {0.0}, {1.0, 1.0}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(exponential_divergence({1.0}, {2.0, 3.0}, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gaussian_divergence({0.0}, {1.0}, {-1.0}, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(exponential_divergence({-1.0}, {2.0}, {1.0}),
                  std::invalid_argument);
}