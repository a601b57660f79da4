#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "wsbm/divergence.hpp"
#include "wsbm/oracle.hpp"
#include "wsbm/rng.hpp"

using wsbm::GammaColumn;
using wsbm::GaussianColumn;
using wsbm::min_integral;
using wsbm::QuadratureSpec;

TEST_CASE("identical hypotheses integrate to the smaller prior") {
  const GaussianColumn f{{1.0, -2.0}, {0.5, 3.0}};
  CHECK(min_integral(f, f, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(min_integral(f, f, 0.3, 0.7) == doctest::Approx(0.3).epsilon(1e-9));

  const GammaColumn g{{2.0}, {1.5}};
  CHECK(min_integral(g, g, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(min_integral(g, g, 0.25, 0.75) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("unit normals two apart overlap by exactly 2 Phi(-1)") {
  const GaussianColumn a{{0.0}, {1.0}};
  const GaussianColumn b{{2.0}, {1.0}};
  CHECK(min_integral(a, b, 1.0, 1.0) ==
        doctest::Approx(0.31731050786291415).epsilon(1e-9));
  CHECK(min_integral(a, b, 0.5, 0.5) ==
        doctest::Approx(0.15865525393145707).epsilon(1e-9));
}

TEST_CASE("exponential densities with rates 1 and 2 overlap by 3/4") {
  // min(e^-x, 2 e^-2x) crosses at log 2; the two pieces integrate to 3/4.
  const GammaColumn a{{1.0}, {1.0}};
  const GammaColumn b{{1.0}, {2.0}};
  CHECK(min_integral(a, b, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("the two-coordinate integral is stable under grid refinement") {
  // The aggregated binary model at minimum divergence 2: exact value Q(2).
  const double gap = std::sqrt(8.0 * 2.0 / 1000.0) * 500.0;
  const GaussianColumn h0{{gap, 0.0}, {500.0, 500.0}};
  const GaussianColumn h1{{0.0, gap}, {500.0, 500.0}};
  const double coarse = min_integral(h0, h1, 0.5, 0.5);
  QuadratureSpec fine;
  fine.points = 9001;
  const double refined = min_integral(h0, h1, 0.5, 0.5, fine);
  CHECK(coarse == doctest::Approx(0.02275013194817922).epsilon(1e-6));
  CHECK(std::abs(coarse - refined) / refined < 1e-8);
}

TEST_CASE("the integral obeys both prior and Chernoff ceilings") {
  wsbm::Rng rng(314);
  for (int rep = 0; rep < 40; ++rep) {
    const GaussianColumn a{{rng.normal(0.0, 2.0)}, {0.3 + 2.0 * rng.uniform()}};
    const GaussianColumn b{{rng.normal(0.0, 2.0)}, {0.3 + 2.0 * rng.uniform()}};
    const double prior_a = 0.2 + 0.6 * rng.uniform();
    const double prior_b = 1.0 - prior_a;
    const double value = min_integral(a, b, prior_a, prior_b);
    REQUIRE(value >= 0.0);
    REQUIRE(value <= std::min(prior_a, prior_b) + 1e-12);
    // min{pa fa, pb fb} <= pa^t pb^(1-t) fa^t fb^(1-t) pointwise, so the
    // integral is at most max(priors) e^{-divergence}.
    const double div =
        wsbm::gaussian_divergence(a.mean, b.mean, a.variance, b.variance).value;
    REQUIRE(value <= std::max(prior_a, prior_b) * std::exp(-div) + 1e-12);
  }
}

TEST_CASE("sandwich slacks for identical hypotheses are exactly log 2 wide") {
  const GaussianColumn f{{0.0}, {1.0}};
  const wsbm::SandwichSlacks s = wsbm::verify_sandwich(f, f, 0.5, 0.5, 0.0);
  CHECK(s.integral == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.upper_slack == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  CHECK(s.lower_slack == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("sandwich slacks stay within a constant band across mean gaps") {
  // slack = gap^2/8 + log Phi(-gap/2); decays like -log(gap), well inside
  // +/- 3 for the gaps probed here.
  for (double gap : {1.0, 2.0, 4.0, 8.0}) {
    const GaussianColumn a{{0.0}, {1.0}};
    const GaussianColumn b{{gap}, {1.0}};
    const double div = wsbm::gaussian_divergence({0.0}, {gap}, {1.0}, {1.0}).value;
    CHECK(div == doctest::Approx(gap * gap / 8.0).epsilon(1e-9));
    const wsbm::SandwichSlacks s = wsbm::verify_sandwich(a, b, 0.5, 0.5, div);
    CHECK(s.upper_slack > -3.0);
    CHECK(s.upper_slack < 3.0);
    // Exact closed form of the integral for this pair.
    const double exact = 0.5 * std::erfc(gap / (2.0 * std::sqrt(2.0)));
    CHECK(s.integral == doctest::Approx(exact).epsilon(1e-8));
  }

  for (double shape : {1.0, 5.0, 25.0}) {
    const GammaColumn a{{shape}, {1.0}};
    const GammaColumn b{{shape}, {2.0}};
    const double div = wsbm::exponential_divergence({1.0}, {2.0}, {shape}).value;
    const wsbm::SandwichSlacks s = wsbm::verify_sandwich(a, b, 0.5, 0.5, div);
    CHECK(s.upper_slack > -3.0);
    CHECK(s.upper_slack < 3.0);
  }
}

TEST_CASE("an underflowing integral raises instead of faking a slack") {
  const GaussianColumn a{{0.0}, {1.0}};
  const GaussianColumn b{{80.0}, {1.0}};
  CHECK_THROWS_AS(wsbm::verify_sandwich(a, b, 0.5, 0.5, 800.0), std::domain_error);
}

TEST_CASE("the pointwise ratio bound attains 1 at the t boundary") {
  const GaussianColumn a{{0.0}, {1.0}};
  const GaussianColumn b{{1.0}, {1.0}};
  // The log-ratio for this pair vanishes at w = 1/2; keep the grid off that
  // point so the interior-t maximum is strictly below 1.
  std::vector<std::vector<double>> w_points;
  for (double w = -4.1; w <= 5.0; w += 0.25) w_points.push_back({w});
  CHECK(wsbm::lemma2_max(a, b, {0.0, 0.5, 1.0}, w_points) == 1.0);
  CHECK(wsbm::lemma2_max(a, b, {0.5}, w_points) < 1.0);
}

TEST_CASE("the pointwise ratio bound holds on random grids for both families") {
  wsbm::Rng rng(2718);
  for (int rep = 0; rep < 50; ++rep) {
    const GaussianColumn a{{rng.normal(0.0, 3.0), rng.normal(0.0, 3.0)},
                           {0.2 + rng.uniform(), 0.2 + rng.uniform()}};
    const GaussianColumn b{{rng.normal(0.0, 3.0), rng.normal(0.0, 3.0)},
                           {0.2 + rng.uniform(), 0.2 + rng.uniform()}};
    std::vector<double> t_grid;
    for (int i = 0; i <= 10; ++i) t_grid.push_back(i / 10.0);
    std::vector<std::vector<double>> w_points;
    for (int i = 0; i < 30; ++i) {
      w_points.push_back({rng.normal(0.0, 4.0), rng.normal(0.0, 4.0)});
    }
    REQUIRE(wsbm::lemma2_max(a, b, t_grid, w_points) <= 1.0 + 1e-12);
  }

  for (int rep = 0; rep < 50; ++rep) {
    const GammaColumn a{{1.0 + 5.0 * rng.uniform()}, {0.5 + rng.uniform()}};
    const GammaColumn b{{1.0 + 5.0 * rng.uniform()}, {0.5 + rng.uniform()}};
    std::vector<std::vector<double>> w_points;
    for (int i = 0; i < 30; ++i) w_points.push_back({0.05 + 8.0 * rng.uniform()});
    REQUIRE(wsbm::lemma2_max(a, b, {0.0, 0.25, 0.5, 0.75, 1.0}, w_points) <=
            1.0 + 1e-12);
  }
}

TEST_CASE("quadrature reproduces the closed-form Chernoff exponent") {
  const GaussianColumn a{{0.0, 1.0}, {1.0, 2.0}};
  const GaussianColumn b{{2.0, -1.0}, {2.0, 1.0}};
  const double closed =
      wsbm::gaussian_divergence(a.mean, b.mean, a.variance, b.variance).value;
  const double quad = wsbm::chernoff_exponent_quadrature(a, b);
  CHECK(std::abs(quad - closed) / closed < 1e-6);

  const GammaColumn ga{{3.0, 2.0}, {1.0, 2.0}};
  const GammaColumn gb{{3.0, 2.0}, {2.0, 1.0}};
  const double gclosed =
      wsbm::exponential_divergence({1.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}).value;
  const double gquad = wsbm::chernoff_exponent_quadrature(ga, gb);
  CHECK(std::abs(gquad - gclosed) / gclosed < 1e-6);
}

TEST_CASE("the sparse-sum law keeps the exact atom and unit total mass") {
  const std::size_t n = 10000;
  const double theta = std::log(double(n)) / double(n);
  const wsbm::MixtureDensity mix = wsbm::mixture_density(n, theta, 1.0, 1.0);
  CHECK(mix.atom_weight == doctest::Approx(9.957648688920077e-05).epsilon(1e-12));
  // The atom tracks n^{-c} (here 1e-4) only to leading order; the gap at
  // this n is ~0.4%.
  CHECK(std::abs(mix.atom_weight - 1e-4) / 1e-4 < 0.005);
  CHECK(std::abs(mix.atom_weight - 1e-4) / 1e-4 > 0.001);

  // Truncation only removes mass; the lgamma-based terms can overshoot by a
  // few units in the last place each across ~40 components.
  const double total = mix.atom_weight + mix.continuous_weight();
  CHECK(total <= 1.0 + 5e-12);
  CHECK(total >= 1.0 - 1e-10);
  CHECK(mix.weights[0] == 0.0);

  // Quadrature over a wide window recovers the retained continuous mass.
  const double mean = double(n) * theta * 1.0;
  const double sd = std::sqrt(double(n) * theta * (1.0 + 1.0));
  const double lo = mean - 15.0 * sd, hi = mean + 15.0 * sd;
  const std::size_t pts = 20001;
  double sum = 0.0;
  const double h = (hi - lo) / double(pts - 1);
  for (std::size_t i = 0; i < pts; ++i) {
    const double w = (i == 0 || i == pts - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * mix.continuous_pdf(lo + double(i) * h);
  }
  sum *= h / 3.0;
  CHECK(sum == doctest::Approx(mix.continuous_weight()).epsilon(1e-8));
}

TEST_CASE("mixture weights match the direct binomial recurrence") {
  const std::size_t n = 50;
  const double theta = 0.1;
  const wsbm::MixtureDensity mix = wsbm::mixture_density(n, theta, 2.0, 1.0);
  double pmf = std::pow(1.0 - theta, double(n));
  CHECK(mix.atom_weight == doctest::Approx(pmf).epsilon(1e-12));
  for (std::size_t i = 1; i < mix.weights.size(); ++i) {
    pmf *= double(n - i + 1) / double(i) * theta / (1.0 - theta);
    if (mix.weights[i] == 0.0) {
      CHECK(pmf < 1e-13);  // truncated tail only
    } else {
      REQUIRE(mix.weights[i] == doctest::Approx(pmf).epsilon(1e-10));
    }
  }
}

TEST_CASE("the normal surrogate error is ranked by the within-block mean") {
  const std::size_t n = 10000;
  const double theta = std::log(double(n)) / double(n);
  const wsbm::ApproxDistance d0 = wsbm::approx_distance(n, theta, 0.0, 1.0);
  const wsbm::ApproxDistance d4 = wsbm::approx_distance(n, theta, 4.0, 1.0);
  const wsbm::ApproxDistance d6 = wsbm::approx_distance(n, theta, 6.0, 1.0);

  CHECK(d0.tv == doctest::Approx(0.0199524166).epsilon(1e-4));
  CHECK(d4.tv == doctest::Approx(0.0459022346).epsilon(1e-4));
  CHECK(d6.tv == doctest::Approx(0.0463588073).epsilon(1e-4));
  CHECK(d0.tv < d4.tv);
  CHECK(d4.tv < d6.tv);

  // The sup-norm does not follow the TV order: the zero-mean mixture stacks
  // all components at the origin.
  CHECK(d0.sup > d6.sup);

  // The surrogate has no atom, so every TV is at least atom/2.
  for (const auto* d : {&d0, &d4, &d6}) {
    CHECK(d->tv >= d->atom_weight / 2.0);
    CHECK(d->atom_weight == doctest::Approx(9.957648688920077e-05).epsilon(1e-10));
  }
  CHECK(d0.gauss_mean == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d4.gauss_mean == doctest::Approx(double(n) * theta * 4.0).epsilon(1e-12));
  CHECK(d4.gauss_variance ==
        doctest::Approx(double(n) * theta * (1.0 + 16.0 * (1.0 - theta)))
            .epsilon(1e-12));
}

TEST_CASE("the surrogate error decays at the expected square-root-log rate") {
  // With theta = log(n)/n the effective component count is log(n), so the
  // total variation shrinks like 1/sqrt(log n) -- slowly, but measurably
  // between n = 1e4 and n = 1e5.
  const double tv4 =
      wsbm::approx_distance(10000, std::log(1e4) / 1e4, 1.0, 1.0).tv;
  const double tv5 =
      wsbm::approx_distance(100000, std::log(1e5) / 1e5, 1.0, 1.0).tv;
  CHECK(tv4 > tv5);
  const double predicted_ratio = std::sqrt(std::log(1e5) / std::log(1e4));
  CHECK(tv4 / tv5 == doctest::Approx(predicted_ratio).epsilon(0.03));

  // A small dense instance sits outside the asymptotics entirely; its error
  // is frozen here to document that it does not vanish.
  const wsbm::ApproxDistance d = wsbm::approx_distance(10, 0.5, 1.0, 1.0);
  CHECK(d.tv == doctest::Approx(0.0500705).epsilon(1e-3));
  CHECK(d.atom_weight == doctest::Approx(std::pow(0.5, 10.0)).epsilon(1e-12));
}

TEST_CASE("oracle guardrails reject unusable inputs") {
  const GaussianColumn a{{0.0}, {1.0}};
  const GaussianColumn b{{1.0}, {1.0}};
  QuadratureSpec narrow;
  narrow.sd_span = 6.0;
  CHECK_THROWS_AS(min_integral(a, b, 0.5, 0.5, narrow), std::invalid_argument);
  CHECK_THROWS_AS(min_integral(a, b, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(min_integral(a, b, -0.1, 0.5), std::invalid_argument);

  const GammaColumn frac{{0.5}, {1.0}};
  CHECK_THROWS_AS(min_integral(frac, frac, 0.5, 0.5), std::invalid_argument);

  const GaussianColumn four{{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(min_integral(four, four, 0.5, 0.5), std::invalid_argument);

  const GaussianColumn mismatched{{0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(min_integral(mismatched, mismatched, 0.5, 0.5),
                  std::invalid_argument);

  CHECK_THROWS_AS(wsbm::lemma2_max(a, b, {0.5}, {{0.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(wsbm::lemma2_max(a, b, {1.5}, {{0.0}}), std::invalid_argument);
}

TEST_CASE("three coordinates fall back to the tensor rule sanely") {
  const GaussianColumn f{{0.0, 1.0, -1.0}, {1.0, 2.0, 0.5}};
  CHECK(min_integral(f, f, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-4));
  const GaussianColumn g{{1.0, 1.0, -1.0}, {1.0, 2.0, 0.5}};
  const double v = min_integral(f, g, 0.5, 0.5);
  // One coordinate separated by one sd: strictly between 0 and the prior.
  CHECK(v > 0.05);
  CHECK(v < 0.5);
}