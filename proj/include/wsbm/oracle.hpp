#ifndef WSBM_ORACLE_HPP
#define WSBM_ORACLE_HPP

#include <cstddef>
#include <vector>

namespace wsbm {

// Product-form hypothesis parameters for the oracle integrals: coordinate k
// is N(mean[k], variance[k]) or Gamma(shape[k], rate[k]).
struct GaussianColumn {
  std::vector<double> mean;
  std::vector<double> variance;
};

struct GammaColumn {
  std::vector<double> shape;
  std::vector<double> rate;
};

// Composite-Simpson settings. Gaussian coordinates integrate over
// mean +/- sd_span combined standard deviations; Gamma coordinates over
// [0, mean + sd_span * sd], with the upper limit extended until a Chernoff
// tail bound certifies the omitted mass is below tail_bound (the fixed
// span alone can leave 1e-6-scale tails for small shapes).
struct QuadratureSpec {
  std::size_t points = 4001;  // per coordinate; forced odd internally
  double sd_span = 12.0;
  double tail_bound = 1e-13;
};

// Numerical integral of min{prior_a * f_a(w), prior_b * f_b(w)} over R^K
// (R_+^K for Gamma). K = 1 splits the domain at density crossings located
// by bisection; K = 2 nests an exact inner split inside an outer Simpson
// rule; K = 3 falls back to tensor-product Simpson.
double min_integral(const GaussianColumn& a, const GaussianColumn& b, double prior_a,
                    double prior_b, const QuadratureSpec& quad = {});
double min_integral(const GammaColumn& a, const GammaColumn& b, double prior_a,
                    double prior_b, const QuadratureSpec& quad = {});

// Signed slacks of the two-sided divergence sandwich around the min
// integral: upper_slack = divergence + log integral (bounded above by a
// constant) and lower_slack its negation (bounded below). Throws when the
// integral underflows below 1e-300 rather than returning a fake slack.
struct SandwichSlacks {
  double upper_slack = 0.0;
  double lower_slack = 0.0;
  double integral = 0.0;
};

SandwichSlacks verify_sandwich(const GaussianColumn& a, const GaussianColumn& b,
                               double prior_a, double prior_b, double divergence_value,
                               const QuadratureSpec& quad = {});
SandwichSlacks verify_sandwich(const GammaColumn& a, const GammaColumn& b,
                               double prior_a, double prior_b, double divergence_value,
                               const QuadratureSpec& quad = {});

// Max over the (t, w) grid of min{g1, g2} with g1 = (f_a/f_b)^(1-t) and
// g2 = (f_b/f_a)^t; the bound says this never exceeds 1.
double lemma2_max(const GaussianColumn& a, const GaussianColumn& b,
                  const std::vector<double>& t_grid,
                  const std::vector<std::vector<double>>& w_points);
double lemma2_max(const GammaColumn& a, const GammaColumn& b,
                  const std::vector<double>& t_grid,
                  const std::vector<std::vector<double>>& w_points);

// Independent check of the closed-form divergence: maximizes
// -log integral f_a^t f_b^(1-t) over a 1001-point t grid refined by
// golden-section, with every integral done by per-coordinate quadrature.
double chernoff_exponent_quadrature(const GaussianColumn& a, const GaussianColumn& b,
                                    const QuadratureSpec& quad = {});
double chernoff_exponent_quadrature(const GammaColumn& a, const GammaColumn& b,
                                    const QuadratureSpec& quad = {});

// The sparse-sum law: an atom at zero of mass (1 - theta)^n plus normal
// components at (i mu, i sigma_sq), weighted by the Binomial(n, theta) pmf
// truncated below 1e-14.
struct MixtureDensity {
  std::size_t n = 0;
  double theta = 0.0;
  double mu = 0.0;
  double sigma_sq = 1.0;
  double atom_weight = 0.0;
  // weights[i] is the retained pmf of component i (i >= 1 normals); index 0
  // is always 0 since the atom is kept separate.
  std::vector<double> weights;

  double continuous_pdf(double z) const;
  double continuous_weight() const;  // sum of retained component weights
};

MixtureDensity mixture_density(std::size_t n, double theta, double mu, double sigma_sq);

// Distance between the sparse-sum law and its moment-matched normal
// approximation N(n mu theta, n theta (sigma_sq + (1 - theta) mu^2)).
// The approximation puts zero mass on the atom, so the atom contributes
// atom_weight / 2 to the total variation exactly.
struct ApproxDistance {
  double tv = 0.0;
  double sup = 0.0;  // sup-norm of the continuous density gap
  double gauss_mean = 0.0;
  double gauss_variance = 0.0;
  double atom_weight = 0.0;
};

ApproxDistance approx_distance(std::size_t n, double theta, double mu, double sigma_sq,
                               const QuadratureSpec& quad = {});

}  // namespace wsbm

#endif
