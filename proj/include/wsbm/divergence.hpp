#ifndef WSBM_DIVERGENCE_HPP
#define WSBM_DIVERGENCE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "wsbm/model.hpp"

namespace wsbm {

// One coordinate of the Gaussian Chernoff exponent at parameter t: the
// interpolated mean/variance and the contribution D_k(t).
struct GaussianExponentTerms {
  double mu_t = 0.0;
  double sigma_sq_t = 0.0;
  double d_k = 0.0;
};

GaussianExponentTerms gaussian_exponent_terms(double mu_a, double mu_b,
                                              double sigma_a, double sigma_b,
                                              double t);

// Sum over coordinates of D_k(t); equals -log integral f_a^t f_b^(1-t) of the
// two product-normal densities.
double gaussian_exponent(const std::vector<double>& mu_a,
                         const std::vector<double>& mu_b,
                         const std::vector<double>& sigma_a,
                         const std::vector<double>& sigma_b, double t);

// Summand of the exponential family exponent at parameter t:
//   sum_k p_k * log( ((1-t) la_k + t lb_k) / (la_k^(1-t) lb_k^t) ).
double exponential_exponent(const std::vector<double>& lambda_a,
                            const std::vector<double>& lambda_b,
                            const std::vector<double>& p, double t);

struct DivergenceResult {
  double value = 0.0;   // max over t in [0,1]; always >= 0
  double t_star = 0.5;  // maximizer (0.5 by convention when value == 0)
  std::vector<double> terms;  // per-coordinate contribution at t_star
  double normalized = 0.0;    // value / log n when n was supplied, else 0
};

// Max over t in [0,1] of gaussian_exponent. Parameters are the aggregated
// column parameters (mu_k, Sigma_k) of the two hypotheses.
DivergenceResult gaussian_divergence(const std::vector<double>& mu_a,
                                     const std::vector<double>& mu_b,
                                     const std::vector<double>& sigma_a,
                                     const std::vector<double>& sigma_b);

// Max over t in [0,1] of exponential_exponent with community-size weights p.
DivergenceResult exponential_divergence(const std::vector<double>& lambda_a,
                                        const std::vector<double>& lambda_b,
                                        const std::vector<double>& p);

struct MinPairwiseResult {
  double value = 0.0;
  std::size_t pair_i = 0;  // lexicographically-first argmin pair, i < j
  std::size_t pair_j = 1;
  std::vector<std::vector<double>> all_values;  // upper triangle usage: [i][j]
  DivergenceResult argmin;
};

// Minimum over unordered community pairs of the column divergence. For the
// thinned family the aggregated parameters already account for sparsity.
MinPairwiseResult min_pairwise_divergence(const CommunityModel& comm,
                                          const EdgeModel& edges);

enum class Regime { automatic, omega, order_log };

Regime parse_regime(const std::string& name);
std::string regime_name(Regime regime);

struct ThresholdReport {
  bool possible = false;
  double margin = 0.0;  // ratio - 1 in order-log regime; min value in omega
  Regime regime_used = Regime::order_log;
  double min_divergence = 0.0;
  double log_n = 0.0;
  std::size_t pair_i = 0;
  std::size_t pair_j = 1;
  // False when the margin is too close to 0 for a finite-n verdict to be
  // trustworthy (the thresholds are asymptotic).
  bool conclusive = true;
};

// Exact-recovery predicate. In the order-log regime recovery is possible iff
// min divergence / log n > 1; in the omega regime iff min divergence > 0
// (no two columns identical). `automatic` picks the omega rule when the
// ratio to log n falls outside [0.1, 10].
ThresholdReport recovery_predicate(const CommunityModel& comm, const EdgeModel& edges,
                                   Regime regime);

// Specialized predicate for the thinned family: order-log rule applied to
// the thinned aggregated parameters.
ThresholdReport thinned_recovery_predicate(const CommunityModel& comm,
                                           const ThinnedGaussianEdgeModel& edges);

}  // namespace wsbm

#endif
