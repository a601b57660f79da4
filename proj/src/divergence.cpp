#include "wsbm/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace wsbm {

namespace {

void check_columns(const std::vector<double>& mu_a, const std::vector<double>& mu_b,
                   const std::vector<double>& sigma_a, const std::vector<double>& sigma_b) {
  const std::size_t k = mu_a.size();
  if (k == 0 || mu_b.size() != k || sigma_a.size() != k || sigma_b.size() != k) {
    throw std::invalid_argument("divergence: column vectors must share a positive length");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(mu_a[i]) || !std::isfinite(mu_b[i])) {
      throw std::invalid_argument("divergence: means must be finite");
    }
    if (!(sigma_a[i] > 0.0) || !(sigma_b[i] > 0.0)) {
      throw std::invalid_argument("divergence: variances must be strictly positive");
    }
  }
}

void check_rates(const std::vector<double>& lambda_a, const std::vector<double>& lambda_b,
                 const std::vector<double>& p) {
  const std::size_t k = lambda_a.size();
  if (k == 0 || lambda_b.size() != k || p.size() != k) {
    throw std::invalid_argument("divergence: rate vectors must share a positive length");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(lambda_a[i] > 0.0) || !(lambda_b[i] > 0.0) || !(p[i] > 0.0)) {
      throw std::invalid_argument("divergence: rates and sizes must be strictly positive");
    }
  }
}

// Maximize a concave-looking objective on [0,1]: 101-point grid scan, then
// golden-section refinement of the best grid cell down to |t interval| 1e-10.
// Returns {value, t_star}.
std::pair<double, double> maximize_on_unit(const std::function<double(double)>& f) {
  constexpr int kGrid = 100;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double t = static_cast<double>(i) / kGrid;
    const double v = f(t);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = static_cast<double>(std::max(0, best - 1)) / kGrid;
  double hi = static_cast<double>(std::min(kGrid, best + 1)) / kGrid;

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  const double t_star = 0.5 * (lo + hi);
  const double val = std::max(best_val, f(t_star));
  return {val, val > best_val ? t_star : static_cast<double>(best) / kGrid};
}

bool columns_equal(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

GaussianExponentTerms gaussian_exponent_terms(double mu_a, double mu_b,
                                              double sigma_a, double sigma_b,
                                              double t) {
  GaussianExponentTerms out;
  // Variance of the t-interpolated measure: harmonic-style mix
  //   sigma_t^2 = sa*sb / (sb*t + sa*(1-t))
  // with the convention that t weights column a.
  const double denom = sigma_b * t + sigma_a * (1.0 - t);
  out.sigma_sq_t = sigma_a * sigma_b / denom;
  out.mu_t = (mu_a * sigma_b * t + mu_b * sigma_a * (1.0 - t)) / denom;
  // D(t) = t*mu_a^2/(2sa) + (1-t)*mu_b^2/(2sb) - mu_t^2/(2 sigma_t^2)
  //        - ( (1-t) log sa + t log sb - log denom ) / 2
  // Variance products appear only inside logs so large aggregated variances
  // cannot overflow.
  const double quad = t * mu_a * mu_a / (2.0 * sigma_a) +
                      (1.0 - t) * mu_b * mu_b / (2.0 * sigma_b) -
                      out.mu_t * out.mu_t / (2.0 * out.sigma_sq_t);
  const double log_part = 0.5 * ((1.0 - t) * std::log(sigma_a) + t * std::log(sigma_b) -
                                 std::log(denom));
  out.d_k = quad - log_part;
  return out;
}

double gaussian_exponent(const std::vector<double>& mu_a,
                         const std::vector<double>& mu_b,
                         const std::vector<double>& sigma_a,
                         const std::vector<double>& sigma_b, double t) {
  check_columns(mu_a, mu_b, sigma_a, sigma_b);
  if (!(t >= 0.0) || t > 1.0) throw std::invalid_argument("divergence: t must lie in [0,1]");
  double total = 0.0;
  for (std::size_t k = 0; k < mu_a.size(); ++k) {
    total += gaussian_exponent_terms(mu_a[k], mu_b[k], sigma_a[k], sigma_b[k], t).d_k;
  }
  return total;
}

double exponential_exponent(const std::vector<double>& lambda_a,
                            const std::vector<double>& lambda_b,
                            const std::vector<double>& p, double t) {
  check_rates(lambda_a, lambda_b, p);
  if (!(t >= 0.0) || t > 1.0) throw std::invalid_argument("divergence: t must lie in [0,1]");
  double total = 0.0;
  for (std::size_t k = 0; k < lambda_a.size(); ++k) {
    total += p[k] * (std::log((1.0 - t) * lambda_a[k] + t * lambda_b[k]) -
                     (1.0 - t) * std::log(lambda_a[k]) - t * std::log(lambda_b[k]));
  }
  return total;
}

namespace {

DivergenceResult finish_result(const std::function<double(double)>& objective,
                               const std::function<std::vector<double>(double)>& term_fn,
                               bool identical) {
  DivergenceResult out;
  if (identical) {
    out.value = 0.0;
    out.t_star = 0.5;
    out.terms = term_fn(0.5);
    return out;
  }
  auto [value, t_star] = maximize_on_unit(objective);
  out.value = std::max(0.0, value);
  out.t_star = t_star;
  out.terms = term_fn(t_star);
  return out;
}

}  // namespace

DivergenceResult gaussian_divergence(const std::vector<double>& mu_a,
                                     const std::vector<double>& mu_b,
                                     const std::vector<double>& sigma_a,
                                     const std::vector<double>& sigma_b) {
  check_columns(mu_a, mu_b, sigma_a, sigma_b);
  const bool identical = columns_equal(mu_a, mu_b) && columns_equal(sigma_a, sigma_b);
  auto objective = [&](double t) { return gaussian_exponent(mu_a, mu_b, sigma_a, sigma_b, t); };
  auto terms = [&](double t) {
    std::vector<double> out(mu_a.size());
    for (std::size_t k = 0; k < mu_a.size(); ++k) {
      out[k] = gaussian_exponent_terms(mu_a[k], mu_b[k], sigma_a[k], sigma_b[k], t).d_k;
    }
    return out;
  };
  return finish_result(objective, terms, identical);
}

DivergenceResult exponential_divergence(const std::vector<double>& lambda_a,
                                        const std::vector<double>& lambda_b,
                                        const std::vector<double>& p) {
  check_rates(lambda_a, lambda_b, p);
  const bool identical = columns_equal(lambda_a, lambda_b);
  auto objective = [&](double t) { return exponential_exponent(lambda_a, lambda_b, p, t); };
  auto terms = [&](double t) {
    std::vector<double> out(lambda_a.size());
    for (std::size_t k = 0; k < lambda_a.size(); ++k) {
      out[k] = p[k] * (std::log((1.0 - t) * lambda_a[k] + t * lambda_b[k]) -
                       (1.0 - t) * std::log(lambda_a[k]) - t * std::log(lambda_b[k]));
    }
    return out;
  };
  return finish_result(objective, terms, identical);
}

namespace {

DivergenceResult column_divergence(const CommunityModel& comm, const EdgeModel& edges,
                                   std::size_t i, std::size_t j) {
  DivergenceResult out;
  if (const auto* g = std::get_if<GaussianEdgeModel>(&edges)) {
    const auto a = aggregate_gaussian(*g, comm, i);
    const auto b = aggregate_gaussian(*g, comm, j);
    out = gaussian_divergence(a.mean, b.mean, a.variance, b.variance);
  } else if (const auto* e = std::get_if<ExponentialEdgeModel>(&edges)) {
    std::vector<double> p(comm.sizes.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<double>(comm.sizes[k]);
    out = exponential_divergence(e->rate.column(i), e->rate.column(j), p);
  } else {
    const auto& thin = std::get<ThinnedGaussianEdgeModel>(edges);
    const auto a = aggregate_thinned_gaussian(thin, comm, i);
    const auto b = aggregate_thinned_gaussian(thin, comm, j);
    out = gaussian_divergence(a.mean, b.mean, a.variance, b.variance);
  }
  if (comm.n > 1) out.normalized = out.value / std::log(static_cast<double>(comm.n));
  return out;
}

}  // namespace

MinPairwiseResult min_pairwise_divergence(const CommunityModel& comm,
                                          const EdgeModel& edges) {
  validate_edge_model(edges);
  const std::size_t k = edge_model_communities(edges);
  if (comm.num_communities() != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  if (k < 2) throw std::invalid_argument("min_pairwise_divergence: need K >= 2");

  MinPairwiseResult out;
  out.all_values.assign(k, std::vector<double>(k, 0.0));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      DivergenceResult d = column_divergence(comm, edges, i, j);
      out.all_values[i][j] = d.value;
      out.all_values[j][i] = d.value;
      if (d.value < best) {
        best = d.value;
        out.pair_i = i;
        out.pair_j = j;
        out.argmin = std::move(d);
      }
    }
  }
  out.value = best;
  return out;
}

Regime parse_regime(const std::string& name) {
  if (name == "auto") return Regime::automatic;
  if (name == "omega") return Regime::omega;
  if (name == "order-log" || name == "order_log") return Regime::order_log;
  throw std::invalid_argument("regime: expected auto|omega|order-log, got '" + name + "'");
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::automatic: return "auto";
    case Regime::omega: return "omega";
    case Regime::order_log: return "order-log";
  }
  return "unknown";
}

ThresholdReport recovery_predicate(const CommunityModel& comm, const EdgeModel& edges,
                                   Regime regime) {
  MinPairwiseResult min = min_pairwise_divergence(comm, edges);
  ThresholdReport out;
  out.min_divergence = min.value;
  out.log_n = std::log(static_cast<double>(comm.n));
  out.pair_i = min.pair_i;
  out.pair_j = min.pair_j;

  const double ratio = min.value / out.log_n;
  Regime used = regime;
  if (regime == Regime::automatic) {
    // One finite instance cannot distinguish the asymptotic regimes; treat a
    // divergence wildly out of scale with log n as the omega regime.
    used = (ratio < 0.1 || ratio > 10.0) ? Regime::omega : Regime::order_log;
  }
  out.regime_used = used;
  if (used == Regime::omega) {
    out.possible = min.value > 0.0;
    out.margin = min.value;
    out.conclusive = true;
  } else {
    out.possible = ratio > 1.0;
    out.margin = ratio - 1.0;
    // The threshold is asymptotic; a hair's margin at finite n decides
    // nothing.
    out.conclusive = std::abs(out.margin) >= 0.05;
  }
  return out;
}

ThresholdReport thinned_recovery_predicate(const CommunityModel& comm,
                                           const ThinnedGaussianEdgeModel& edges) {
  return recovery_predicate(comm, EdgeModel(edges), Regime::order_log);
}

}  // namespace wsbm
