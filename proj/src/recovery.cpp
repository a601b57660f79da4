#include "wsbm/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wsbm/densities.hpp"
#include "wsbm/divergence.hpp"
#include "wsbm/rng.hpp"

namespace wsbm {

namespace {

CommunityModel excluding_one(const CommunityModel& comm, std::size_t community) {
  CommunityModel out = comm;
  if (out.sizes[community] == 0) {
    throw std::invalid_argument("self-excluded convention needs community size >= 1");
  }
  out.sizes[community] -= 1;
  return out;
}

double log_likelihood(const std::vector<double>& w, const CommunityModel& comm,
                      const EdgeModel& edges, std::size_t hypothesis) {
  const std::size_t k = comm.num_communities();
  double total = 0.0;
  if (const auto* e = std::get_if<ExponentialEdgeModel>(&edges)) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = static_cast<double>(comm.sizes[j]);
      if (p == 0.0) continue;
      total += log_gamma_pdf(w[j], p, e->rate(j, hypothesis));
    }
    return total;
  }
  AggregatedGaussianParams agg;
  if (const auto* g = std::get_if<GaussianEdgeModel>(&edges)) {
    agg = aggregate_gaussian(*g, comm, hypothesis);
  } else {
    agg = aggregate_thinned_gaussian(std::get<ThinnedGaussianEdgeModel>(edges), comm,
                                     hypothesis);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (comm.sizes[j] == 0) continue;
    total += log_normal_pdf(w[j], agg.mean[j], agg.variance[j]);
  }
  return total;
}

}  // namespace

std::vector<HypothesisScore> hypothesis_scores(const std::vector<double>& w,
                                               const CommunityModel& comm,
                                               const EdgeModel& edges,
                                               SizeConvention convention) {
  const std::size_t k = comm.num_communities();
  if (w.size() != k) {
    throw std::invalid_argument("hypothesis_scores: w must have one entry per community");
  }
  if (edge_model_communities(edges) != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  std::vector<HypothesisScore> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i].community = i;
    const double ll =
        convention == SizeConvention::self_excluded
            ? log_likelihood(w, excluding_one(comm, i), edges, i)
            : log_likelihood(w, comm, edges, i);
    out[i].log_score = std::log(comm.rho[i]) + ll;
  }
  return out;
}

std::size_t map_classify(const std::vector<double>& w, const CommunityModel& comm,
                         const EdgeModel& edges, SizeConvention convention) {
  const auto scores = hypothesis_scores(w, comm, edges, convention);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].log_score > scores[best].log_score) best = i;
  }
  return best;
}

TrialReport genie_error_rate(const CommunityModel& comm, const EdgeModel& edges,
                             std::size_t trials, std::uint64_t seed,
                             SizeConvention convention) {
  validate_edge_model(edges);
  const std::size_t k = comm.num_communities();
  if (edge_model_communities(edges) != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  if (trials == 0) throw std::invalid_argument("genie_error_rate: trials must be >= 1");

  TrialReport out;
  out.trials = trials;
  out.seed = seed;
  out.decisions.assign(k, std::vector<std::size_t>(k, 0));

  std::vector<double> w;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_stream_seed(seed, i));
    const std::size_t truth = rng.categorical(comm.rho);
    draw_edge_sums(rng, comm, edges, truth, convention, w);
    const std::size_t decided = map_classify(w, comm, edges, convention);
    out.decisions[truth][decided] += 1;
    if (decided != truth) out.errors += 1;
  }
  out.error_rate = static_cast<double>(out.errors) / static_cast<double>(trials);
  out.zero_errors = out.errors == 0;
  out.empirical_exponent =
      -std::log(static_cast<double>(std::max<std::size_t>(out.errors, 1)) /
                static_cast<double>(trials));
  out.predicted_exponent = k >= 2 ? min_pairwise_divergence(comm, edges).value : 0.0;
  return out;
}

namespace {

double pair_log_pdf(const EdgeModel& edges, std::size_t a, std::size_t b, double w,
                    std::size_t n) {
  if (const auto* g = std::get_if<GaussianEdgeModel>(&edges)) {
    return log_normal_pdf(w, g->mean(a, b), g->variance(a, b));
  }
  if (const auto* e = std::get_if<ExponentialEdgeModel>(&edges)) {
    const double rate = e->rate(a, b);
    if (w < 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(rate) - rate * w;
  }
  // Thinned weights live on a mixed measure: an atom at zero of mass
  // 1 - theta plus a normal density on the rest.
  const auto& thin = std::get<ThinnedGaussianEdgeModel>(edges);
  const double th = thin.theta(a, b, n);
  if (w == 0.0) return std::log1p(-th);
  return std::log(th) + log_normal_pdf(w, thin.mean(a, b), thin.variance(a, b));
}

std::uint64_t count_exact_size_labelings(const std::vector<std::size_t>& sizes,
                                         std::size_t n) {
  // Multinomial coefficient n! / prod(p_i!), built incrementally with an
  // overflow guard far above the enumeration cap.
  long double total = 1.0L;
  std::size_t placed = 0;
  for (std::size_t s : sizes) {
    for (std::size_t i = 1; i <= s; ++i) {
      total = total * static_cast<long double>(placed + i) / static_cast<long double>(i);
      if (total > 1e18L) return UINT64_MAX;
    }
    placed += s;
  }
  (void)n;
  return static_cast<std::uint64_t>(total + 0.5L);
}

}  // namespace

std::vector<std::size_t> exhaustive_map(const LabeledGraphSample& sample,
                                        const CommunityModel& comm,
                                        const EdgeModel& edges, bool exact_sizes) {
  validate_edge_model(edges);
  const std::size_t n = sample.labels.size();
  const std::size_t k = comm.num_communities();
  if (n != comm.n) throw std::invalid_argument("exhaustive_map: sample size mismatch");
  if (edge_model_communities(edges) != k) {
    throw std::invalid_argument("community count does not match edge model");
  }

  constexpr std::uint64_t kCap = 500000;
  const std::uint64_t count =
      exact_sizes ? count_exact_size_labelings(comm.sizes, n)
                  : (n * std::log2(static_cast<double>(k)) > 60.0
                         ? UINT64_MAX
                         : static_cast<std::uint64_t>(std::pow(double(k), double(n))));
  if (count > kCap) {
    throw std::invalid_argument("exhaustive_map: too many labelings to enumerate");
  }

  // Pairwise log-density table so the DFS scores each assignment in O(n).
  std::vector<std::vector<std::vector<double>>> pair_ll(
      n, std::vector<std::vector<double>>(n));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      std::vector<double> table(k * k);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          table[a * k + b] = pair_log_pdf(edges, a, b, sample.weights(u, v), comm.n);
        }
      }
      pair_ll[u][v] = std::move(table);
    }
  }
  std::vector<double> log_rho(k);
  for (std::size_t i = 0; i < k; ++i) log_rho[i] = std::log(comm.rho[i]);

  std::vector<std::size_t> current(n, 0);
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> remaining = comm.sizes;

  // Depth-first in lexicographic label order with strict improvement, so the
  // first maximum found is the lexicographically smallest.
  std::vector<double> prefix(n + 1, 0.0);
  std::function<void(std::size_t)> dfs = [&](std::size_t node) {
    if (node == n) {
      if (prefix[n] > best_score) {
        best_score = prefix[n];
        best = current;
      }
      return;
    }
    for (std::size_t label = 0; label < k; ++label) {
      if (exact_sizes) {
        if (remaining[label] == 0) continue;
        remaining[label] -= 1;
      }
      current[node] = label;
      double score = prefix[node] + log_rho[label];
      for (std::size_t u = 0; u < node; ++u) {
        score += pair_ll[u][node][current[u] * k + label];
      }
      prefix[node + 1] = score;
      dfs(node + 1);
      if (exact_sizes) remaining[label] += 1;
    }
  };
  dfs(0);
  return best;
}

std::vector<PhasePoint> phase_sweep(const CommunityModel& comm,
                                    const std::function<EdgeModel(double)>& family,
                                    const std::vector<double>& c_values,
                                    std::size_t trials, std::uint64_t seed) {
  if (c_values.empty()) throw std::invalid_argument("phase_sweep: empty c grid");
  std::vector<PhasePoint> out;
  out.reserve(c_values.size());
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    const EdgeModel edges = family(c_values[i]);
    TrialReport report =
        genie_error_rate(comm, edges, trials, derive_stream_seed(seed, i));
    PhasePoint point;
    point.c = c_values[i];
    point.error_rate = report.error_rate;
    point.se = std::sqrt(report.error_rate * (1.0 - report.error_rate) /
                         static_cast<double>(trials));
    point.zero_errors = report.zero_errors;
    point.predicted_margin =
        recovery_predicate(comm, edges, Regime::order_log).margin;
    out.push_back(point);
  }
  return out;
}

std::function<EdgeModel(double)> binary_symmetric_gap_family(std::size_t n,
                                                             double sigma_sq) {
  if (!(sigma_sq > 0.0)) {
    throw std::invalid_argument("binary_symmetric_gap_family: sigma_sq must be positive");
  }
  const double log_n = std::log(static_cast<double>(n));
  return [n, sigma_sq, log_n](double c) -> EdgeModel {
    if (c < 0.0) throw std::invalid_argument("binary_symmetric_gap_family: c must be >= 0");
    const double gap = std::sqrt(8.0 * c * sigma_sq * log_n / static_cast<double>(n));
    GaussianEdgeModel g;
    g.mean = Matrix::from_rows({{gap, 0.0}, {0.0, gap}});
    g.variance = Matrix::from_rows({{sigma_sq, sigma_sq}, {sigma_sq, sigma_sq}});
    return g;
  };
}

}  // namespace wsbm
