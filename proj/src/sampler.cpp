#include "wsbm/sampler.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wsbm {

namespace {

double sample_weight(Rng& rng, const EdgeModel& edges, std::size_t a, std::size_t b,
                     std::size_t n) {
  if (const auto* g = std::get_if<GaussianEdgeModel>(&edges)) {
    return rng.normal(g->mean(a, b), std::sqrt(g->variance(a, b)));
  }
  if (const auto* e = std::get_if<ExponentialEdgeModel>(&edges)) {
    return rng.exponential(e->rate(a, b));
  }
  const auto& thin = std::get<ThinnedGaussianEdgeModel>(edges);
  if (!rng.bernoulli(thin.theta(a, b, n))) return 0.0;
  return rng.normal(thin.mean(a, b), std::sqrt(thin.variance(a, b)));
}

}  // namespace

LabeledGraphSample sample_graph(const CommunityModel& comm, const EdgeModel& edges,
                                std::uint64_t seed, const SampleOptions& options) {
  validate_edge_model(edges);
  const std::size_t k = edge_model_communities(edges);
  if (comm.num_communities() != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  if (comm.n > options.node_cap) {
    throw std::invalid_argument("sample_graph: n exceeds node cap of " +
                                std::to_string(options.node_cap));
  }
  if (comm.n < 2) throw std::invalid_argument("sample_graph: need at least 2 nodes");

  LabeledGraphSample out;
  out.seed = seed;
  out.kind = model_kind(edges);
  out.num_communities = k;
  out.labels.reserve(comm.n);
  for (std::size_t c = 0; c < k; ++c) {
    out.labels.insert(out.labels.end(), comm.sizes[c], c);
  }

  Rng rng(derive_stream_seed(seed, 0));
  if (options.permute_labels) {
    // Fisher-Yates on the label vector; community sizes are preserved.
    for (std::size_t i = comm.n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(out.labels[i], out.labels[std::min(j, i)]);
    }
  }

  out.weights = WeightMatrix(comm.n);
  for (std::size_t u = 0; u < comm.n; ++u) {
    for (std::size_t v = u + 1; v < comm.n; ++v) {
      out.weights.set(u, v, sample_weight(rng, edges, out.labels[u], out.labels[v], comm.n));
    }
  }
  return out;
}

EdgeSumVector edge_sums(const LabeledGraphSample& sample, std::size_t node) {
  const std::size_t n = sample.labels.size();
  if (node >= n) throw std::invalid_argument("edge_sums: node out of range");
  EdgeSumVector out;
  out.node = node;
  out.truth = sample.labels[node];
  out.w.assign(sample.num_communities, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == node) continue;
    out.w[sample.labels[v]] += sample.weights(node, v);
  }
  return out;
}

void draw_edge_sums(Rng& rng, const CommunityModel& comm, const EdgeModel& edges,
                    std::size_t truth, SizeConvention convention,
                    std::vector<double>& out) {
  const std::size_t k = comm.num_communities();
  if (truth >= k) throw std::invalid_argument("draw_edge_sums: truth out of range");
  out.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t p = comm.sizes[j];
    if (convention == SizeConvention::self_excluded && j == truth) p -= 1;
    if (p == 0) {
      out[j] = 0.0;
      continue;
    }
    const double pd = static_cast<double>(p);
    if (const auto* g = std::get_if<GaussianEdgeModel>(&edges)) {
      out[j] = rng.normal(pd * g->mean(j, truth), std::sqrt(pd * g->variance(j, truth)));
    } else if (const auto* e = std::get_if<ExponentialEdgeModel>(&edges)) {
      out[j] = rng.gamma(pd, e->rate(j, truth));
    } else {
      // Exact law of a Bernoulli-thinned normal sum: count of present edges
      // first, then the conditional sum is normal with count-scaled moments.
      const auto& thin = std::get<ThinnedGaussianEdgeModel>(edges);
      const double th = thin.theta(j, truth, comm.n);
      const auto count = rng.binomial(p, th);
      if (count == 0) {
        out[j] = 0.0;
      } else {
        const double cd = static_cast<double>(count);
        out[j] = rng.normal(cd * thin.mean(j, truth),
                            std::sqrt(cd * thin.variance(j, truth)));
      }
    }
  }
}

std::vector<EdgeSumVector> sample_edge_sums_direct(const CommunityModel& comm,
                                                   const EdgeModel& edges,
                                                   std::size_t truth, std::size_t trials,
                                                   std::uint64_t seed,
                                                   SizeConvention convention) {
  validate_edge_model(edges);
  if (comm.num_communities() != edge_model_communities(edges)) {
    throw std::invalid_argument("community count does not match edge model");
  }
  std::vector<EdgeSumVector> out(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_stream_seed(seed, i));
    out[i].node = i;
    out[i].truth = truth;
    draw_edge_sums(rng, comm, edges, truth, convention, out[i].w);
  }
  return out;
}

void dump_edge_list(const LabeledGraphSample& sample, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, sample.seed);
  out << "# seed=" << buf << " kind=" << model_kind_name(sample.kind) << "\n";
  out << "u,v,weight\n";
  const std::size_t n = sample.labels.size();
  const bool skip_zero = sample.kind == ModelKind::thinned_gaussian;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double w = sample.weights(u, v);
      if (skip_zero && w == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", w);
      out << u << "," << v << "," << buf << "\n";
    }
  }
}

}  // namespace wsbm
