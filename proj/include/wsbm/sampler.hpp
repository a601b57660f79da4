#ifndef WSBM_SAMPLER_HPP
#define WSBM_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wsbm/model.hpp"
#include "wsbm/rng.hpp"

namespace wsbm {

// Symmetric weight matrix with zero diagonal, stored as the packed upper
// triangle (u < v).
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }

  double operator()(std::size_t u, std::size_t v) const {
    if (u == v) return 0.0;
    return data_[index(u, v)];
  }
  void set(std::size_t u, std::size_t v, double w) { data_[index(u, v)] = w; }

 private:
  std::size_t index(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    return u * n_ - u * (u + 1) / 2 + (v - u - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct LabeledGraphSample {
  std::vector<std::size_t> labels;  // community index per node, 0-based
  WeightMatrix weights;
  std::uint64_t seed = 0;
  ModelKind kind = ModelKind::gaussian;
  std::size_t num_communities = 0;
};

struct SampleOptions {
  bool permute_labels = false;
  std::size_t node_cap = 20000;
};

// Draws one weighted graph: labels in block order (first p_1 nodes are
// community 0, ...; shuffled when permute_labels), then each unordered pair
// sampled once from Q indexed by the endpoint labels. Thinned models draw a
// Bernoulli(theta_ij) presence indicator times the Gaussian weight.
LabeledGraphSample sample_graph(const CommunityModel& comm, const EdgeModel& edges,
                                std::uint64_t seed, const SampleOptions& options = {});

struct EdgeSumVector {
  std::vector<double> w;  // w[j] = sum of incident weights into community j
  std::size_t node = 0;
  std::size_t truth = 0;
};

EdgeSumVector edge_sums(const LabeledGraphSample& sample, std::size_t node);

// Whether the sum statistic counts the full stated community size p_j or
// excludes the node itself from its own community (effective size p_j - 1).
// The stated per-coordinate laws use the full size; a node in a sampled
// graph sees the self-excluded one.
enum class SizeConvention { full, self_excluded };

// One draw of the edge-sum vector for a node of community `truth`, taken
// straight from the per-coordinate sum laws (normal for Gaussian families,
// Gamma(p, lambda) for exponential) without building a graph. The thinned
// family draws the Bernoulli presence count exactly, then the conditional
// normal sum. Appends K values to `out`.
void draw_edge_sums(Rng& rng, const CommunityModel& comm, const EdgeModel& edges,
                    std::size_t truth, SizeConvention convention,
                    std::vector<double>& out);

// A stream of `trials` independent draws; trial i uses a seed derived purely
// from (seed, i), so the stream is reproducible and order-stable.
std::vector<EdgeSumVector> sample_edge_sums_direct(
    const CommunityModel& comm, const EdgeModel& edges, std::size_t truth,
    std::size_t trials, std::uint64_t seed,
    SizeConvention convention = SizeConvention::full);

// Edge-list CSV: `# seed=<s> kind=<k>` comment, `u,v,weight` header, one row
// per pair (thinned models omit absent edges, stored as exact zeros).
void dump_edge_list(const LabeledGraphSample& sample, std::ostream& out);

}  // namespace wsbm

#endif
