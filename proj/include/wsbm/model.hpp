#ifndef WSBM_MODEL_HPP
#define WSBM_MODEL_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "wsbm/matrix.hpp"

namespace wsbm {

// Community structure for a given graph size: proportions rho and the
// integer sizes p_i = floor(rho_i * n), with the rounding remainder assigned
// to the last community so the sizes always sum to n.
struct CommunityModel {
  std::size_t n = 0;
  std::vector<double> rho;
  std::vector<std::size_t> sizes;

  std::size_t num_communities() const { return rho.size(); }
};

CommunityModel build_community_model(std::size_t n, const std::vector<double>& rho);

// Per-pair edge-weight families. Matrices are K x K, symmetric, indexed by
// community (0-based). All entries of a Gaussian variance matrix and an
// exponential rate matrix must be strictly positive; means may be anything.
struct GaussianEdgeModel {
  Matrix mean;      // mu_bar
  Matrix variance;  // sigma_bar^2
};

struct ExponentialEdgeModel {
  Matrix rate;  // lambda
};

// Sparsified Gaussian: a weight is nonzero with probability
// theta_ij(n) = c_ij * log(n) / n and then drawn from N(mean, variance).
struct ThinnedGaussianEdgeModel {
  Matrix mean;
  Matrix variance;
  Matrix theta_c;  // c_ij

  // Presence probability for community pair (i, j) at graph size n.
  double theta(std::size_t i, std::size_t j, std::size_t n) const;
};

using EdgeModel =
    std::variant<GaussianEdgeModel, ExponentialEdgeModel, ThinnedGaussianEdgeModel>;

enum class ModelKind { gaussian, exponential, thinned_gaussian };

ModelKind model_kind(const EdgeModel& edges);
std::string model_kind_name(ModelKind kind);
std::size_t edge_model_communities(const EdgeModel& edges);

// Throws std::invalid_argument naming the offending field if the parameter
// tables are malformed (wrong shape, asymmetric, nonpositive where positive
// is required).
void validate_edge_model(const EdgeModel& edges);

// Column parameters of the sum statistic: a node in community j contributes,
// against each community k, a sum of p_k independent weights. For Gaussian
// families the sum is exactly normal with the parameters below.
struct AggregatedGaussianParams {
  std::vector<double> mean;      // mu_k = p_k * mu_bar_kj
  std::vector<double> variance;  // Sigma_k = p_k * sigma_bar^2_kj
};

// Aggregation for the dense Gaussian family: column j of the K x K tables.
AggregatedGaussianParams aggregate_gaussian(const GaussianEdgeModel& edges,
                                            const CommunityModel& comm,
                                            std::size_t column);

// Aggregation for the thinned family: mu_k = p_k * mu_bar * theta and
// Sigma_k = p_k * theta * (sigma_bar^2 + (1 - theta) * mu_bar^2), the exact
// moments of a Bernoulli(theta)-thinned normal summed p_k times.
AggregatedGaussianParams aggregate_thinned_gaussian(const ThinnedGaussianEdgeModel& edges,
                                                    const CommunityModel& comm,
                                                    std::size_t column);

}  // namespace wsbm

#endif
