#include "wsbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsbm {

CommunityModel build_community_model(std::size_t n, const std::vector<double>& rho) {
  if (n == 0) throw std::invalid_argument("n: must be positive");
  if (rho.empty()) throw std::invalid_argument("rho: must be non-empty");
  double total = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || rho[i] > 1.0) {
      throw std::invalid_argument("rho: entries must lie in (0, 1]");
    }
    total += rho[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("rho: entries must sum to 1");
  }

  CommunityModel out;
  out.n = n;
  out.rho = rho;
  out.sizes.resize(rho.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
    out.sizes[i] = static_cast<std::size_t>(std::floor(rho[i] * static_cast<double>(n)));
    assigned += out.sizes[i];
  }
  if (assigned >= n && rho.size() > 1) {
    throw std::invalid_argument("rho: rounding leaves no nodes for the last community");
  }
  out.sizes.back() = n - assigned;
  for (std::size_t i = 0; i < out.sizes.size(); ++i) {
    if (out.sizes[i] == 0) {
      throw std::invalid_argument("rho: community " + std::to_string(i) +
                                  " rounds to zero nodes at this n");
    }
  }
  return out;
}

double ThinnedGaussianEdgeModel::theta(std::size_t i, std::size_t j, std::size_t n) const {
  const double t = theta_c(i, j) * std::log(static_cast<double>(n)) /
                   static_cast<double>(n);
  // Same slack as the rho-sum check: c = n / log(n) should mean exactly 1
  // even when the round trip lands an ulp above it.
  if (!(t > 0.0) || t > 1.0 + 1e-12) {
    throw std::invalid_argument("theta: c * log(n) / n must lie in (0, 1] (got " +
                                std::to_string(t) + ")");
  }
  return std::min(t, 1.0);
}

ModelKind model_kind(const EdgeModel& edges) {
  if (std::holds_alternative<GaussianEdgeModel>(edges)) return ModelKind::gaussian;
  if (std::holds_alternative<ExponentialEdgeModel>(edges)) return ModelKind::exponential;
  return ModelKind::thinned_gaussian;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian: return "gaussian";
    case ModelKind::exponential: return "exponential";
    case ModelKind::thinned_gaussian: return "thinned_gaussian";
  }
  return "unknown";
}

namespace {

void check_square_symmetric(const Matrix& m, const std::string& field, std::size_t k) {
  if (m.rows() != k || m.cols() != k) {
    throw std::invalid_argument(field + ": must be " + std::to_string(k) + "x" +
                                std::to_string(k));
  }
  if (!m.symmetric()) {
    throw std::invalid_argument(field + ": must be symmetric");
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(m(i, j))) {
        throw std::invalid_argument(field + ": entries must be finite");
      }
    }
  }
}

void check_positive(const Matrix& m, const std::string& field) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) > 0.0)) {
        throw std::invalid_argument(field + ": entries must be strictly positive");
      }
    }
  }
}

}  // namespace

std::size_t edge_model_communities(const EdgeModel& edges) {
  return std::visit(
      [](const auto& e) -> std::size_t {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ExponentialEdgeModel>) {
          return e.rate.rows();
        } else {
          return e.mean.rows();
        }
      },
      edges);
}

void validate_edge_model(const EdgeModel& edges) {
  const std::size_t k = edge_model_communities(edges);
  if (k == 0) throw std::invalid_argument("edge model: parameter tables are empty");
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, GaussianEdgeModel>) {
          check_square_symmetric(e.mean, "mean", k);
          check_square_symmetric(e.variance, "variance", k);
          check_positive(e.variance, "variance");
        } else if constexpr (std::is_same_v<T, ExponentialEdgeModel>) {
          check_square_symmetric(e.rate, "rate", k);
          check_positive(e.rate, "rate");
        } else {
          check_square_symmetric(e.mean, "mean", k);
          check_square_symmetric(e.variance, "variance", k);
          check_positive(e.variance, "variance");
          check_square_symmetric(e.theta_c, "theta_c", k);
          check_positive(e.theta_c, "theta_c");
        }
      },
      edges);
}

AggregatedGaussianParams aggregate_gaussian(const GaussianEdgeModel& edges,
                                            const CommunityModel& comm,
                                            std::size_t column) {
  const std::size_t k = edges.mean.rows();
  if (comm.num_communities() != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  if (column >= k) throw std::invalid_argument("column out of range");
  AggregatedGaussianParams out;
  out.mean.resize(k);
  out.variance.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = static_cast<double>(comm.sizes[i]);
    out.mean[i] = p * edges.mean(i, column);
    out.variance[i] = p * edges.variance(i, column);
  }
  return out;
}

AggregatedGaussianParams aggregate_thinned_gaussian(const ThinnedGaussianEdgeModel& edges,
                                                    const CommunityModel& comm,
                                                    std::size_t column) {
  const std::size_t k = edges.mean.rows();
  if (comm.num_communities() != k) {
    throw std::invalid_argument("community count does not match edge model");
  }
  if (column >= k) throw std::invalid_argument("column out of range");
  AggregatedGaussianParams out;
  out.mean.resize(k);
  out.variance.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = static_cast<double>(comm.sizes[i]);
    const double th = edges.theta(i, column, comm.n);
    const double mu = edges.mean(i, column);
    const double var = edges.variance(i, column);
    out.mean[i] = p * mu * th;
    out.variance[i] = p * th * (var + (1.0 - th) * mu * mu);
  }
  return out;
}

}  // namespace wsbm
