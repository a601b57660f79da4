#include "wsbm/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wsbm {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& field, std::size_t k) {
  if (!j.is_array()) throw std::invalid_argument(field + ": must be an array of arrays");
  if (j.size() != k) {
    throw std::invalid_argument(field + ": expected " + std::to_string(k) + " rows");
  }
  Matrix m(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != k) {
      throw std::invalid_argument(field + ": row " + std::to_string(i) + " must have " +
                                  std::to_string(k) + " entries");
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!row[c].is_number()) {
        throw std::invalid_argument(field + ": entries must be numbers");
      }
      m(i, c) = row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

ModelFile parse_model_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model file: malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) throw std::invalid_argument("model file: top level must be an object");

  for (const char* field : {"K", "n", "rho"}) {
    if (!j.contains(field)) {
      throw std::invalid_argument(std::string(field) + ": missing");
    }
  }
  if (!j["K"].is_number_unsigned() || j["K"].get<std::uint64_t>() == 0) {
    throw std::invalid_argument("K: must be a positive integer");
  }
  const auto k = static_cast<std::size_t>(j["K"].get<std::uint64_t>());
  if (!j["n"].is_number_unsigned() || j["n"].get<std::uint64_t>() == 0) {
    throw std::invalid_argument("n: must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(j["n"].get<std::uint64_t>());

  if (!j["rho"].is_array() || j["rho"].size() != k) {
    throw std::invalid_argument("rho: must be an array of K numbers");
  }
  std::vector<double> rho(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!j["rho"][i].is_number()) throw std::invalid_argument("rho: entries must be numbers");
    rho[i] = j["rho"][i].get<double>();
  }

  ModelFile out;
  out.community = build_community_model(n, rho);

  const bool has_lambda = j.contains("lambda");
  const bool has_c = j.contains("c");
  const bool has_gauss = j.contains("mu_bar") || j.contains("sigma_bar_sq");
  if (has_lambda && (has_c || has_gauss)) {
    throw std::invalid_argument("lambda: exclusive with mu_bar/sigma_bar_sq/c");
  }
  if (has_lambda) {
    ExponentialEdgeModel e;
    e.rate = parse_matrix(j["lambda"], "lambda", k);
    out.edges = e;
  } else if (has_gauss) {
    if (!j.contains("mu_bar")) throw std::invalid_argument("mu_bar: missing");
    if (!j.contains("sigma_bar_sq")) throw std::invalid_argument("sigma_bar_sq: missing");
    if (has_c) {
      ThinnedGaussianEdgeModel e;
      e.mean = parse_matrix(j["mu_bar"], "mu_bar", k);
      e.variance = parse_matrix(j["sigma_bar_sq"], "sigma_bar_sq", k);
      e.theta_c = parse_matrix(j["c"], "c", k);
      out.edges = e;
    } else {
      GaussianEdgeModel e;
      e.mean = parse_matrix(j["mu_bar"], "mu_bar", k);
      e.variance = parse_matrix(j["sigma_bar_sq"], "sigma_bar_sq", k);
      out.edges = e;
    }
  } else {
    throw std::invalid_argument(
        "edge model: need mu_bar/sigma_bar_sq (gaussian), lambda (exponential), "
        "or mu_bar/sigma_bar_sq/c (thinned gaussian)");
  }

  validate_edge_model(out.edges);

  // Thinned models must yield a valid presence probability at this n.
  if (const auto* thin = std::get_if<ThinnedGaussianEdgeModel>(&out.edges)) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c2 = 0; c2 < k; ++c2) thin->theta(i, c2, n);
    }
  }
  return out;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("model file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str());
}

}  // namespace wsbm
