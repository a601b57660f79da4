#ifndef WSBM_MODEL_IO_HPP
#define WSBM_MODEL_IO_HPP

#include <iosfwd>
#include <string>

#include "wsbm/model.hpp"

namespace wsbm {

// A fully specified instance: community structure at a concrete n plus the
// per-pair weight families.
struct ModelFile {
  CommunityModel community;
  EdgeModel edges;

  ModelKind kind() const { return model_kind(edges); }
};

// Parses the JSON model format:
//   { "K": 2, "n": 1000, "rho": [0.5, 0.5],
//     "mu_bar": [[...]], "sigma_bar_sq": [[...]] }     (gaussian)
//   { ..., "lambda": [[...]] }                          (exponential)
//   { ..., "mu_bar": ..., "sigma_bar_sq": ..., "c": ... } (thinned gaussian)
// All matrices are row-major arrays of arrays. Throws std::invalid_argument
// with a message naming the failed field.
ModelFile parse_model_json(const std::string& text);
ModelFile load_model_file(const std::string& path);

}  // namespace wsbm

#endif
