#ifndef WSBM_RECOVERY_HPP
#define WSBM_RECOVERY_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wsbm/model.hpp"
#include "wsbm/sampler.hpp"

namespace wsbm {

struct HypothesisScore {
  std::size_t community = 0;
  double log_score = 0.0;  // log rho_i + log-likelihood of w under H = i
};

// Posterior scores of the genie-aided test: the node's edge-sum vector w is
// scored under each community hypothesis using the per-coordinate sum laws
// (normal for the Gaussian families — the thinned family uses its aggregated
// normal surrogate — Gamma(p, lambda) for the exponential family).
std::vector<HypothesisScore> hypothesis_scores(
    const std::vector<double>& w, const CommunityModel& comm, const EdgeModel& edges,
    SizeConvention convention = SizeConvention::full);

// argmax of hypothesis_scores; ties broken toward the smallest index.
std::size_t map_classify(const std::vector<double>& w, const CommunityModel& comm,
                         const EdgeModel& edges,
                         SizeConvention convention = SizeConvention::full);

struct TrialReport {
  std::size_t trials = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;
  // decisions[i][k] = number of trials with truth i classified as k; row i
  // sums to the number of trials whose truth was i.
  std::vector<std::vector<std::size_t>> decisions;
  double predicted_exponent = 0.0;  // min pairwise divergence (0 when K = 1)
  double empirical_exponent = 0.0;  // -log(max(errors, 1) / trials)
  bool zero_errors = false;
  std::uint64_t seed = 0;
};

// Monte Carlo of the genie-aided test: truth drawn from rho each trial, the
// edge-sum vector drawn from the stated laws, then classified. Per-trial
// seeds derive purely from (seed, trial).
TrialReport genie_error_rate(const CommunityModel& comm, const EdgeModel& edges,
                             std::size_t trials, std::uint64_t seed,
                             SizeConvention convention = SizeConvention::full);

// Exact MAP over whole labelings for tiny graphs: maximizes sum of log rho
// over nodes plus log-likelihood of every edge weight given its endpoint
// pair. Restricted to labelings with the exact community sizes unless
// exact_sizes is false. Ties resolve to the lexicographically smallest
// labeling. Throws when the labeling count exceeds ~5e5 (n <= 12 intended).
std::vector<std::size_t> exhaustive_map(const LabeledGraphSample& sample,
                                        const CommunityModel& comm,
                                        const EdgeModel& edges,
                                        bool exact_sizes = true);

struct PhasePoint {
  double c = 0.0;
  double error_rate = 0.0;
  double se = 0.0;  // binomial standard error of error_rate
  double predicted_margin = 0.0;
  bool zero_errors = false;
};

// One genie Monte Carlo per scale value c, with the recovery-threshold
// margin computed from the same family. Sub-seed for index i derives from
// (seed, i).
std::vector<PhasePoint> phase_sweep(const CommunityModel& comm,
                                    const std::function<EdgeModel(double)>& family,
                                    const std::vector<double>& c_values,
                                    std::size_t trials, std::uint64_t seed);

// The two-community symmetric Gaussian family used for threshold sweeps:
// within-community mean sqrt(8 c sigma_sq log(n) / n), cross-community mean
// 0, proportions (1/2, 1/2) assumed by the caller. At this gap the minimum
// pairwise divergence equals c log n exactly.
std::function<EdgeModel(double)> binary_symmetric_gap_family(std::size_t n,
                                                             double sigma_sq);

}  // namespace wsbm

#endif
