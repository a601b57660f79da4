#ifndef WSBM_DENSITIES_HPP
#define WSBM_DENSITIES_HPP

#include <cmath>
#include <limits>

namespace wsbm {

inline double log_normal_pdf(double x, double mean, double var) {
  constexpr double kLogTwoPi = 1.8378770664093454836;
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

// Gamma(shape, rate) log-density; x <= 0 maps to -inf for shape > 1 and the
// boundary is handled by callers (shape == 1 is the exponential case).
inline double log_gamma_pdf(double x, double shape, double rate) {
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  if (x == 0.0) {
    if (shape == 1.0) return std::log(rate);
    return shape > 1.0 ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
  }
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
         std::lgamma(shape);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

// Upper tail Q(z) = P(N(0,1) > z), computed via erfc to keep precision for
// large z.
inline double normal_tail(double z) {
  return 0.5 * std::erfc(z * 0.7071067811865475244);
}

}  // namespace wsbm

#endif
