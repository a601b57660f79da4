#include "wsbm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "wsbm/densities.hpp"

namespace wsbm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// One integration coordinate: bounds plus a cheap log-density with
// precomputed normalizing constant. `a_*` is the first hypothesis, `b_*`
// the second; both share the coordinate's bounds.
struct Coord {
  bool is_gamma = false;
  double lo = 0.0;
  double hi = 0.0;
  // normal: (loc, scale2) = (mean, variance); gamma: (loc, scale2) = (shape, rate)
  double a_loc = 0.0, a_scale2 = 1.0, a_norm = 0.0;
  double b_loc = 0.0, b_scale2 = 1.0, b_norm = 0.0;

  double log_a(double w) const { return eval(w, a_loc, a_scale2, a_norm); }
  double log_b(double w) const { return eval(w, b_loc, b_scale2, b_norm); }

 private:
  double eval(double w, double loc, double scale2, double norm) const {
    if (!is_gamma) {
      const double d = w - loc;
      return norm - d * d / (2.0 * scale2);
    }
    if (w <= 0.0) {
      // shape == 1 has a finite boundary density; shape > 1 vanishes.
      return loc == 1.0 && w == 0.0 ? norm
                                    : -std::numeric_limits<double>::infinity();
    }
    return norm + (loc - 1.0) * std::log(w) - scale2 * w;
  }
};

double gamma_tail_log_bound(double shape, double rate, double upper) {
  // Chernoff: P(X > U) <= exp(-rate U + shape + shape log(rate U / shape))
  // for rate U > shape.
  const double ru = rate * upper;
  if (ru <= shape) return 0.0;  // bound vacuous; caller must extend further
  return -ru + shape + shape * std::log(ru / shape);
}

double extended_gamma_upper(double shape, double rate, double sd_span, double tail_bound) {
  double upper = shape / rate + sd_span * std::sqrt(shape) / rate;
  const double want = std::log(tail_bound);
  while (gamma_tail_log_bound(shape, rate, upper) > want) upper *= 1.5;
  return upper;
}

std::vector<Coord> build_coords(const GaussianColumn& a, const GaussianColumn& b,
                                const QuadratureSpec& quad) {
  const std::size_t k = a.mean.size();
  if (k == 0 || a.variance.size() != k || b.mean.size() != k || b.variance.size() != k) {
    throw std::invalid_argument("oracle: column vectors must share a positive length");
  }
  if (quad.sd_span < 8.0) {
    throw std::invalid_argument("oracle: sd_span below 8 cannot meet the mass coverage bound");
  }
  std::vector<Coord> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(a.variance[i] > 0.0) || !(b.variance[i] > 0.0)) {
      throw std::invalid_argument("oracle: variances must be strictly positive");
    }
    Coord& c = out[i];
    c.is_gamma = false;
    c.a_loc = a.mean[i];
    c.a_scale2 = a.variance[i];
    c.a_norm = -0.5 * (kLogTwoPi + std::log(a.variance[i]));
    c.b_loc = b.mean[i];
    c.b_scale2 = b.variance[i];
    c.b_norm = -0.5 * (kLogTwoPi + std::log(b.variance[i]));
    const double sa = std::sqrt(a.variance[i]);
    const double sb = std::sqrt(b.variance[i]);
    c.lo = std::min(a.mean[i] - quad.sd_span * sa, b.mean[i] - quad.sd_span * sb);
    c.hi = std::max(a.mean[i] + quad.sd_span * sa, b.mean[i] + quad.sd_span * sb);
  }
  return out;
}

std::vector<Coord> build_coords(const GammaColumn& a, const GammaColumn& b,
                                const QuadratureSpec& quad) {
  const std::size_t k = a.shape.size();
  if (k == 0 || a.rate.size() != k || b.shape.size() != k || b.rate.size() != k) {
    throw std::invalid_argument("oracle: column vectors must share a positive length");
  }
  std::vector<Coord> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(a.shape[i] >= 1.0) || !(b.shape[i] >= 1.0)) {
      throw std::invalid_argument("oracle: gamma shapes below 1 are not supported");
    }
    if (!(a.rate[i] > 0.0) || !(b.rate[i] > 0.0)) {
      throw std::invalid_argument("oracle: gamma rates must be strictly positive");
    }
    Coord& c = out[i];
    c.is_gamma = true;
    c.a_loc = a.shape[i];
    c.a_scale2 = a.rate[i];
    c.a_norm = a.shape[i] * std::log(a.rate[i]) - std::lgamma(a.shape[i]);
    c.b_loc = b.shape[i];
    c.b_scale2 = b.rate[i];
    c.b_norm = b.shape[i] * std::log(b.rate[i]) - std::lgamma(b.shape[i]);
    c.lo = 0.0;
    c.hi = std::max(
        extended_gamma_upper(a.shape[i], a.rate[i], quad.sd_span, quad.tail_bound),
        extended_gamma_upper(b.shape[i], b.rate[i], quad.sd_span, quad.tail_bound));
  }
  return out;
}

std::size_t make_odd(std::size_t points) {
  if (points < 3) return 3;
  return points % 2 == 0 ? points + 1 : points;
}

// Composite Simpson with Kahan-compensated accumulation, so the result does
// not depend on the (potentially parallel) evaluation order used elsewhere.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               std::size_t points) {
  points = make_odd(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double x = i + 1 == points ? hi : lo + h * static_cast<double>(i);
    const double term = w * f(x) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum * h / 3.0;
}

// Roots of `h` inside (lo, hi), located by a sign scan and bisection.
std::vector<double> find_crossings(const std::function<double(double)>& h, double lo,
                                   double hi) {
  constexpr std::size_t kScan = 257;
  std::vector<double> roots;
  double prev_x = lo;
  double prev_v = h(lo);
  for (std::size_t i = 1; i < kScan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (kScan - 1);
    const double v = h(x);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double xa = prev_x, xb = x, va = prev_v;
      for (int iter = 0; iter < 80; ++iter) {
        const double xm = 0.5 * (xa + xb);
        const double vm = h(xm);
        if ((va < 0.0) == (vm < 0.0)) {
          xa = xm;
          va = vm;
        } else {
          xb = xm;
        }
      }
      roots.push_back(0.5 * (xa + xb));
    } else if (v == 0.0 && prev_v != 0.0) {
      roots.push_back(x);
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

// Integral over [coord.lo, coord.hi] of
//   min{ exp(log_pa + log f_a(w)), exp(log_pb + log f_b(w)) },
// split exactly at the density crossings so Simpson never straddles a kink.
double min_integral_1d(const Coord& coord, double log_pa, double log_pb,
                       std::size_t points) {
  auto diff = [&](double w) {
    return log_pa + coord.log_a(w) - log_pb - coord.log_b(w);
  };
  // A gamma coordinate can have log density -inf at the boundary; start the
  // crossing scan just inside.
  const double scan_lo =
      coord.is_gamma ? coord.lo + (coord.hi - coord.lo) * 1e-12 : coord.lo;
  std::vector<double> cuts = find_crossings(diff, scan_lo, coord.hi);
  cuts.insert(cuts.begin(), coord.lo);
  cuts.push_back(coord.hi);

  auto integrand = [&](double w) {
    const double va = log_pa + coord.log_a(w);
    const double vb = log_pb + coord.log_b(w);
    const double v = std::min(va, vb);
    return v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v);
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    total += simpson(integrand, cuts[i], cuts[i + 1], points);
  }
  return total;
}

double min_integral_impl(const std::vector<Coord>& coords, double prior_a,
                         double prior_b, const QuadratureSpec& quad) {
  if (!(prior_a > 0.0) || !(prior_b > 0.0)) {
    throw std::invalid_argument("oracle: priors must be strictly positive");
  }
  const double log_pa = std::log(prior_a);
  const double log_pb = std::log(prior_b);
  const std::size_t k = coords.size();
  const std::size_t points = make_odd(quad.points);

  if (k == 1) {
    return min_integral_1d(coords[0], log_pa, log_pb, points);
  }
  if (k == 2) {
    // Outer Simpson in coordinate 0; the inner integral absorbs the outer
    // density values into the priors, making each slice an exact 1-D split.
    const std::size_t inner = make_odd(std::max<std::size_t>(801, points / 4));
    auto slice = [&](double x) {
      return min_integral_1d(coords[1], log_pa + coords[0].log_a(x),
                             log_pb + coords[0].log_b(x), inner);
    };
    return simpson(slice, coords[0].lo, coords[0].hi, points);
  }
  if (k == 3) {
    const std::size_t pts = make_odd(std::min<std::size_t>(points, 301));
    std::vector<std::vector<double>> la(3), lb(3), wt(3);
    std::vector<double> step(3);
    for (std::size_t d = 0; d < 3; ++d) {
      la[d].resize(pts);
      lb[d].resize(pts);
      wt[d].resize(pts);
      step[d] = (coords[d].hi - coords[d].lo) / static_cast<double>(pts - 1);
      for (std::size_t i = 0; i < pts; ++i) {
        const double x = i + 1 == pts ? coords[d].hi
                                      : coords[d].lo + step[d] * static_cast<double>(i);
        la[d][i] = coords[d].log_a(x);
        lb[d][i] = coords[d].log_b(x);
        wt[d][i] = (i == 0 || i + 1 == pts) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      }
    }
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < pts; ++i) {
      for (std::size_t j = 0; j < pts; ++j) {
        const double wa2 = la[0][i] + la[1][j];
        const double wb2 = lb[0][i] + lb[1][j];
        const double w2 = wt[0][i] * wt[1][j];
        for (std::size_t m = 0; m < pts; ++m) {
          const double v = std::min(log_pa + wa2 + la[2][m], log_pb + wb2 + lb[2][m]);
          const double val =
              v == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v);
          const double term = w2 * wt[2][m] * val - comp;
          const double next = sum + term;
          comp = (next - sum) - term;
          sum = next;
        }
      }
    }
    return sum * step[0] * step[1] * step[2] / 27.0;
  }
  throw std::invalid_argument("oracle: min_integral supports K <= 3");
}

SandwichSlacks sandwich_impl(double integral, double divergence_value) {
  if (integral < 1e-300) {
    throw std::domain_error("oracle: min integral underflowed below 1e-300");
  }
  SandwichSlacks out;
  out.integral = integral;
  out.upper_slack = divergence_value + std::log(integral);
  out.lower_slack = -out.upper_slack;
  return out;
}

double lemma2_impl(const std::vector<Coord>& coords, const std::vector<double>& t_grid,
                   const std::vector<std::vector<double>>& w_points) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : w_points) {
    if (w.size() != coords.size()) {
      throw std::invalid_argument("oracle: w point dimension mismatch");
    }
    double d = 0.0;  // log f_a(w) - log f_b(w)
    for (std::size_t i = 0; i < coords.size(); ++i) {
      d += coords[i].log_a(w[i]) - coords[i].log_b(w[i]);
    }
    for (double t : t_grid) {
      if (!(t >= 0.0) || t > 1.0) {
        throw std::invalid_argument("oracle: t grid must lie in [0,1]");
      }
      // log g1 = (1-t) d, log g2 = -t d
      const double m = std::min((1.0 - t) * d, -t * d);
      best = std::max(best, m);
    }
  }
  return std::exp(best);
}

double chernoff_impl(std::vector<Coord> coords, const QuadratureSpec& quad) {
  const std::size_t points = make_odd(quad.points);

  // Gamma coordinates: the t-interpolated integrand is itself gamma-shaped
  // with interpolated (shape, rate); stretch the shared upper bound until
  // its tail is certified small for every interpolation.
  for (Coord& c : coords) {
    if (!c.is_gamma) continue;
    const double want = std::log(quad.tail_bound);
    bool ok = false;
    while (!ok) {
      ok = true;
      for (int step = 0; step <= 10; ++step) {
        const double t = static_cast<double>(step) / 10.0;
        const double shape = t * c.a_loc + (1.0 - t) * c.b_loc;
        const double rate = t * c.a_scale2 + (1.0 - t) * c.b_scale2;
        if (gamma_tail_log_bound(shape, rate, c.hi) > want) {
          ok = false;
          break;
        }
      }
      if (!ok) c.hi *= 1.5;
    }
  }

  // Per-coordinate node tables; each t evaluation is then a weighted
  // log-sum-exp per coordinate.
  const std::size_t k = coords.size();
  std::vector<std::vector<double>> la(k), lb(k), wt(k);
  std::vector<double> step(k);
  for (std::size_t d = 0; d < k; ++d) {
    la[d].resize(points);
    lb[d].resize(points);
    wt[d].resize(points);
    step[d] = (coords[d].hi - coords[d].lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = i + 1 == points ? coords[d].hi
                                       : coords[d].lo + step[d] * static_cast<double>(i);
      la[d][i] = coords[d].log_a(x);
      lb[d][i] = coords[d].log_b(x);
      wt[d][i] = (i == 0 || i + 1 == points) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    }
  }

  auto exponent = [&](double t) {
    double total = 0.0;
    for (std::size_t d = 0; d < k; ++d) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < points; ++i) {
        const double v = t * la[d][i] + (1.0 - t) * lb[d][i];
        peak = std::max(peak, v);
      }
      double sum = 0.0, comp = 0.0;
      for (std::size_t i = 0; i < points; ++i) {
        const double v = t * la[d][i] + (1.0 - t) * lb[d][i];
        const double term = wt[d][i] * std::exp(v - peak) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
      }
      // -log integral of this coordinate
      total -= peak + std::log(sum * step[d] / 3.0);
    }
    return total;
  };

  constexpr int kGrid = 1000;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double t = static_cast<double>(i) / kGrid;
    const double v = exponent(t);
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
  double f1 = exponent(x1);
  double f2 = exponent(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = exponent(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = exponent(x1);
    }
  }
  return std::max(best_val, std::max(f1, f2));
}

}  // namespace

double min_integral(const GaussianColumn& a, const GaussianColumn& b, double prior_a,
                    double prior_b, const QuadratureSpec& quad) {
  return min_integral_impl(build_coords(a, b, quad), prior_a, prior_b, quad);
}

double min_integral(const GammaColumn& a, const GammaColumn& b, double prior_a,
                    double prior_b, const QuadratureSpec& quad) {
  return min_integral_impl(build_coords(a, b, quad), prior_a, prior_b, quad);
}

SandwichSlacks verify_sandwich(const GaussianColumn& a, const GaussianColumn& b,
                               double prior_a, double prior_b, double divergence_value,
                               const QuadratureSpec& quad) {
  return sandwich_impl(min_integral(a, b, prior_a, prior_b, quad), divergence_value);
}

SandwichSlacks verify_sandwich(const GammaColumn& a, const GammaColumn& b,
                               double prior_a, double prior_b, double divergence_value,
                               const QuadratureSpec& quad) {
  return sandwich_impl(min_integral(a, b, prior_a, prior_b, quad), divergence_value);
}

double lemma2_max(const GaussianColumn& a, const GaussianColumn& b,
                  const std::vector<double>& t_grid,
                  const std::vector<std::vector<double>>& w_points) {
  return lemma2_impl(build_coords(a, b, QuadratureSpec{}), t_grid, w_points);
}

double lemma2_max(const GammaColumn& a, const GammaColumn& b,
                  const std::vector<double>& t_grid,
                  const std::vector<std::vector<double>>& w_points) {
  return lemma2_impl(build_coords(a, b, QuadratureSpec{}), t_grid, w_points);
}

double chernoff_exponent_quadrature(const GaussianColumn& a, const GaussianColumn& b,
                                    const QuadratureSpec& quad) {
  return chernoff_impl(build_coords(a, b, quad), quad);
}

double chernoff_exponent_quadrature(const GammaColumn& a, const GammaColumn& b,
                                    const QuadratureSpec& quad) {
  return chernoff_impl(build_coords(a, b, quad), quad);
}

double MixtureDensity::continuous_pdf(double z) const {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 1; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double id = static_cast<double>(i);
    const double term =
        weights[i] * std::exp(log_normal_pdf(z, id * mu, id * sigma_sq)) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

double MixtureDensity::continuous_weight() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < weights.size(); ++i) sum += weights[i];
  return sum;
}

MixtureDensity mixture_density(std::size_t n, double theta, double mu, double sigma_sq) {
  if (n == 0) throw std::invalid_argument("mixture_density: n must be positive");
  if (!(theta > 0.0) || theta >= 1.0) {
    throw std::invalid_argument("mixture_density: theta must lie in (0, 1)");
  }
  if (!(sigma_sq > 0.0)) {
    throw std::invalid_argument("mixture_density: sigma_sq must be positive");
  }
  MixtureDensity out;
  out.n = n;
  out.theta = theta;
  out.mu = mu;
  out.sigma_sq = sigma_sq;
  out.atom_weight = std::exp(static_cast<double>(n) * std::log1p(-theta));

  constexpr double kTruncation = 1e-14;
  // Binomial pmf in log domain (the recurrence from the atom would die if
  // the atom underflowed); keep terms >= the truncation and stop once past
  // the mean with pmf below it.
  const double log_theta = std::log(theta);
  const double log_comp = std::log1p(-theta);
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> weights(1, 0.0);
  const double mean_count = static_cast<double>(n) * theta;
  for (std::size_t i = 1; i <= n; ++i) {
    const double id = static_cast<double>(i);
    const double log_pmf = lg_n1 - std::lgamma(id + 1.0) -
                           std::lgamma(static_cast<double>(n - i) + 1.0) +
                           id * log_theta + static_cast<double>(n - i) * log_comp;
    const double pmf = std::exp(log_pmf);
    if (pmf < kTruncation && id > mean_count) break;
    weights.push_back(pmf < kTruncation ? 0.0 : pmf);
  }
  out.weights = std::move(weights);
  return out;
}

ApproxDistance approx_distance(std::size_t n, double theta, double mu, double sigma_sq,
                               const QuadratureSpec& quad) {
  const MixtureDensity mix = mixture_density(n, theta, mu, sigma_sq);
  ApproxDistance out;
  out.atom_weight = mix.atom_weight;
  const double nd = static_cast<double>(n);
  out.gauss_mean = nd * mu * theta;
  out.gauss_variance = nd * theta * (sigma_sq + (1.0 - theta) * mu * mu);

  // Grid spans both supports: the approximating normal and every retained
  // mixture component.
  double lo = out.gauss_mean - quad.sd_span * std::sqrt(out.gauss_variance);
  double hi = out.gauss_mean + quad.sd_span * std::sqrt(out.gauss_variance);
  for (std::size_t i = 1; i < mix.weights.size(); ++i) {
    if (mix.weights[i] == 0.0) continue;
    const double id = static_cast<double>(i);
    const double sd = std::sqrt(id * sigma_sq);
    lo = std::min(lo, id * mu - quad.sd_span * sd);
    hi = std::max(hi, id * mu + quad.sd_span * sd);
  }

  const double gv = out.gauss_variance;
  const double gm = out.gauss_mean;
  auto gap = [&](double z) {
    return mix.continuous_pdf(z) - std::exp(log_normal_pdf(z, gm, gv));
  };
  const double abs_integral =
      simpson([&](double z) { return std::abs(gap(z)); }, lo, hi, make_odd(quad.points));
  out.tv = 0.5 * (mix.atom_weight + abs_integral);

  const std::size_t points = make_odd(quad.points);
  double sup = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double z = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    sup = std::max(sup, std::abs(gap(z)));
  }
  out.sup = sup;
  return out;
}

}  // namespace wsbm
