#ifndef PUSHRANK_STATS_HPP_
#define PUSHRANK_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pushrank/common.hpp"
#include "pushrank/rng.hpp"

namespace pushrank {

/*! \brief Shape parameters of a Beta distribution; both strictly positive. */
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

inline void validate(const BetaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.beta)) {
    throw ContractError("Beta shape parameters must be finite and > 0");
  }
}

inline double beta_mean(const BetaParams& p) {
  return p.alpha / (p.alpha + p.beta);
}

// ---------------------------------------------------------------------------
// Samplers. All of them consume a caller-owned stream and nothing else, so a
// fixed seed reproduces the exact sequence of draws.
// ---------------------------------------------------------------------------

/*! \brief Index i with probability probs[i]. The probs must form a simplex. */
inline int sample_categorical(std::span<const double> probs, SeededRng& rng) {
  if (probs.empty()) throw ContractError("categorical needs at least one bin");
  double total = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) {
      throw ContractError("categorical probabilities must be non-negative");
    }
    total += probs[i];
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("categorical probabilities must sum to 1, got " +
                        std::to_string(total));
  }
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u <= cum && probs[i] > 0.0) return static_cast<int>(i);
  }
  return last_positive;  // u fell into the rounding slack at the top
}

inline int sample_bernoulli(double p, SeededRng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ContractError("Bernoulli p must be in [0,1], got " +
                        std::to_string(p));
  }
  return rng.uniform01() < p ? 1 : 0;
}

/*! \brief Gaussian draw via Box-Muller; sigma = 0 returns the mean exactly. */
inline double sample_gaussian(double mean, double sigma, SeededRng& rng) {
  if (!(sigma >= 0.0)) throw ContractError("Gaussian sigma must be >= 0");
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  return mean + sigma * z;
}

/*!
 * \brief Gamma(shape, 1) draw, Marsaglia-Tsang squeeze method.
 *
 * Shapes below 1 use the standard boost: draw Gamma(shape + 1) and scale by
 * U^(1/shape).
 */
inline double sample_gamma(double shape, SeededRng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ContractError("Gamma shape must be finite and > 0");
  }
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_gaussian(0.0, 1.0, rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/*! \brief Beta draw as a ratio of two Gamma draws, clamped into (0, 1). */
inline double sample_beta(const BetaParams& params, SeededRng& rng) {
  validate(params);
  const double ga = sample_gamma(params.alpha, rng);
  const double gb = sample_gamma(params.beta, rng);
  const double x = ga / (ga + gb);
  // keep the support open: the ratio can round to 0 or 1 for tiny shapes
  const double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(x, lo, hi);
}

// ---------------------------------------------------------------------------
// Digamma / trigamma, used by the Beta maximum-likelihood fit.
// ---------------------------------------------------------------------------

/*! \brief psi(x) for x > 0; recurrence up to x >= 10, then asymptotic series. */
inline double digamma(double x) {
  if (!(x > 0.0)) throw ContractError("digamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // ln x - 1/(2x) - sum of Bernoulli terms through x^-10; |err| < 1e-13 here
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

/*! \brief psi'(x) for x > 0, same shift-then-series scheme as digamma. */
inline double trigamma(double x) {
  if (!(x > 0.0)) throw ContractError("trigamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv * (1.0 +
                   inv * (0.5 +
                          inv * (1.0 / 6.0 -
                                 inv2 * (1.0 / 30.0 -
                                        inv2 * (1.0 / 42.0 -
                                                inv2 * (1.0 / 30.0 -
                                                        inv2 * (5.0 / 66.0)))))));
  return result;
}

/*! \brief Mean Beta log-likelihood of samples under (alpha, beta). */
inline double beta_mean_log_likelihood(const BetaParams& p,
                                       double mean_log_x,
                                       double mean_log_1mx) {
  return std::lgamma(p.alpha + p.beta) - std::lgamma(p.alpha) -
         std::lgamma(p.beta) + (p.alpha - 1.0) * mean_log_x +
         (p.beta - 1.0) * mean_log_1mx;
}

namespace detail {

inline BetaParams beta_method_of_moments(double mean, double var) {
  // clamp into the feasible region; var >= m(1-m) has no moment solution
  const double common = mean * (1.0 - mean) / var - 1.0;
  if (!(common > 0.0)) return {1.0, 1.0};
  return {std::max(mean * common, 1e-3), std::max((1.0 - mean) * common, 1e-3)};
}

}  // namespace detail

/*!
 * \brief Maximum-likelihood Beta fit.
 *
 * Newton iteration on the digamma stationarity conditions, started from the
 * method-of-moments estimate. Iterates until the mean-log-likelihood
 * gradient norm drops below 1e-10 or 100 iterations pass; if Newton leaves
 * the feasible region it falls back to whichever iterate scored best.
 *
 * Samples equal to exactly 0 or 1 are clamped to [1e-6, 1 - 1e-6] with a
 * warning on stderr; values outside [0, 1] are rejected.
 */
inline BetaParams fit_beta_mle(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw ContractError("fit_beta_mle needs at least 10 samples, got " +
                        std::to_string(samples.size()));
  }
  double mean_log_x = 0.0, mean_log_1mx = 0.0, mean = 0.0, sq = 0.0;
  std::size_t clamped = 0;
  for (double raw : samples) {
    if (!(raw >= 0.0 && raw <= 1.0)) {
      throw ContractError("fit_beta_mle sample outside [0,1]: " +
                          std::to_string(raw));
    }
    double x = raw;
    if (x < 1e-6 || x > 1.0 - 1e-6) {
      x = std::clamp(x, 1e-6, 1.0 - 1e-6);
      ++clamped;
    }
    mean_log_x += std::log(x);
    mean_log_1mx += std::log1p(-x);
    mean += x;
    sq += x * x;
  }
  const double n = static_cast<double>(samples.size());
  mean_log_x /= n;
  mean_log_1mx /= n;
  mean /= n;
  const double var = std::max(sq / n - mean * mean, 0.0);
  if (clamped > 0) {
    std::fprintf(stderr,
                 "[pushrank] fit_beta_mle: clamped %zu boundary sample(s) "
                 "into (0,1)\n",
                 clamped);
  }
  if (var < 1e-14) {
    throw NumericError("fit_beta_mle cannot converge: samples are degenerate "
                       "(zero variance)");
  }

  const BetaParams mom = detail::beta_method_of_moments(mean, var);
  BetaParams cur = mom;
  BetaParams best = mom;
  double best_ll = beta_mean_log_likelihood(mom, mean_log_x, mean_log_1mx);

  for (int iter = 0; iter < 100; ++iter) {
    const double psi_ab = digamma(cur.alpha + cur.beta);
    const double ga = psi_ab - digamma(cur.alpha) + mean_log_x;
    const double gb = psi_ab - digamma(cur.beta) + mean_log_1mx;
    if (std::max(std::abs(ga), std::abs(gb)) < 1e-10) break;

    const double tri_ab = trigamma(cur.alpha + cur.beta);
    const double haa = tri_ab - trigamma(cur.alpha);
    const double hbb = tri_ab - trigamma(cur.beta);
    const double det = haa * hbb - tri_ab * tri_ab;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
    double da = -(hbb * ga - tri_ab * gb) / det;
    double db = -(haa * gb - tri_ab * ga) / det;

    // damp steps that would leave the positive quadrant
    double scale = 1.0;
    while ((cur.alpha + scale * da <= 0.0 || cur.beta + scale * db <= 0.0) &&
           scale > 1e-8) {
      scale *= 0.5;
    }
    cur.alpha += scale * da;
    cur.beta += scale * db;
    if (!std::isfinite(cur.alpha) || !std::isfinite(cur.beta) ||
        cur.alpha <= 0.0 || cur.beta <= 0.0) {
      return best;  // diverged; the best tracked iterate is the fallback
    }
    const double ll = beta_mean_log_likelihood(cur, mean_log_x, mean_log_1mx);
    if (std::isfinite(ll) && ll >= best_ll) {
      best_ll = ll;
      best = cur;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Empirical CDF
// ---------------------------------------------------------------------------

/*!
 * \brief Right-continuous empirical distribution of a fixed sample set.
 *
 * Immutable after construction; evaluation is a binary search.
 */
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> samples)
      : samples_(std::move(samples)) {
    if (samples_.empty()) {
      throw ContractError("EmpiricalCDF needs a non-empty sample");
    }
    std::sort(samples_.begin(), samples_.end());
  }

  /*! \brief P(S <= x), i.e. the fraction of samples at or below x. */
  double operator()(double x) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) /
           static_cast<double>(samples_.size());
  }

  /*! \brief P(S > x), the mass strictly above x. */
  double upper_tail(double x) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(samples_.end() - it) /
           static_cast<double>(samples_.size());
  }

  std::span<const double> samples() const { return samples_; }

 private:
  std::vector<double> samples_;
};

}  // namespace pushrank

#endif  // PUSHRANK_STATS_HPP_
