#pragma once

// Shifted negative binomial, logistic link, and the scalar densities used by
// the priors. Everything works in log space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace hh {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

namespace detail {
namespace bmp = boost::math::policies;
// Overflow and poles come back as inf/NaN; callers treat them as -inf density.
using QuietPolicy = bmp::policy<bmp::overflow_error<bmp::ignore_error>,
                                bmp::pole_error<bmp::ignore_error>,
                                bmp::domain_error<bmp::ignore_error>,
                                bmp::evaluation_error<bmp::ignore_error>>;
}  // namespace detail

inline double log_gamma(double x) { return boost::math::lgamma(x, detail::QuietPolicy()); }
inline double digamma(double x) { return boost::math::digamma(x, detail::QuietPolicy()); }

/// Logistic function. The result lies in the open interval (0, 1): for large
/// positive arguments it saturates at the largest double below one rather than
/// rounding to exactly 1.
inline double inverse_logit(double x) {
  constexpr double kUpper = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  constexpr double kLower = std::numeric_limits<double>::denorm_min();
  double p;
  if (x >= 0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kLower, kUpper);
}

/// log(inverse_logit(x)) without cancellation.
inline double log_inverse_logit(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

/// log(1 - inverse_logit(x)).
inline double log1m_inverse_logit(double x) { return log_inverse_logit(-x); }

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

/// log(sum(exp(values))). Returns -inf for an empty range.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf) return kNegInf;
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

/// log(mean(exp(values))).
inline double log_mean_exp(std::span<const double> values) {
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

namespace detail {
inline void check_shifted_nb(double mean, double shape) {
  if (!(mean >= 1.0) || !std::isfinite(mean))
    throw std::domain_error("shifted negative binomial: mean must be >= 1, got " +
                            std::to_string(mean));
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::domain_error("shifted negative binomial: shape must be > 0, got " +
                            std::to_string(shape));
}
}  // namespace detail

/// log C(y - 2 + shape, y - 1) with the binomial coefficient generalised to
/// real shape through log-gamma.
inline double shifted_nb_log_coefficient(int y, double shape) {
  if (y == 1) return 0.0;
  return log_gamma(y - 1 + shape) - log_gamma(static_cast<double>(y)) - log_gamma(shape);
}

/// Log pmf of the negative binomial shifted onto {1, 2, ...} with E[Y] = mean.
///
///   f(y) = C(y-2+shape, y-1) ((mean-1)/(mean-1+shape))^(y-1) (shape/(mean-1+shape))^shape
///
/// mean == 1 is the point mass at y = 1.
inline double shifted_nb_logpmf(int y, double mean, double shape) {
  if (y < 1) throw std::domain_error("shifted negative binomial: y must be >= 1");
  detail::check_shifted_nb(mean, shape);
  if (mean == 1.0) return y == 1 ? 0.0 : kNegInf;
  const double excess = mean - 1.0;
  const double total = excess + shape;
  return shifted_nb_log_coefficient(y, shape) + (y - 1) * std::log(excess / total) +
         shape * std::log(shape / total);
}

/// Same density parametrised by log(mean - 1). Stable when mean - 1 is tiny or
/// huge; `log_coefficient` is shifted_nb_log_coefficient(y, shape).
inline double shifted_nb_logpmf_log_excess(int y, double log_excess, double shape,
                                           double log_coefficient) {
  const double log_total = log_add_exp(log_excess, std::log(shape));
  return log_coefficient + (y - 1) * (log_excess - log_total) +
         shape * (std::log(shape) - log_total);
}

/// Draws from the shifted negative binomial as 1 + NB(mean - 1, shape), using
/// the gamma-Poisson mixture so that shape may be any positive real.
template <class Rng>
int shifted_nb_sample(double mean, double shape, Rng& rng) {
  detail::check_shifted_nb(mean, shape);
  if (mean == 1.0) return 1;
  std::gamma_distribution<double> gamma(shape, (mean - 1.0) / shape);
  const double rate = gamma(rng);
  if (!(rate > 0.0)) return 1;
  std::poisson_distribution<long long> poisson(rate);
  const long long extra = poisson(rng);
  return static_cast<int>(std::min<long long>(extra, std::numeric_limits<int>::max() - 1)) + 1;
}

// ---------------------------------------------------------------------------
// Scalar prior densities. Normal is parametrised by variance, Gamma by
// shape and rate.

inline double normal_logpdf(double x, double mean, double variance) {
  const double z = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance)) - 0.5 * z * z / variance;
}

inline double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

/// d/dx of gamma_logpdf.
inline double gamma_logpdf_dx(double x, double shape, double rate) {
  return (shape - 1.0) / x - rate;
}

/// d/dshape of gamma_logpdf.
inline double gamma_logpdf_dshape(double x, double shape, double rate) {
  return std::log(rate) - digamma(shape) + std::log(x);
}

}  // namespace hh
