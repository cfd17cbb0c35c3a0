#pragma once

// Monte Carlo verification: reproducible Gaussian path simulation, empirical
// expected utility, and the measure-change diagnostics (density weights and
// the delayed independence statistic).
//
// Random number identity, fixed for reproducibility: std::mt19937_64 seeded
// directly, uniforms from the top 53 bits offset by 2^-54, mapped through
// the Acklam inverse normal CDF with one Halley refinement step. Draws are
// consumed path-major, coordinate-ascending. Means use compensated (Kahan)
// summation, so results do not depend on chunking.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <utility>

#include "delayhedge/hedging.hpp"

namespace delayhedge {

namespace detail {

/// Acklam's rational approximation to the standard normal quantile,
/// refined by one Halley step to full double accuracy.
inline double normal_inverse_cdf(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double u_low = 0.02425;

  double x;
  if (u < u_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - u_low) {
    const double q = u - 0.5;
    const double t = q * q;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) *
        q /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the exact CDF.
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
  const double delta = e / pdf;
  return x - delta / (1.0 + 0.5 * x * delta);
}

/// Compensated running sum.
template <typename Scalar>
class KahanSum {
public:
  void add(Scalar x) {
    const Scalar y = x - carry_;
    const Scalar t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  Scalar total() const { return sum_; }

private:
  Scalar sum_ = 0;
  Scalar carry_ = 0;
};

}  // namespace detail

/// Simulated increment paths: x is paths x n, row p a draw of X ~ N(mu, Sigma).
template <typename Scalar>
struct SimBatch {
  std::uint64_t seed;
  Matrix<Scalar> x;

  Index paths() const { return x.rows(); }
  Index horizon() const { return x.cols(); }
};

template <typename Scalar>
struct McEstimate {
  Scalar estimate;
  Scalar std_error;
};

/// Draws `paths` i.i.d. increment paths mu + F z with F the Cholesky factor
/// of Sigma. Deterministic in (seed, model, paths).
template <typename Scalar>
SimBatch<Scalar> simulate(const MarketModel<Scalar>& model, Index paths,
                          std::uint64_t seed) {
  if (paths < 1) throw InvalidParameter("simulate requires paths >= 1");
  const auto chol = cholesky_logdet(model.sigma.mat());
  const Index n = model.n;

  SimBatch<Scalar> batch;
  batch.seed = seed;
  batch.x.resize(paths, n);

  std::mt19937_64 rng(seed);
  constexpr double two_pow_53 = 9007199254740992.0;
  const Index chunk = 65536;
  Matrix<Scalar> z;
  for (Index start = 0; start < paths; start += chunk) {
    const Index rows = std::min(chunk, paths - start);
    z.resize(rows, n);
    for (Index p = 0; p < rows; ++p) {
      for (Index k = 0; k < n; ++k) {
        const double u =
            (static_cast<double>(rng() >> 11) + 0.5) / two_pow_53;
        z(p, k) = static_cast<Scalar>(detail::normal_inverse_cdf(u));
      }
    }
    batch.x.middleRows(start, rows) = z * chol.factor.transpose();
    batch.x.middleRows(start, rows).rowwise() += model.mu.transpose();
  }
  return batch;
}

/// Portfolio value V = sum_i gamma_i x_i of the strategy on every path.
template <typename Scalar>
Vector<Scalar> path_values(const SimBatch<Scalar>& batch,
                           const LinearStrategy<Scalar>& strat) {
  if (strat.intercept.size() != batch.horizon()) {
    throw DimensionMismatch("strategy size does not match simulated paths");
  }
  validate_strategy(strat);
  const Index paths = batch.paths();
  Vector<Scalar> v(paths);
  const Index chunk = 65536;
  Matrix<Scalar> positions;
  for (Index start = 0; start < paths; start += chunk) {
    const Index rows = std::min(chunk, paths - start);
    const auto x = batch.x.middleRows(start, rows);
    positions = x * strat.loading.transpose();
    positions.rowwise() += strat.intercept.transpose();
    v.segment(start, rows) = positions.cwiseProduct(x).rowwise().sum();
  }
  return v;
}

/// Sample mean and standard error of -exp(-V) across paths.
template <typename Scalar>
McEstimate<Scalar> mc_expected_utility(const SimBatch<Scalar>& batch,
                                       const LinearStrategy<Scalar>& strat) {
  const Vector<Scalar> v = path_values(batch, strat);
  const Index paths = v.size();

  detail::KahanSum<Scalar> sum;
  for (Index p = 0; p < paths; ++p) sum.add(-std::exp(-v(p)));
  const Scalar mean = sum.total() / static_cast<Scalar>(paths);

  if (paths < 2) return {mean, Scalar(0)};
  detail::KahanSum<Scalar> sq;
  for (Index p = 0; p < paths; ++p) {
    const Scalar dev = -std::exp(-v(p)) - mean;
    sq.add(dev * dev);
  }
  const Scalar sample_var = sq.total() / static_cast<Scalar>(paths - 1);
  return {mean, std::sqrt(sample_var / static_cast<Scalar>(paths))};
}

/// Measure-change weights exp(C - V) per path, where V is the value of the
/// optimal strategy and C its certainty-equivalent exponent. The weights
/// average to one and reweight the paths to X ~ N(0, Qhat).
template <typename Scalar>
Vector<Scalar> qhat_weights(const SimBatch<Scalar>& batch,
                            const MarketModel<Scalar>& model,
                            const BandDecomposition<Scalar>& dec) {
  if (batch.horizon() != model.n) {
    throw DimensionMismatch("batch does not match model");
  }
  const LinearStrategy<Scalar> strat = optimal_strategy(model, dec);
  const ValueReport<Scalar> report = optimal_value(model, dec);
  Vector<Scalar> w = path_values(batch, strat);
  for (Index p = 0; p < w.size(); ++p) {
    w(p) = std::exp(report.c_constant - w(p));
  }
  return w;
}

/// Max absolute weighted sample correlation between X_k and X_j over pairs
/// with k - j > delay; zero when no such pair exists. Under the reweighted
/// measure those pairs are independent, so the statistic is a CLT-scale
/// residual for valid decompositions.
template <typename Scalar>
Scalar delayed_martingale_check(const SimBatch<Scalar>& batch,
                                const Vector<Scalar>& weights, int delay) {
  const Index paths = batch.paths();
  const Index n = batch.horizon();
  if (weights.size() != paths) {
    throw DimensionMismatch("weights do not match batch paths");
  }
  if (delay < 0) throw InvalidParameter("delay must be nonnegative");
  if (n - 1 <= delay) return Scalar(0);

  const Scalar weight_sum = weights.sum();
  const Vector<Scalar> mean = batch.x.transpose() * weights / weight_sum;

  Matrix<Scalar> cov = Matrix<Scalar>::Zero(n, n);
  const Index chunk = 65536;
  Matrix<Scalar> centered;
  for (Index start = 0; start < paths; start += chunk) {
    const Index rows = std::min(chunk, paths - start);
    centered = batch.x.middleRows(start, rows);
    centered.rowwise() -= mean.transpose();
    cov.noalias() += centered.transpose() *
                     weights.segment(start, rows).asDiagonal() * centered;
  }
  cov /= weight_sum;

  Scalar stat = Scalar(0);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j + delay < k; ++j) {
      const Scalar corr =
          cov(k, j) / std::sqrt(cov(k, k) * cov(j, j));
      stat = std::max(stat, std::abs(corr));
    }
  }
  return stat;
}

}  // namespace delayhedge
