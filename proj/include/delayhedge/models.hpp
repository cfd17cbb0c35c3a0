#pragma once

// Market model constructors: Kac-Murdock-Szego correlation, discretized
// fractional Brownian motion increments, and models loaded from file.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "delayhedge/matrix_core.hpp"

namespace delayhedge {

/// One-asset Gaussian market over n trading periods: the price increments
/// (S_1 - S_0, ..., S_n - S_{n-1}) are jointly N(mu, sigma).
template <typename Scalar>
struct MarketModel {
  Index n;
  Vector<Scalar> mu;
  SymMatrix<Scalar> sigma;
  Scalar s0;  // initial price, bookkeeping only

  MarketModel(Vector<Scalar> mean, SymMatrix<Scalar> cov, Scalar initial_price)
      : n(cov.rows()), mu(std::move(mean)), sigma(std::move(cov)), s0(initial_price) {
    if (mu.size() != n) {
      std::ostringstream msg;
      msg << "mean vector has length " << mu.size() << ", covariance is "
          << n << "x" << n;
      throw DimensionMismatch(msg.str());
    }
    if (!mu.allFinite()) {
      throw InvalidParameter("mean vector must be finite entrywise");
    }
    cholesky_logdet(sigma.mat());  // rejects non-PD covariances
  }
};

/// Fractional Brownian motion trading grid: Hurst parameter in (0,1),
/// n periods of length dt each.
template <typename Scalar>
struct FbmSpec {
  Scalar hurst;
  Index n;
  Scalar dt;
};

/// Kac-Murdock-Szego model: sigma(i,j) = rho^|i-j|. The admissible range is
/// rho in (0,1); pass allow_any_rho to admit any |rho| < 1 subject to the
/// positive definiteness check.
template <typename Scalar>
MarketModel<Scalar> kms_model(Scalar rho, Index n, Vector<Scalar> mu,
                              bool allow_any_rho = false) {
  const bool in_default_range = rho > Scalar(0) && rho < Scalar(1);
  const bool in_override_range = std::abs(rho) < Scalar(1);
  if (!(allow_any_rho ? in_override_range : in_default_range)) {
    std::ostringstream msg;
    msg << "kms_model requires rho in (0,1)"
        << (allow_any_rho ? " or |rho| < 1 with the override" : "")
        << ", got " << rho;
    throw InvalidParameter(msg.str());
  }
  if (n < 1) throw InvalidParameter("kms_model requires n >= 1");
  Matrix<Scalar> sigma(n, n);
  for (Index j = 0; j < n; ++j) {
    sigma(j, j) = Scalar(1);
    for (Index i = j + 1; i < n; ++i) {
      sigma(i, j) = std::pow(rho, static_cast<Scalar>(i - j));
      sigma(j, i) = sigma(i, j);
    }
  }
  return MarketModel<Scalar>(std::move(mu), SymMatrix<Scalar>(sigma), Scalar(0));
}

/// Covariance of discretized fBm increments,
///   sigma(i,j) = dt^{2H}/2 * (|i-j-1|^{2H} + |i-j+1|^{2H} - 2|i-j|^{2H}),
/// a symmetric Toeplitz matrix built from its first row.
template <typename Scalar>
MarketModel<Scalar> fbm_model(const FbmSpec<Scalar>& spec, Vector<Scalar> mu) {
  if (!(spec.hurst > Scalar(0) && spec.hurst < Scalar(1))) {
    std::ostringstream msg;
    msg << "fbm_model requires hurst in (0,1), got " << spec.hurst;
    throw InvalidParameter(msg.str());
  }
  if (spec.dt <= Scalar(0)) {
    throw InvalidParameter("fbm_model requires dt > 0");
  }
  if (spec.n < 1) throw InvalidParameter("fbm_model requires n >= 1");

  const Index n = spec.n;
  const Scalar two_h = Scalar(2) * spec.hurst;
  const Scalar scale = Scalar(0.5) * std::pow(spec.dt, two_h);
  Vector<Scalar> first_row(n);
  for (Index k = 0; k < n; ++k) {
    const Scalar lag = static_cast<Scalar>(k);
    first_row(k) = scale * (std::pow(std::abs(lag - Scalar(1)), two_h) +
                            std::pow(lag + Scalar(1), two_h) -
                            Scalar(2) * std::pow(lag, two_h));
  }
  Matrix<Scalar> sigma(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      sigma(i, j) = first_row(i > j ? i - j : j - i);
    }
  }
  try {
    return MarketModel<Scalar>(std::move(mu), SymMatrix<Scalar>(sigma), Scalar(0));
  } catch (const NotPositiveDefinite& e) {
    // The fBm increment covariance is positive definite analytically, so a
    // pivot failure here means conditioning trouble at extreme H.
    std::ostringstream msg;
    msg << "fbm covariance lost positive definiteness numerically (H="
        << spec.hurst << ", n=" << n << "): " << e.what()
        << "; consider n <= 2048";
    throw NotPositiveDefinite(msg.str());
  }
}

/// Parses a model file (see README for the format) and validates it.
MarketModel<double> load_model(const std::string& path);

}  // namespace delayhedge
