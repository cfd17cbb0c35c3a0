#pragma once

// Optimal exponential-utility strategy and value under information delay,
// plus an analytic evaluator for arbitrary band-admissible linear strategies
// (Gaussian completion of the square).

#include <cmath>
#include <sstream>
#include <utility>

#include "delayhedge/decomposition.hpp"
#include "delayhedge/models.hpp"

namespace delayhedge {

/// Linear trading strategy: position in period i is
///   gamma_i = intercept(i) + sum_{j < i} loading(i,j) X_j,
/// where X_j are realized increments. Admissibility under delay D means
/// loading(i,j) = 0 whenever i - j <= D; in particular the loading matrix is
/// strictly lower triangular.
template <typename Scalar>
struct LinearStrategy {
  int delay;
  Vector<Scalar> intercept;
  Matrix<Scalar> loading;
};

/// Checks the structural band constraint of a strategy; throws on violation.
template <typename Scalar>
void validate_strategy(const LinearStrategy<Scalar>& strat) {
  const Index n = strat.intercept.size();
  if (strat.loading.rows() != n || strat.loading.cols() != n) {
    throw DimensionMismatch("strategy loading must be n x n");
  }
  if (strat.delay < 0) {
    throw InvalidParameter("strategy delay must be nonnegative");
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i - j <= strat.delay && strat.loading(i, j) != Scalar(0)) {
        std::ostringstream msg;
        msg << "loading(" << i + 1 << "," << j + 1
            << ") must vanish for i - j <= delay = " << strat.delay;
        throw InvalidParameter(msg.str());
      }
    }
  }
}

/// Optimal expected utility and the log-determinant pieces it is built from.
/// value = -exp(-c_constant) with
/// c_constant = (logdet_sigma - logdet_q + quad_term) / 2.
template <typename Scalar>
struct ValueReport {
  Scalar value;
  Scalar c_constant;
  Scalar logdet_sigma;
  Scalar logdet_q;
  Scalar quad_term;  // mu' Theta mu
};

/// The unique optimizer: intercept Theta mu and loadings -Gamma below the
/// band. The band constraint holds structurally because Gamma vanishes on
/// |i-j| <= D.
template <typename Scalar>
LinearStrategy<Scalar> optimal_strategy(const MarketModel<Scalar>& model,
                                        const BandDecomposition<Scalar>& dec) {
  if (dec.r.rows() != model.n) {
    throw DimensionMismatch("decomposition size does not match model");
  }
  Matrix<Scalar> theta = dec.r.mat() + dec.gamma.mat();
  LinearStrategy<Scalar> strat;
  strat.delay = dec.delay;
  strat.intercept = theta * model.mu;
  strat.loading = Matrix<Scalar>::Zero(model.n, model.n);
  for (Index i = 0; i < model.n; ++i) {
    for (Index j = 0; j + dec.delay < i; ++j) {
      strat.loading(i, j) = -dec.gamma(i, j);
    }
  }
  return strat;
}

/// Optimal value -sqrt(|Qhat|/|Sigma|) exp(-mu' Theta mu / 2), assembled in
/// log space.
template <typename Scalar>
ValueReport<Scalar> optimal_value(const MarketModel<Scalar>& model,
                                  const BandDecomposition<Scalar>& dec) {
  if (dec.r.rows() != model.n) {
    throw DimensionMismatch("decomposition size does not match model");
  }
  const auto chol_sigma = cholesky_logdet(model.sigma.mat());
  ValueReport<Scalar> report;
  report.logdet_sigma = chol_sigma.log_det;
  report.logdet_q = dec.q_logdet;
  report.quad_term = model.mu.dot(cholesky_solve(chol_sigma, model.mu));
  report.c_constant = Scalar(0.5) * (report.logdet_sigma - report.logdet_q +
                                     report.quad_term);
  report.value = -std::exp(-report.c_constant);
  return report;
}

/// Closed-form optimal value for the Kac-Murdock-Szego model with mu = 0:
///   D = 0: -sqrt((1-rho^2) / (1+rho^2)^{n-2})
///   D = 1: -sqrt((1-rho^2)(1+rho^2)^{n-2} / (1+rho^2+rho^4)^{n-3})
template <typename Scalar>
Scalar value_closed_form_kms(Scalar rho, Index n, int delay) {
  if (!(rho > Scalar(0) && rho < Scalar(1))) {
    throw InvalidParameter("value_closed_form_kms requires rho in (0,1)");
  }
  if (n < 3) {
    throw InvalidParameter("value_closed_form_kms requires n >= 3");
  }
  const Scalar r2 = rho * rho;
  const Scalar log_1m = std::log1p(-r2);
  const Scalar log_1p = std::log1p(r2);
  if (delay == 0) {
    return -std::exp(Scalar(0.5) *
                     (log_1m - static_cast<Scalar>(n - 2) * log_1p));
  }
  if (delay == 1) {
    const Scalar log_1pp = std::log1p(r2 + r2 * r2);
    return -std::exp(Scalar(0.5) *
                     (log_1m + static_cast<Scalar>(n - 2) * log_1p -
                      static_cast<Scalar>(n - 3) * log_1pp));
  }
  throw InvalidParameter("value_closed_form_kms covers delay 0 and 1 only");
}

/// Expected utility -E[exp(-V)] of an arbitrary band-admissible linear
/// strategy, V = a'X + X'BX/2 with B = L + L'. For X ~ N(mu, Sigma) the
/// expectation is finite iff P = Theta + B is positive definite, in which
/// case
///   E[exp(-V)] = sqrt(|Theta|/|P|) exp(w'P^{-1}w/2 - mu'Theta mu/2),
/// w = Theta mu - a. Throws UtilityDiverges when P is not PD.
template <typename Scalar>
Scalar evaluate_linear_strategy(const MarketModel<Scalar>& model,
                                const LinearStrategy<Scalar>& strat) {
  if (strat.intercept.size() != model.n) {
    throw DimensionMismatch("strategy size does not match model");
  }
  validate_strategy(strat);

  const auto chol_sigma = cholesky_logdet(model.sigma.mat());
  const Matrix<Scalar> theta = invert_pd_from_factor(chol_sigma);

  Matrix<Scalar> p = theta + strat.loading + strat.loading.transpose();
  p = ((p + p.transpose()) * Scalar(0.5)).eval();
  const auto chol_p = try_cholesky_logdet(p);
  if (!chol_p) {
    throw UtilityDiverges("Theta + L + L' is not positive definite; the "
                          "expected utility is -infinity");
  }

  const Vector<Scalar> w = theta * model.mu - strat.intercept;
  const Scalar quad_w = w.dot(cholesky_solve(*chol_p, w));
  const Scalar quad_mu = model.mu.dot(cholesky_solve(chol_sigma, model.mu));
  const Scalar log_expectation =
      Scalar(0.5) * (quad_w - quad_mu) +
      Scalar(0.5) * (-chol_sigma.log_det - chol_p->log_det);
  return -std::exp(log_expectation);
}

}  // namespace delayhedge
