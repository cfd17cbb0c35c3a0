#pragma once

// Unique splitting Theta = R + Gamma of a precision matrix, where R is the
// inverse of a banded positive definite matrix of half-width D and Gamma is
// symmetric with zeros on that band. R agrees with Theta on the band; each
// entry outside it is pinned by a vanishing (D+1)-minor condition and filled
// by the band recursion, one diagonal at a time.

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "delayhedge/matrix_core.hpp"

namespace delayhedge {

template <typename Scalar>
struct BandDecomposition {
  int delay;                // band half-width D
  SymMatrix<Scalar> r;      // R = Qhat^{-1}
  SymMatrix<Scalar> gamma;  // anti-banded remainder, exact zeros for |i-j| <= D
  Scalar q_logdet;          // log|Qhat| = -log|R|
};

namespace detail {

template <typename Scalar>
void check_delay(const SymMatrix<Scalar>& theta, int delay) {
  if (delay < 0 || delay > static_cast<int>(theta.rows()) - 1) {
    std::ostringstream msg;
    msg << "delay must lie in [0, n-1] = [0, " << theta.rows() - 1
        << "], got " << delay;
    throw InvalidParameter(msg.str());
  }
}

/// Copies the band |i-j| <= delay of theta into a zero matrix.
template <typename Scalar>
Matrix<Scalar> band_part(const Matrix<Scalar>& theta, int delay) {
  const Index n = theta.rows();
  Matrix<Scalar> r = Matrix<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index lo = j > delay ? j - delay : 0;
    const Index hi = j + delay < n - 1 ? j + delay : n - 1;
    for (Index i = lo; i <= hi; ++i) r(i, j) = theta(i, j);
  }
  return r;
}

/// Zeroes the band |i-j| <= delay of g in place.
template <typename Scalar>
void clear_band(Matrix<Scalar>& g, int delay) {
  const Index n = g.rows();
  for (Index j = 0; j < n; ++j) {
    const Index lo = j > delay ? j - delay : 0;
    const Index hi = j + delay < n - 1 ? j + delay : n - 1;
    for (Index i = lo; i <= hi; ++i) g(i, j) = 0;
  }
}

template <typename Scalar>
BandDecomposition<Scalar> finish_decomposition(const SymMatrix<Scalar>& theta,
                                               Matrix<Scalar> r, int delay) {
  Matrix<Scalar> gamma = theta.mat() - r;
  clear_band(gamma, delay);

  auto chol_r = try_cholesky_logdet(r);
  if (!chol_r) {
    throw ResultNotPD("band extension R is not positive definite");
  }
  return BandDecomposition<Scalar>{delay, SymMatrix<Scalar>(std::move(r)),
                                   SymMatrix<Scalar>(std::move(gamma)),
                                   -chol_r->log_det};
}

}  // namespace detail

/// D = 0 closed form: R is the diagonal of Theta and Gamma its off-diagonal
/// part, so log|Qhat| = -sum_i log Theta_ii.
template <typename Scalar>
BandDecomposition<Scalar> decompose_closed_form_d0(const SymMatrix<Scalar>& theta) {
  cholesky_logdet(theta.mat());
  const Index n = theta.rows();
  Matrix<Scalar> r = Matrix<Scalar>::Zero(n, n);
  r.diagonal() = theta.mat().diagonal();

  Matrix<Scalar> gamma = theta.mat() - r;
  gamma.diagonal().setZero();

  Scalar q_logdet = Scalar(0);
  for (Index i = 0; i < n; ++i) q_logdet -= std::log(theta(i, i));
  return BandDecomposition<Scalar>{0, SymMatrix<Scalar>(std::move(r)),
                                   SymMatrix<Scalar>(std::move(gamma)),
                                   q_logdet};
}

/// D = 1 closed form: R is the tridiagonal band of Theta extended by
///   R(i,j) = prod_{k=j..i-1} Theta(k,k+1) / prod_{k=j+1..i-1} Theta(k,k)
/// for i > j+1, and log|R| follows from the tridiagonal determinant identity
///   |R| = prod_i (Theta_ii Theta_{i+1,i+1} - Theta_{i,i+1}^2) / prod Theta_ii.
template <typename Scalar>
BandDecomposition<Scalar> decompose_closed_form_d1(const SymMatrix<Scalar>& theta) {
  const Index n = theta.rows();
  if (n < 2) {
    throw InvalidParameter("decompose_closed_form_d1 requires n >= 2");
  }
  cholesky_logdet(theta.mat());

  const Scalar max_diag = theta.mat().diagonal().maxCoeff();
  const Scalar tol = static_cast<Scalar>(kPdToleranceScale) * max_diag;
  for (Index i = 0; i < n; ++i) {
    if (!(theta(i, i) > tol)) {
      throw DivisionByZero("diagonal entry of Theta is numerically zero");
    }
  }

  Matrix<Scalar> r = detail::band_part(theta.mat(), 1);
  // Geometric extension column by column: each step appends one factor
  // Theta(i-1,i)/Theta(i-1,i-1), which keeps the long products stable.
  for (Index j = 0; j + 2 < n; ++j) {
    Scalar prod = theta(j, j + 1);
    for (Index i = j + 2; i < n; ++i) {
      prod *= theta(i - 1, i) / theta(i - 1, i - 1);
      r(i, j) = prod;
      r(j, i) = prod;
    }
  }

  Matrix<Scalar> gamma = theta.mat() - r;
  detail::clear_band(gamma, 1);

  Scalar logdet_r = Scalar(0);
  for (Index i = 0; i + 1 < n; ++i) {
    const Scalar two_by_two =
        theta(i, i) * theta(i + 1, i + 1) - theta(i, i + 1) * theta(i, i + 1);
    if (!(two_by_two > Scalar(0))) {
      throw ResultNotPD("tridiagonal band of Theta has a non-positive 2x2 "
                        "principal minor");
    }
    logdet_r += std::log(two_by_two);
  }
  for (Index i = 1; i + 1 < n; ++i) logdet_r -= std::log(theta(i, i));

  return BandDecomposition<Scalar>{1, SymMatrix<Scalar>(std::move(r)),
                                   SymMatrix<Scalar>(std::move(gamma)),
                                   -logdet_r};
}

/// Band recursion for general D: fills the unknown entries diagonal by
/// diagonal (m = D+1, ..., n-1; within a diagonal the entries are mutually
/// independent, computed in ascending i). The unknown R(i, i+m) solves the
/// vanishing-minor equation
///   R(i,i+m) = sum_{j=1..D} (-1)^{j+D} R(i,i+j) *
///              minor(R, [i+1:i+D], [i+1:i+D]^{i+j -> i+m})
///              / minor(R, [i+1:i+D], [i+1:i+D]),
/// with the empty minor equal to 1, so D = 0 fills plain zeros. The
/// denominator minors do not depend on m and are computed once per i.
template <typename Scalar>
BandDecomposition<Scalar> decompose_minor_recursion(const SymMatrix<Scalar>& theta,
                                                    int delay) {
  detail::check_delay(theta, delay);
  cholesky_logdet(theta.mat());

  const Index n = theta.rows();
  const int d = delay;
  Matrix<Scalar> r = detail::band_part(theta.mat(), d);

  // Denominator minors det R([i+1:i+D], [i+1:i+D]) lie inside the band, so
  // all of them are available before the fill starts. A denominator at or
  // below kPdToleranceScale of its diagonal product signals breakdown.
  const Index num_unknown_rows = n >= d + 2 ? n - d - 1 : 0;
  std::vector<Scalar> denominators(static_cast<std::size_t>(num_unknown_rows));
  if (d > 0) {
    Matrix<Scalar> sub(d, d);
    Eigen::PartialPivLU<Matrix<Scalar>> lu(d);
    for (Index i = 0; i < num_unknown_rows; ++i) {
      sub = r.block(i + 1, i + 1, d, d);
      lu.compute(sub);
      const Scalar den = lu.determinant();
      const Scalar diag_prod = sub.diagonal().prod();
      if (!(den > static_cast<Scalar>(kPdToleranceScale) * diag_prod) ||
          !(diag_prod > Scalar(0))) {
        std::ostringstream msg;
        msg << "principal minor R([" << i + 2 << ":" << i + 1 + d << "], same)"
            << " collapsed to " << den;
        throw SingularPrincipalMinor(msg.str());
      }
      denominators[static_cast<std::size_t>(i)] = den;
    }
  }

  if (d > 0) {
    Matrix<Scalar> sub(d, d);
    Eigen::PartialPivLU<Matrix<Scalar>> lu(d);
    for (Index m = d + 1; m <= n - 1; ++m) {
      for (Index i = 0; i + m < n; ++i) {
        Scalar numerator = Scalar(0);
        for (int j = 1; j <= d; ++j) {
          // Columns (i+1..i+D) \ {i+j} followed by i+m, rows i+1..i+D.
          Index c = 0;
          for (int k = 1; k <= d; ++k) {
            if (k == j) continue;
            sub.col(c++) = r.col(i + k).segment(i + 1, d);
          }
          sub.col(c) = r.col(i + m).segment(i + 1, d);
          Scalar det;
          if (d == 1) {
            det = sub(0, 0);
          } else {
            lu.compute(sub);
            det = lu.determinant();
          }
          const Scalar sign = ((j + d) % 2 == 0) ? Scalar(1) : Scalar(-1);
          numerator += sign * r(i, i + j) * det;
        }
        const Scalar value =
            numerator / denominators[static_cast<std::size_t>(i)];
        r(i, i + m) = value;
        r(i + m, i) = value;
      }
    }
  }
  // d == 0: every unknown is an empty sum over the empty minor, i.e. zero.

  return detail::finish_decomposition(theta, std::move(r), delay);
}

/// Computes the unique decomposition Theta = R + Gamma for the given delay.
/// D = 0 dispatches to the closed form; the recursion produces the same
/// matrices through the empty-minor convention.
template <typename Scalar>
BandDecomposition<Scalar> decompose(const SymMatrix<Scalar>& theta, int delay) {
  detail::check_delay(theta, delay);
  if (delay == 0) return decompose_closed_form_d0(theta);
  return decompose_minor_recursion(theta, delay);
}

}  // namespace delayhedge
