#pragma once

// Dense symmetric linear algebra primitives: Cholesky factorization with
// log-determinant, positive definite inversion, and general minors addressed
// by 1-based strictly increasing index vectors.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "delayhedge/errors.hpp"

namespace delayhedge {

using Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A Cholesky pivot is rejected when <= kPdToleranceScale * max diagonal
/// entry of the input, making the positive definiteness test scale invariant.
inline constexpr double kPdToleranceScale = 1e-12;

/// Dense symmetric matrix. Symmetry is enforced on construction by averaging
/// the input with its transpose; the stored entries satisfy
/// entries(i,j) == entries(j,i) exactly.
template <typename Scalar>
class SymMatrix {
public:
  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) {
      std::ostringstream msg;
      msg << "SymMatrix requires a square input, got " << a.rows() << "x"
          << a.cols();
      throw DimensionMismatch(msg.str());
    }
    if (a.rows() < 1) {
      throw DimensionMismatch("SymMatrix requires dimension >= 1");
    }
    // (x + y) / 2 == (y + x) / 2 in IEEE arithmetic, so both triangles agree
    // bit for bit.
    m_ = (a.derived() + a.derived().transpose()) * Scalar(0.5);
  }

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }

  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  const Matrix<Scalar>& mat() const { return m_; }

private:
  Matrix<Scalar> m_;
};

/// Strictly increasing list of 1-based indices; possibly empty.
class IndexVector {
public:
  IndexVector() = default;

  explicit IndexVector(std::vector<int> indices) : idx_(std::move(indices)) {
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      if (idx_[k] < 1) {
        throw InvalidParameter("IndexVector entries must be >= 1");
      }
      if (k > 0 && idx_[k] <= idx_[k - 1]) {
        throw InvalidParameter("IndexVector must be strictly increasing");
      }
    }
  }

  /// The vector (a, a+1, ..., b); empty when b < a.
  static IndexVector range(int a, int b) {
    IndexVector v;
    if (b >= a) {
      if (a < 1) throw InvalidParameter("IndexVector entries must be >= 1");
      v.idx_.reserve(static_cast<std::size_t>(b - a + 1));
      for (int k = a; k <= b; ++k) v.idx_.push_back(k);
    }
    return v;
  }

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  int operator[](std::size_t k) const { return idx_[k]; }
  const std::vector<int>& values() const { return idx_; }

  friend bool operator==(const IndexVector& x, const IndexVector& y) {
    return x.idx_ == y.idx_;
  }

private:
  std::vector<int> idx_;
};

/// The vector obtained from (a, a+1, ..., b) by omitting the index i and
/// appending the index j: (a, ..., i-1, i+1, ..., b, j). Length b - a + 1.
inline IndexVector omit_append(int a, int b, int i, int j) {
  if (!(a <= i && i <= b && b <= j)) {
    std::ostringstream msg;
    msg << "omit_append requires a <= i <= b <= j, got (" << a << ", " << b
        << ", " << i << ", " << j << ")";
    throw InvalidRange(msg.str());
  }
  if (j == b && i != b) {
    throw InvalidRange("omit_append: appending j == b after omitting i < b "
                       "is not strictly increasing");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(b - a + 1));
  for (int k = a; k <= b; ++k) {
    if (k != i) out.push_back(k);
  }
  out.push_back(j);
  return IndexVector(std::move(out));
}

template <typename Scalar>
struct CholeskyResult {
  Matrix<Scalar> factor;  // lower triangular, positive diagonal
  Scalar log_det;         // log det of the factored matrix
};

template <typename Scalar>
struct CholeskyFailure {
  Index pivot_index;  // 0-based column at which the factorization broke down
  Scalar pivot;       // offending pivot value (diagonal of the Schur update)
};

/// Cholesky factorization A = F F^T with scale-invariant pivot rejection.
/// Returns the factor and log det A on success, or the failing pivot.
template <typename Derived>
std::optional<CholeskyResult<typename Derived::Scalar>> try_cholesky_logdet(
    const Eigen::MatrixBase<Derived>& a,
    CholeskyFailure<typename Derived::Scalar>* failure = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  if (n != a.cols() || n < 1) {
    throw DimensionMismatch("cholesky_logdet requires a square matrix");
  }
  const Scalar max_diag = a.diagonal().maxCoeff();
  const Scalar tol = static_cast<Scalar>(kPdToleranceScale) *
                     (max_diag > Scalar(0) ? max_diag : Scalar(0));

  Matrix<Scalar> f = Matrix<Scalar>::Zero(n, n);
  Scalar log_det = Scalar(0);
  for (Index j = 0; j < n; ++j) {
    const Scalar d = a(j, j) - f.row(j).head(j).squaredNorm();
    if (!(d > tol)) {
      if (failure) *failure = {j, d};
      return std::nullopt;
    }
    const Scalar fjj = std::sqrt(d);
    f(j, j) = fjj;
    if (j + 1 < n) {
      f.col(j).tail(n - j - 1) =
          (a.col(j).tail(n - j - 1) -
           f.bottomLeftCorner(n - j - 1, j) * f.row(j).head(j).transpose()) /
          fjj;
    }
    log_det += std::log(d);
  }
  return CholeskyResult<Scalar>{std::move(f), log_det};
}

template <typename Derived>
CholeskyResult<typename Derived::Scalar> cholesky_logdet(
    const Eigen::MatrixBase<Derived>& a) {
  CholeskyFailure<typename Derived::Scalar> fail{0, 0};
  auto res = try_cholesky_logdet(a, &fail);
  if (!res) {
    std::ostringstream msg;
    msg << "matrix is not positive definite: pivot " << fail.pivot << " at "
        << "index " << (fail.pivot_index + 1) << " of " << a.rows();
    throw NotPositiveDefinite(msg.str());
  }
  return std::move(*res);
}

template <typename Scalar>
CholeskyResult<Scalar> cholesky_logdet(const SymMatrix<Scalar>& a) {
  return cholesky_logdet(a.mat());
}

template <typename Derived>
bool is_positive_definite(const Eigen::MatrixBase<Derived>& a) {
  return try_cholesky_logdet(a).has_value();
}

/// Solves A x = b given the Cholesky factor of A.
template <typename Scalar, typename Derived>
Vector<Scalar> cholesky_solve(const CholeskyResult<Scalar>& chol,
                              const Eigen::MatrixBase<Derived>& b) {
  Vector<Scalar> x = b;
  chol.factor.template triangularView<Eigen::Lower>().solveInPlace(x);
  chol.factor.transpose()
      .template triangularView<Eigen::Upper>()
      .solveInPlace(x);
  return x;
}

/// Inverse of a positive definite matrix via its Cholesky factor. The result
/// is exactly symmetric.
template <typename Scalar>
Matrix<Scalar> invert_pd_from_factor(const CholeskyResult<Scalar>& chol) {
  const Index n = chol.factor.rows();
  Matrix<Scalar> x = Matrix<Scalar>::Identity(n, n);
  chol.factor.template triangularView<Eigen::Lower>().solveInPlace(x);
  chol.factor.transpose()
      .template triangularView<Eigen::Upper>()
      .solveInPlace(x);
  Matrix<Scalar> sym = (x + x.transpose()) * Scalar(0.5);
  return sym;
}

template <typename Derived>
Matrix<typename Derived::Scalar> invert_pd(const Eigen::MatrixBase<Derived>& a) {
  return invert_pd_from_factor(cholesky_logdet(a));
}

template <typename Scalar>
Matrix<Scalar> invert_pd(const SymMatrix<Scalar>& a) {
  return invert_pd_from_factor(cholesky_logdet(a.mat()));
}

namespace detail {

/// Determinant of a square matrix by LU with partial pivoting.
template <typename Scalar>
Scalar det_lu(const Matrix<Scalar>& m) {
  const Index k = m.rows();
  if (k == 0) return Scalar(1);
  if (k == 1) return m(0, 0);
  return Eigen::PartialPivLU<Matrix<Scalar>>(m).determinant();
}

}  // namespace detail

/// Minor of `a`: the determinant of the submatrix selected by the 1-based
/// row indices `rows` and column indices `cols`. The empty minor equals 1.
template <typename Derived>
typename Derived::Scalar minor_det(const Eigen::MatrixBase<Derived>& a,
                                   const IndexVector& rows,
                                   const IndexVector& cols) {
  using Scalar = typename Derived::Scalar;
  if (rows.size() != cols.size()) {
    throw DimensionMismatch("minor_det requires |rows| == |cols|");
  }
  const std::size_t k = rows.size();
  if (k == 0) return Scalar(1);
  if (rows[k - 1] > a.rows() || cols[k - 1] > a.cols()) {
    throw DimensionMismatch("minor_det index exceeds matrix dimension");
  }
  Matrix<Scalar> sub(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < k; ++r) {
      sub(static_cast<Index>(r), static_cast<Index>(c)) =
          a(rows[r] - 1, cols[c] - 1);
    }
  }
  return detail::det_lu(sub);
}

template <typename Scalar>
Scalar minor_det(const SymMatrix<Scalar>& a, const IndexVector& rows,
                 const IndexVector& cols) {
  return minor_det(a.mat(), rows, cols);
}

}  // namespace delayhedge
