#pragma once
/** @file banded.hpp
 *  @brief Banded matrix storage and an LU factorization with partial pivoting.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace refugia {

/// Raised when a factorization meets a (numerically) zero pivot.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(Eigen::Index pivot)
      : std::runtime_error("singular matrix: zero pivot at row " + std::to_string(pivot)),
        pivot_(pivot) {}
  Eigen::Index pivot() const noexcept { return pivot_; }

 private:
  Eigen::Index pivot_;
};

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
/// Entry (i, j) lives at band(upper + i - j, j), the LAPACK general-band layout.
template <typename Scalar>
class BandedMatrix {
 public:
  using Index = Eigen::Index;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using DenseType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BandedMatrix() = default;
  BandedMatrix(Index n, Index lower, Index upper)
      : n_(n), lower_(lower), upper_(upper), band_(DenseType::Zero(lower + upper + 1, n)) {}

  Index rows() const noexcept { return n_; }
  Index cols() const noexcept { return n_; }
  Index lower() const noexcept { return lower_; }
  Index upper() const noexcept { return upper_; }

  bool in_band(Index i, Index j) const noexcept {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= upper_ && i - j <= lower_;
  }

  Scalar operator()(Index i, Index j) const {
    return in_band(i, j) ? band_(upper_ + i - j, j) : Scalar(0);
  }

  Scalar& coeffRef(Index i, Index j) {
    if (!in_band(i, j)) throw std::out_of_range("banded entry outside the band");
    return band_(upper_ + i - j, j);
  }

  const DenseType& storage() const noexcept { return band_; }

  VectorType operator*(const VectorType& x) const {
    VectorType y = VectorType::Zero(n_);
    for (Index i = 0; i < n_; ++i) {
      const Index j0 = std::max<Index>(0, i - lower_);
      const Index j1 = std::min<Index>(n_ - 1, i + upper_);
      Scalar s(0);
      for (Index j = j0; j <= j1; ++j) s += band_(upper_ + i - j, j) * x(j);
      y(i) = s;
    }
    return y;
  }

  /// |A| |x|, the magnitude against which rounding in A x is measured.
  VectorType abs_times(const VectorType& x) const {
    VectorType y = VectorType::Zero(n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = std::max<Index>(0, i - lower_); j <= std::min<Index>(n_ - 1, i + upper_); ++j)
        y(i) += std::abs(band_(upper_ + i - j, j) * x(j));
    return y;
  }

  DenseType to_dense() const {
    DenseType d = DenseType::Zero(n_, n_);
    for (Index j = 0; j < n_; ++j)
      for (Index i = std::max<Index>(0, j - upper_); i <= std::min<Index>(n_ - 1, j + lower_); ++i)
        d(i, j) = band_(upper_ + i - j, j);
    return d;
  }

  /// Maximum absolute row sum.
  Scalar norm_inf() const {
    Scalar best(0);
    for (Index i = 0; i < n_; ++i) {
      Scalar s(0);
      for (Index j = std::max<Index>(0, i - lower_); j <= std::min<Index>(n_ - 1, i + upper_); ++j)
        s += std::abs(band_(upper_ + i - j, j));
      best = std::max(best, s);
    }
    return best;
  }

  Scalar max_abs() const { return band_.cwiseAbs().maxCoeff(); }

  void add_to_diagonal(const VectorType& d) {
    for (Index i = 0; i < n_; ++i) band_(upper_, i) += d(i);
  }

  /// Multiplies row i by s(i).
  void scale_rows(const VectorType& s) {
    for (Index j = 0; j < n_; ++j)
      for (Index i = std::max<Index>(0, j - upper_); i <= std::min<Index>(n_ - 1, j + lower_); ++i)
        band_(upper_ + i - j, j) *= s(i);
  }

 private:
  Index n_ = 0;
  Index lower_ = 0;
  Index upper_ = 0;
  DenseType band_;
};

/// Banded LU with partial pivoting (unblocked gbtf2 scheme).
template <typename Scalar>
class BandedLU {
 public:
  using Index = Eigen::Index;
  using VectorType = typename BandedMatrix<Scalar>::VectorType;
  using DenseType = typename BandedMatrix<Scalar>::DenseType;

  BandedLU() = default;
  explicit BandedLU(const BandedMatrix<Scalar>& a) { compute(a); }

  /// Throws SingularMatrixError when a pivot is zero relative to the matrix scale.
  void compute(const BandedMatrix<Scalar>& a) {
    n_ = a.rows();
    kl_ = a.lower();
    ku_ = a.upper();
    work_ = DenseType::Zero(2 * kl_ + ku_ + 1, n_);
    work_.bottomRows(kl_ + ku_ + 1) = a.storage();
    pivots_.assign(static_cast<std::size_t>(n_), 0);
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * a.max_abs();
    min_pivot_ = std::numeric_limits<Scalar>::infinity();

    Index ju = 0;
    for (Index j = 0; j < n_; ++j) {
      const Index km = std::min(kl_, n_ - 1 - j);
      Index p = 0;
      Scalar best = std::abs(at(j, j));
      for (Index r = 1; r <= km; ++r) {
        if (std::abs(at(j + r, j)) > best) {
          best = std::abs(at(j + r, j));
          p = r;
        }
      }
      pivots_[static_cast<std::size_t>(j)] = j + p;
      if (!(best > tiny)) throw SingularMatrixError(j);
      min_pivot_ = std::min(min_pivot_, best);
      ju = std::max(ju, std::min(j + ku_ + p, n_ - 1));
      if (p != 0)
        for (Index c = j; c <= ju; ++c) std::swap(at(j, c), at(j + p, c));
      const Scalar pivot = at(j, j);
      for (Index r = 1; r <= km; ++r) at(j + r, j) /= pivot;
      for (Index c = j + 1; c <= ju; ++c) {
        const Scalar u = at(j, c);
        if (u == Scalar(0)) continue;
        for (Index r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * u;
      }
    }
  }

  VectorType solve(const VectorType& rhs) const {
    VectorType x = rhs;
    for (Index j = 0; j < n_; ++j) {
      const Index p = pivots_[static_cast<std::size_t>(j)];
      if (p != j) std::swap(x(j), x(p));
      const Index km = std::min(kl_, n_ - 1 - j);
      for (Index r = 1; r <= km; ++r) x(j + r) -= at(j + r, j) * x(j);
    }
    const Index kv = kl_ + ku_;
    for (Index j = n_ - 1; j >= 0; --j) {
      Scalar s = x(j);
      for (Index c = j + 1; c <= std::min(n_ - 1, j + kv); ++c) s -= at(j, c) * x(c);
      x(j) = s / at(j, j);
    }
    return x;
  }

  Index rows() const noexcept { return n_; }
  /// Smallest pivot magnitude met during the factorization.
  Scalar min_pivot() const noexcept { return min_pivot_; }

 private:
  Scalar& at(Index i, Index c) { return work_(kl_ + ku_ + i - c, c); }
  Scalar at(Index i, Index c) const { return work_(kl_ + ku_ + i - c, c); }

  Index n_ = 0;
  Index kl_ = 0;
  Index ku_ = 0;
  DenseType work_;
  std::vector<Index> pivots_;
  Scalar min_pivot_ = Scalar(0);
};

}  // namespace refugia
