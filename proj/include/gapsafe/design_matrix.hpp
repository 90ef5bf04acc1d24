#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace gapsafe {

using Index = std::size_t;
using Vector = std::vector<double>;

struct MaxCorrelation {
  double value = 0.0;  // max_j |x_j' v|
  Index index = 0;     // smallest j attaining it
};

/// Column-access view of an n x p design matrix.
///
/// Two layouts are supported: dense column-major and compressed sparse
/// column. Column norms are computed once at construction. The matrix may
/// also carry an implicit diagonal tail: `with_diagonal_tail(w)` yields the
/// (n + p) x p matrix [X; w I_p] without materializing the extra rows, which
/// is how the Elastic Net is reduced to a Lasso.
///
/// Instances are immutable and cheap to copy (storage is shared).
class DesignMatrix {
 public:
  static DesignMatrix dense(Index n_rows, Index n_cols,
                            std::vector<double> col_major);
  static DesignMatrix sparse(Index n_rows, Index n_cols,
                             std::vector<Index> col_ptr,
                             std::vector<Index> row_idx,
                             std::vector<double> values);

  DesignMatrix with_diagonal_tail(double weight) const;

  // Rows including the diagonal tail, if any.
  Index rows() const noexcept { return base_rows_ + (has_tail_ ? n_cols_ : 0); }
  Index cols() const noexcept { return n_cols_; }
  // Rows of the stored (non-augmented) block.
  Index base_rows() const noexcept { return base_rows_; }
  bool is_sparse() const noexcept;
  bool has_tail() const noexcept { return has_tail_; }
  double tail_weight() const noexcept { return tail_weight_; }
  Index nnz() const noexcept;

  double col_norm(Index j) const;
  double col_norm_sq(Index j) const;
  std::span<const double> col_norms() const noexcept { return col_norms_; }
  // Columns with ||x_j|| == 0. Their coefficients are always zero.
  bool is_zero_column(Index j) const { return col_norm_sq(j) == 0.0; }

  double col_dot(Index j, std::span<const double> v) const;
  void axpy_col(Index j, double a, std::span<double> v) const;

  MaxCorrelation max_abs_correlation(
      std::span<const double> v,
      std::optional<std::span<const Index>> restrict_to = std::nullopt) const;

  // X' v restricted to `columns` (same order as `columns`).
  Vector correlations(std::span<const double> v,
                      std::span<const Index> columns) const;
  // X' v over all columns.
  Vector correlations(std::span<const double> v) const;
  // X beta.
  Vector multiply(std::span<const double> beta) const;

  // Densified rows() x cols() column-major copy, tail included.
  Vector to_dense() const;

  // Raw storage, for serialization. Empty spans for the other layout.
  std::span<const double> dense_values() const noexcept;
  std::span<const Index> csc_col_ptr() const noexcept;
  std::span<const Index> csc_row_idx() const noexcept;
  std::span<const double> csc_values() const noexcept;

 private:
  struct Storage;
  DesignMatrix() = default;

  void check_column(Index j) const;
  void check_vector(std::size_t size) const;
  double base_dot(Index j, const double* v) const noexcept;
  void base_axpy(Index j, double a, double* v) const noexcept;

  std::shared_ptr<const Storage> storage_;
  Index base_rows_ = 0;
  Index n_cols_ = 0;
  bool has_tail_ = false;
  double tail_weight_ = 0.0;
  std::vector<double> col_norms_;
  std::vector<double> col_norms_sq_;
};

}  // namespace gapsafe
