#include "gapsafe/design_matrix.hpp"

#include <cmath>
#include <string>

#include "gapsafe/errors.hpp"

namespace gapsafe {

struct DesignMatrix::Storage {
  bool sparse = false;
  std::vector<double> dense;  // column-major
  std::vector<Index> col_ptr;
  std::vector<Index> row_idx;
  std::vector<double> values;
};

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw ParameterError(std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

DesignMatrix DesignMatrix::dense(Index n_rows, Index n_cols,
                                 std::vector<double> col_major) {
  if (n_rows == 0 || n_cols == 0) {
    throw ParameterError("design matrix needs at least one row and one column");
  }
  if (col_major.size() != n_rows * n_cols) {
    throw ParameterError("dense storage has " + std::to_string(col_major.size()) +
                         " values, expected " + std::to_string(n_rows * n_cols));
  }
  require_finite(col_major, "design matrix");

  auto storage = std::make_shared<Storage>();
  storage->dense = std::move(col_major);

  DesignMatrix m;
  m.base_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.col_norms_sq_.resize(n_cols);
  m.col_norms_.resize(n_cols);
  for (Index j = 0; j < n_cols; ++j) {
    const double* col = storage->dense.data() + j * n_rows;
    double s = 0.0;
    for (Index i = 0; i < n_rows; ++i) s += col[i] * col[i];
    m.col_norms_sq_[j] = s;
    m.col_norms_[j] = std::sqrt(s);
  }
  m.storage_ = std::move(storage);
  return m;
}

DesignMatrix DesignMatrix::sparse(Index n_rows, Index n_cols,
                                  std::vector<Index> col_ptr,
                                  std::vector<Index> row_idx,
                                  std::vector<double> values) {
  if (n_rows == 0 || n_cols == 0) {
    throw ParameterError("design matrix needs at least one row and one column");
  }
  if (col_ptr.size() != n_cols + 1) {
    throw ParameterError("CSC column pointer array must have n_cols + 1 entries");
  }
  if (col_ptr.front() != 0 || col_ptr.back() != row_idx.size() ||
      row_idx.size() != values.size()) {
    throw ParameterError("CSC arrays are inconsistent");
  }
  for (Index j = 0; j < n_cols; ++j) {
    if (col_ptr[j] > col_ptr[j + 1]) {
      throw ParameterError("CSC column pointers must be non-decreasing");
    }
    for (Index k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
      if (row_idx[k] >= n_rows) {
        throw IndexError("CSC row index " + std::to_string(row_idx[k]) +
                         " out of range in column " + std::to_string(j));
      }
      if (k > col_ptr[j] && row_idx[k] <= row_idx[k - 1]) {
        throw ParameterError("CSC row indices must be strictly increasing in column " +
                             std::to_string(j));
      }
    }
  }
  require_finite(values, "design matrix");

  auto storage = std::make_shared<Storage>();
  storage->sparse = true;
  storage->col_ptr = std::move(col_ptr);
  storage->row_idx = std::move(row_idx);
  storage->values = std::move(values);

  DesignMatrix m;
  m.base_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.col_norms_sq_.resize(n_cols);
  m.col_norms_.resize(n_cols);
  for (Index j = 0; j < n_cols; ++j) {
    double s = 0.0;
    for (Index k = storage->col_ptr[j]; k < storage->col_ptr[j + 1]; ++k) {
      s += storage->values[k] * storage->values[k];
    }
    m.col_norms_sq_[j] = s;
    m.col_norms_[j] = std::sqrt(s);
  }
  m.storage_ = std::move(storage);
  return m;
}

DesignMatrix DesignMatrix::with_diagonal_tail(double weight) const {
  if (has_tail_) throw ParameterError("matrix already carries a diagonal tail");
  if (!std::isfinite(weight) || weight < 0.0) {
    throw ParameterError("diagonal tail weight must be finite and non-negative");
  }
  DesignMatrix m = *this;
  m.has_tail_ = true;
  m.tail_weight_ = weight;
  const double w2 = weight * weight;
  for (Index j = 0; j < n_cols_; ++j) {
    m.col_norms_sq_[j] = col_norms_sq_[j] + w2;
    m.col_norms_[j] = std::sqrt(m.col_norms_sq_[j]);
  }
  return m;
}

bool DesignMatrix::is_sparse() const noexcept { return storage_->sparse; }

Index DesignMatrix::nnz() const noexcept {
  return storage_->sparse ? storage_->values.size() : storage_->dense.size();
}

double DesignMatrix::col_norm(Index j) const {
  check_column(j);
  return col_norms_[j];
}

double DesignMatrix::col_norm_sq(Index j) const {
  check_column(j);
  return col_norms_sq_[j];
}

void DesignMatrix::check_column(Index j) const {
  if (j >= n_cols_) {
    throw IndexError("column " + std::to_string(j) + " out of range (p = " +
                     std::to_string(n_cols_) + ")");
  }
}

void DesignMatrix::check_vector(std::size_t size) const {
  if (size != rows()) {
    throw ParameterError("vector length " + std::to_string(size) +
                         " does not match matrix rows " + std::to_string(rows()));
  }
}

double DesignMatrix::base_dot(Index j, const double* v) const noexcept {
  const Storage& s = *storage_;
  double acc = 0.0;
  if (s.sparse) {
    for (Index k = s.col_ptr[j]; k < s.col_ptr[j + 1]; ++k) {
      acc += s.values[k] * v[s.row_idx[k]];
    }
  } else {
    const double* col = s.dense.data() + j * base_rows_;
    for (Index i = 0; i < base_rows_; ++i) acc += col[i] * v[i];
  }
  if (has_tail_) acc += tail_weight_ * v[base_rows_ + j];
  return acc;
}

void DesignMatrix::base_axpy(Index j, double a, double* v) const noexcept {
  const Storage& s = *storage_;
  if (s.sparse) {
    for (Index k = s.col_ptr[j]; k < s.col_ptr[j + 1]; ++k) {
      v[s.row_idx[k]] += a * s.values[k];
    }
  } else {
    const double* col = s.dense.data() + j * base_rows_;
    for (Index i = 0; i < base_rows_; ++i) v[i] += a * col[i];
  }
  if (has_tail_) v[base_rows_ + j] += a * tail_weight_;
}

double DesignMatrix::col_dot(Index j, std::span<const double> v) const {
  check_column(j);
  check_vector(v.size());
  return base_dot(j, v.data());
}

void DesignMatrix::axpy_col(Index j, double a, std::span<double> v) const {
  check_column(j);
  check_vector(v.size());
  if (a == 0.0) return;
  base_axpy(j, a, v.data());
}

MaxCorrelation DesignMatrix::max_abs_correlation(
    std::span<const double> v,
    std::optional<std::span<const Index>> restrict_to) const {
  check_vector(v.size());
  MaxCorrelation best{-1.0, 0};
  auto consider = [&](Index j) {
    const double c = std::abs(base_dot(j, v.data()));
    if (c > best.value || (c == best.value && j < best.index)) {
      best = {c, j};
    }
  };
  if (restrict_to) {
    if (restrict_to->empty()) {
      throw ParameterError("max_abs_correlation: empty column restriction");
    }
    for (Index j : *restrict_to) {
      check_column(j);
      consider(j);
    }
  } else {
    for (Index j = 0; j < n_cols_; ++j) consider(j);
  }
  return best;
}

Vector DesignMatrix::correlations(std::span<const double> v,
                                  std::span<const Index> columns) const {
  check_vector(v.size());
  Vector out(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    check_column(columns[k]);
    out[k] = base_dot(columns[k], v.data());
  }
  return out;
}

Vector DesignMatrix::correlations(std::span<const double> v) const {
  check_vector(v.size());
  Vector out(n_cols_);
  for (Index j = 0; j < n_cols_; ++j) out[j] = base_dot(j, v.data());
  return out;
}

Vector DesignMatrix::multiply(std::span<const double> beta) const {
  if (beta.size() != n_cols_) {
    throw ParameterError("coefficient vector length does not match matrix columns");
  }
  Vector out(rows(), 0.0);
  for (Index j = 0; j < n_cols_; ++j) {
    if (beta[j] != 0.0) base_axpy(j, beta[j], out.data());
  }
  return out;
}

Vector DesignMatrix::to_dense() const {
  const Index n = rows();
  Vector out(n * n_cols_, 0.0);
  for (Index j = 0; j < n_cols_; ++j) {
    base_axpy(j, 1.0, out.data() + j * n);
  }
  return out;
}

std::span<const double> DesignMatrix::dense_values() const noexcept {
  return storage_->sparse ? std::span<const double>{} : std::span<const double>(storage_->dense);
}
std::span<const Index> DesignMatrix::csc_col_ptr() const noexcept {
  return storage_->col_ptr;
}
std::span<const Index> DesignMatrix::csc_row_idx() const noexcept {
  return storage_->row_idx;
}
std::span<const double> DesignMatrix::csc_values() const noexcept {
  return storage_->values;
}

}  // namespace gapsafe
