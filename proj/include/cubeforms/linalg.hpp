// Exact rational linear algebra: incremental sparse echelon spans over
// form coordinates, and small dense matrices.

#pragma once

#include "cubeforms/forms.hpp"

#include <map>
#include <optional>
#include <vector>

namespace cubeforms {

/// Coordinate of a DiffForm in the monomial basis: (sigma, exponents).
struct FormCoord {
  std::vector<int> sigma;
  std::vector<int> exponents;
  auto operator<=>(const FormCoord&) const = default;
};

using SparseVector = std::map<FormCoord, Rational>;

SparseVector coordinates(const DiffForm& f);

/// Span of a set of forms, kept in semi-echelon form: every stored row is
/// normalized so that its smallest coordinate (the pivot) has coefficient 1,
/// and pivots are distinct.
class ExactSpan {
 public:
  ExactSpan() = default;
  explicit ExactSpan(const std::vector<DiffForm>& generators);

  /// Returns true if f was independent of the current span.
  bool insert(const DiffForm& f);
  bool contains(const DiffForm& f) const;
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  SparseVector reduce(SparseVector v) const;

  std::map<FormCoord, SparseVector> rows_;
};

/// Dense row-major rational matrix.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  static RationalMatrix identity(int n);
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  bool operator==(const RationalMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

int rank(RationalMatrix m);
Rational determinant(RationalMatrix m);
/// Exact inverse, or nullopt if singular.
std::optional<RationalMatrix> inverse(const RationalMatrix& m);

}  // namespace cubeforms
