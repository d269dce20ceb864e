#include "cubeforms/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace cubeforms {

SparseVector coordinates(const DiffForm& f) {
  SparseVector v;
  for (const auto& [s, p] : f.components())
    for (const auto& [m, c] : p.terms()) v.emplace(FormCoord{s.entries, m.exponents}, c);
  return v;
}

ExactSpan::ExactSpan(const std::vector<DiffForm>& generators) {
  for (const auto& g : generators) insert(g);
}

SparseVector ExactSpan::reduce(SparseVector v) const {
  auto it = v.begin();
  while (it != v.end()) {
    auto row = rows_.find(it->first);
    if (row == rows_.end()) {
      ++it;
      continue;
    }
    const FormCoord key = it->first;
    const Rational factor = it->second;
    // row entries are all >= key, so only the tail of v changes
    for (const auto& [c, val] : row->second) {
      auto [pos, inserted] = v.try_emplace(c, 0);
      pos->second -= factor * val;
      if (sgn(pos->second) == 0) v.erase(pos);
    }
    it = v.upper_bound(key);
  }
  return v;
}

bool ExactSpan::insert(const DiffForm& f) {
  SparseVector v = reduce(coordinates(f));
  if (v.empty()) return false;
  const Rational lead = v.begin()->second;
  for (auto& [c, val] : v) val /= lead;
  FormCoord pivot = v.begin()->first;
  rows_.emplace(std::move(pivot), std::move(v));
  return true;
}

bool ExactSpan::contains(const DiffForm& f) const {
  return reduce(coordinates(f)).empty();
}

// ------------------------------------------------------------------ dense

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw std::domain_error("matrix product: shape mismatch");
  RationalMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int l = 0; l < a.cols(); ++l) {
      if (sgn(a(i, l)) == 0) continue;
      for (int j = 0; j < b.cols(); ++j)
        if (sgn(b(l, j)) != 0) c(i, j) += a(i, l) * b(l, j);
    }
  return c;
}

namespace {

// Gaussian elimination to row echelon form in place. Returns the rank and the
// sign of the row permutation applied. `aug` receives the same row operations.
int eliminate(RationalMatrix& m, RationalMatrix* aug, int& perm_sign) {
  perm_sign = 1;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pivot = -1;
    for (int i = row; i < m.rows(); ++i)
      if (sgn(m(i, col)) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != row) {
      for (int j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(row, j));
      if (aug)
        for (int j = 0; j < aug->cols(); ++j) std::swap((*aug)(pivot, j), (*aug)(row, j));
      perm_sign = -perm_sign;
    }
    const Rational inv = 1 / m(row, col);
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || sgn(m(i, col)) == 0) continue;
      if (!aug && i < row) continue;
      const Rational factor = m(i, col) * inv;
      for (int j = col; j < m.cols(); ++j)
        if (sgn(m(row, j)) != 0) m(i, j) -= factor * m(row, j);
      if (aug)
        for (int j = 0; j < aug->cols(); ++j)
          if (sgn((*aug)(row, j)) != 0) (*aug)(i, j) -= factor * (*aug)(row, j);
    }
    ++row;
  }
  return row;
}

}  // namespace

int rank(RationalMatrix m) {
  int sign = 1;
  return eliminate(m, nullptr, sign);
}

Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::domain_error("determinant: matrix not square");
  int sign = 1;
  if (eliminate(m, nullptr, sign) < m.rows()) return 0;
  Rational det = sign;
  for (int i = 0; i < m.rows(); ++i) det *= m(i, i);
  return det;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw std::domain_error("inverse: matrix not square");
  RationalMatrix work = m;
  RationalMatrix inv = RationalMatrix::identity(m.rows());
  int sign = 1;
  if (eliminate(work, &inv, sign) < m.rows()) return std::nullopt;
  for (int i = 0; i < m.rows(); ++i) {
    const Rational d = 1 / work(i, i);
    for (int j = 0; j < inv.cols(); ++j) inv(i, j) *= d;
  }
  return inv;
}

}  // namespace cubeforms
