#pragma once

#include <utility>
#include <vector>

#include "hyperexp/scalar.hpp"

namespace hyperexp {

/// Dense row-major matrix over Q(i).
using ExactMatrix = std::vector<std::vector<Scalar>>;

/// Reduced row echelon form in place; returns pivot column per pivot row.
inline std::vector<int> rref(ExactMatrix& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const size_t rows = m.size(), cols = m[0].size();
  size_t row = 0;
  for (size_t c = 0; c < cols && row < rows; ++c) {
    size_t p = row;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[row]);
    Scalar inv = Scalar(1) / m[row][c];
    for (size_t k = c; k < cols; ++k) m[row][k] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == row || m[i][c].is_zero()) continue;
      Scalar f = m[i][c];
      for (size_t k = c; k < cols; ++k) {
        if (!m[row][k].is_zero()) m[i][k] -= f * m[row][k];
      }
    }
    pivots.push_back(static_cast<int>(c));
    ++row;
  }
  return pivots;
}

inline int rank(ExactMatrix m) { return static_cast<int>(rref(m).size()); }

/// Basis of {v : m v = 0}; each vector has a 1 in its free column.
inline std::vector<std::vector<Scalar>> nullspace(ExactMatrix m, size_t cols) {
  std::vector<std::vector<Scalar>> out;
  if (m.empty()) {
    for (size_t c = 0; c < cols; ++c) {
      std::vector<Scalar> v(cols);
      v[c] = Scalar(1);
      out.push_back(std::move(v));
    }
    return out;
  }
  std::vector<int> piv = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (int p : piv) is_pivot[p] = true;
  for (size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Scalar> v(cols);
    v[f] = Scalar(1);
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace hyperexp
