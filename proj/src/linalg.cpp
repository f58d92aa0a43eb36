#include "cohomqe/linalg.hpp"

namespace cohomqe {

std::size_t rref(RatMatrix& m) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && sgn(m[piv][c]) == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[r], m[piv]);
    if (m[r][c] != 1) {
      const BigRat inv = 1 / m[r][c];
      for (std::size_t k = c; k < cols; ++k)
        if (sgn(m[r][k]) != 0) m[r][k] *= inv;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      const BigRat factor = m[i][c];
      for (std::size_t k = c; k < cols; ++k)
        if (sgn(m[r][k]) != 0) m[i][k] -= factor * m[r][k];
    }
    ++r;
  }
  m.resize(r);
  return r;
}

namespace {

std::size_t pivot_of(const RatRow& row) {
  std::size_t c = 0;
  while (c < row.size() && sgn(row[c]) == 0) ++c;
  return c;
}

}  // namespace

bool in_rowspace(const RatMatrix& basis, const RatRow& row) {
  RatRow v = row;
  for (const auto& b : basis) {
    const std::size_t c = pivot_of(b);
    if (c >= v.size() || sgn(v[c]) == 0) continue;
    const BigRat factor = v[c];
    for (std::size_t k = c; k < v.size(); ++k)
      if (sgn(b[k]) != 0) v[k] -= factor * b[k];
  }
  for (const auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

bool rowspace_contains(const RatMatrix& basis, const RatMatrix& sub) {
  if (sub.size() > basis.size()) return false;
  for (const auto& row : sub)
    if (!in_rowspace(basis, row)) return false;
  return true;
}

int compare(const RatMatrix& a, const RatMatrix& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return a[i].size() < b[i].size() ? -1 : 1;
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      const int c = cmp(a[i][k], b[i][k]);
      if (c != 0) return c < 0 ? -1 : 1;
    }
  }
  return 0;
}

}  // namespace cohomqe
