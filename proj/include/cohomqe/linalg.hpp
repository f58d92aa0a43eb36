#pragma once

#include <cstddef>
#include <vector>

#include "cohomqe/polyring.hpp"

namespace cohomqe {

using RatRow = std::vector<BigRat>;
using RatMatrix = std::vector<RatRow>;

/// Reduced row-echelon form in place: pivots are 1, pivot columns are zero
/// elsewhere, zero rows are removed. Returns the rank.
std::size_t rref(RatMatrix& m);

/// Whether `row` lies in the row space of `basis`, which must be in RREF.
bool in_rowspace(const RatMatrix& basis, const RatRow& row);

/// rowspace(sub) is contained in rowspace(basis); `basis` in RREF.
bool rowspace_contains(const RatMatrix& basis, const RatMatrix& sub);

/// Three-way lexicographic comparison of matrices of equal width.
int compare(const RatMatrix& a, const RatMatrix& b);

}  // namespace cohomqe
