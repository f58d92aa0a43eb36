#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

namespace cohomqe {

using BigInt = mpz_class;
using BigRat = mpq_class;

/// Dense univariate polynomial in T over arbitrary-precision integers.
///
/// Coefficients are stored in ascending order and kept normalized: the highest
/// stored coefficient is nonzero, and the zero polynomial has no coefficients.
/// Equality is therefore plain coefficient-vector equality.
class IntPoly {
 public:
  IntPoly() = default;
  IntPoly(std::initializer_list<long> coeffs);
  explicit IntPoly(std::vector<BigInt> coeffs);

  static IntPoly constant(const BigInt& c);
  static IntPoly monomial(const BigInt& c, std::size_t exponent);

  /// -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  /// Coefficient of T^i; zero past the degree.
  BigInt coeff(std::size_t i) const;
  const std::vector<BigInt>& coeffs() const noexcept { return coeffs_; }

  IntPoly& operator+=(const IntPoly& other);
  IntPoly& operator-=(const IntPoly& other);
  IntPoly& operator*=(const IntPoly& other);
  IntPoly& operator*=(const BigInt& scalar);

  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(IntPoly a, const BigInt& s) { return a *= s; }
  friend IntPoly operator-(IntPoly a);

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const IntPoly& a, const IntPoly& b) { return !(a == b); }

  /// Human-readable form, e.g. "1 - 2*T + T^3".
  std::string to_string(char var = 'T') const;

 private:
  void normalize();

  std::vector<BigInt> coeffs_;
};

/// The dimension tuple (n_1, ..., n_m) of a product of projective spaces.
struct BlockSignature {
  std::vector<int> dims;

  BlockSignature() = default;
  BlockSignature(std::initializer_list<int> d) : dims(d) {}
  explicit BlockSignature(std::vector<int> d) : dims(std::move(d)) {}

  std::size_t size() const noexcept { return dims.size(); }
  /// |n| = sum of the block dimensions.
  long total() const;
  /// Number of homogeneous coordinates, sum of (n_i + 1).
  long coordinate_count() const;

  friend bool operator==(const BlockSignature&, const BlockSignature&) = default;
  friend auto operator<=>(const BlockSignature&, const BlockSignature&) = default;
};

std::string to_string(const BlockSignature& sig);

/// T^e * q(1/T). Throws DegreeTooHigh when deg(q) > e.
IntPoly poly_reverse(const IntPoly& q, long e);
/// Drops every coefficient of index greater than m.
IntPoly poly_trunc(const IntPoly& q, long m);
BigInt poly_eval_int(const IntPoly& q, const BigInt& z);
/// prod_i (1 + T + ... + T^{n_i}), the pseudo-Poincare polynomial of P^n.
IntPoly qpoly_multiproj(const BlockSignature& sig);
/// P^even(T) - T P^odd(T).
IntPoly pseudo(const IntPoly& p);
/// (1 - T)^n.
IntPoly one_minus_t_pow(long n);
/// q(T^2); maps a class in L to a Poincare polynomial.
IntPoly substitute_square(const IntPoly& q);

bool is_palindromic(const IntPoly& q);

/// JSON array of decimal strings, ascending degree. Zero serializes as ["0"].
nlohmann::json poly_to_json(const IntPoly& q);
/// Accepts decimal strings (and plain integers for convenience).
IntPoly poly_from_json(const nlohmann::json& j);

}  // namespace cohomqe
