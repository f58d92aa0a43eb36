#include "cohomqe/polyring.hpp"

#include <algorithm>
#include <sstream>

#include "cohomqe/error.hpp"

namespace cohomqe {

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long c : coeffs) coeffs_.emplace_back(c);
  normalize();
}

IntPoly::IntPoly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

IntPoly IntPoly::constant(const BigInt& c) { return IntPoly(std::vector<BigInt>{c}); }

IntPoly IntPoly::monomial(const BigInt& c, std::size_t exponent) {
  std::vector<BigInt> v(exponent + 1);
  v[exponent] = c;
  return IntPoly(std::move(v));
}

void IntPoly::normalize() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

BigInt IntPoly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigInt(0); }

IntPoly& IntPoly::operator+=(const IntPoly& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  normalize();
  return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  normalize();
  return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (sgn(a.coeffs_[i]) == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      // out[i+j] += a_i * b_j without a temporary
      mpz_addmul(out[i + j].get_mpz_t(), a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
    }
  }
  return IntPoly(std::move(out));
}

IntPoly& IntPoly::operator*=(const IntPoly& other) {
  *this = *this * other;
  return *this;
}

IntPoly& IntPoly::operator*=(const BigInt& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  normalize();
  return *this;
}

IntPoly operator-(IntPoly a) {
  for (auto& c : a.coeffs_) c = -c;
  return a;
}

std::string IntPoly::to_string(char var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const BigInt& c = coeffs_[i];
    if (sgn(c) == 0) continue;
    BigInt mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    if (i == 0) {
      os << mag;
      continue;
    }
    if (mag != 1) os << mag << "*";
    os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

long BlockSignature::total() const {
  long t = 0;
  for (int d : dims) t += d;
  return t;
}

long BlockSignature::coordinate_count() const {
  long t = 0;
  for (int d : dims) t += d + 1;
  return t;
}

std::string to_string(const BlockSignature& sig) {
  std::string s = "(";
  for (std::size_t i = 0; i < sig.dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sig.dims[i]);
  }
  return s + ")";
}

IntPoly poly_reverse(const IntPoly& q, long e) {
  if (e < 0) throw Error("InvalidArgument", "reversal exponent must be nonnegative");
  if (q.degree() > e) {
    throw Error("DegreeTooHigh", "degree " + std::to_string(q.degree()) +
                                     " exceeds reversal exponent " + std::to_string(e));
  }
  std::vector<BigInt> out(static_cast<std::size_t>(e) + 1);
  const auto& c = q.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) out[static_cast<std::size_t>(e) - i] = c[i];
  return IntPoly(std::move(out));
}

IntPoly poly_trunc(const IntPoly& q, long m) {
  if (m < 0) return {};
  const auto& c = q.coeffs();
  const std::size_t keep = std::min(c.size(), static_cast<std::size_t>(m) + 1);
  return IntPoly(std::vector<BigInt>(c.begin(), c.begin() + static_cast<long>(keep)));
}

BigInt poly_eval_int(const IntPoly& q, const BigInt& z) {
  BigInt acc = 0;
  const auto& c = q.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

IntPoly qpoly_multiproj(const BlockSignature& sig) {
  IntPoly acc{1};
  for (int n : sig.dims) {
    if (n < 0) throw Error("InvalidArgument", "negative block dimension");
    acc *= IntPoly(std::vector<BigInt>(static_cast<std::size_t>(n) + 1, BigInt(1)));
  }
  return acc;
}

IntPoly pseudo(const IntPoly& p) {
  const auto& c = p.coeffs();
  std::vector<BigInt> out((c.size() + 1) / 2 + 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i % 2 == 0)
      out[i / 2] += c[i];
    else
      out[(i - 1) / 2 + 1] -= c[i];
  }
  return IntPoly(std::move(out));
}

IntPoly one_minus_t_pow(long n) {
  if (n < 0) throw Error("InvalidArgument", "negative exponent");
  std::vector<BigInt> out(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    mpz_bin_uiui(out[static_cast<std::size_t>(k)].get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(k));
    if (k % 2) out[static_cast<std::size_t>(k)] = -out[static_cast<std::size_t>(k)];
  }
  return IntPoly(std::move(out));
}

IntPoly substitute_square(const IntPoly& q) {
  if (q.is_zero()) return {};
  std::vector<BigInt> out(2 * q.coeffs().size() - 1);
  for (std::size_t i = 0; i < q.coeffs().size(); ++i) out[2 * i] = q.coeffs()[i];
  return IntPoly(std::move(out));
}

bool is_palindromic(const IntPoly& q) {
  if (q.is_zero()) return true;
  return poly_reverse(q, q.degree()) == q;
}

nlohmann::json poly_to_json(const IntPoly& q) {
  auto arr = nlohmann::json::array();
  if (q.is_zero()) {
    arr.push_back("0");
    return arr;
  }
  for (const auto& c : q.coeffs()) arr.push_back(c.get_str());
  return arr;
}

IntPoly poly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("InvalidArgument", "polynomial JSON must be an array");
  std::vector<BigInt> coeffs;
  coeffs.reserve(j.size());
  for (const auto& e : j) {
    if (e.is_string()) {
      BigInt v;
      if (v.set_str(e.get<std::string>(), 10) != 0)
        throw Error("InvalidArgument", "bad integer literal '" + e.get<std::string>() + "'");
      coeffs.push_back(v);
    } else if (e.is_number_integer()) {
      coeffs.emplace_back(e.get<long>());
    } else {
      throw Error("InvalidArgument", "polynomial coefficients must be decimal strings");
    }
  }
  return IntPoly(std::move(coeffs));
}

}  // namespace cohomqe
