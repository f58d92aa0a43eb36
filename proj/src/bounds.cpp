#include "cohomqe/bounds.hpp"

#include "cohomqe/error.hpp"

namespace cohomqe {

namespace {

BigInt ipow(const BigInt& base, long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

BigInt binom(long n, long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("InvalidArgument", what);
}

std::string call(const char* name, long a, long b, long c) {
  return std::string(name) + "(" + std::to_string(a) + "," + std::to_string(b) + "," +
         std::to_string(c) + ")";
}

void note(BoundTrace* trace, const std::string& what, const BigInt& v) {
  if (trace) trace->push_back(what + "=" + v.get_str());
}

}  // namespace

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::Bombieri:
      return "bombieri";
    case BoundMethod::AdolphsonSperber:
      return "as";
    case BoundMethod::Char0OPTM:
      return "char0";
  }
  return "?";
}

BoundMethod parse_bound_method(const std::string& s) {
  if (s == "bombieri") return BoundMethod::Bombieri;
  if (s == "as") return BoundMethod::AdolphsonSperber;
  if (s == "char0") return BoundMethod::Char0OPTM;
  throw Error("InvalidArgument", "unknown bound method '" + s + "'");
}

BigInt euler_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace) {
  require(N >= 1, "E needs N >= 1");
  require(r >= 1, "E needs r >= 1");
  require(d >= 0, "E needs d >= 0");
  BigInt v;
  switch (method) {
    case BoundMethod::Bombieri:
      v = ipow(BigInt(4 * (1 + d) + 5), N + r);
      break;
    case BoundMethod::AdolphsonSperber:
      v = ipow(BigInt(2), r) * ipow(BigInt(r + 1) + BigInt(r) * d, N);
      break;
    case BoundMethod::Char0OPTM: {
      const BigInt rd = BigInt(r) * d;
      v = ipow(BigInt(2), r) * (1 + rd) * ipow(1 + 2 * rd, 2 * N + 1);
      break;
    }
  }
  note(trace, call("E", N, r, d), v);
  return v;
}

BigInt katz_A(long N, long r, long d, BoundMethod method, BoundTrace* trace) {
  require(N >= 1, "A needs N >= 1");
  BigInt v = euler_bound(N, r, d, method, trace) + 2;
  for (long n = 1; n <= N - 1; ++n) v += 2 * euler_bound(n, r, d, method, trace);
  note(trace, call("A", N, r, d), v);
  return v;
}

BigInt katz_B(long N, long r, long d, BoundMethod method, BoundTrace* trace) {
  require(N >= 0, "B needs N >= 0");
  require(r >= 1, "B needs r >= 1");
  require(d >= 0, "B needs d >= 0");
  BigInt v = 1;
  for (long s = 1; s <= r; ++s) v += binom(r, s) * katz_A(N + 1, 1, 1 + d * s, method, trace);
  note(trace, call("B", N, r, d), v);
  return v;
}

BigInt affine_betti_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace) {
  require(N >= 1, "affine bound needs N >= 1");
  return katz_B(N, r, d, method, trace);
}

BigInt projective_betti_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace) {
  require(N >= 1, "projective bound needs N >= 1");
  BigInt v = 1;
  for (long n = 1; n <= N; ++n) v += katz_B(n, r, d, method, trace);
  return v;
}

BigInt affine_h_bound_char0(long N, long d) {
  require(N >= 1, "N >= 1");
  require(d >= 1, "d >= 1");
  return BigInt(d) * ipow(BigInt(2 * d - 1), 2 * N - 1);
}

namespace {

// sum_{0<=i<=imax, 0<=j<=jmax} B~(i+j); cell (i,j) depends only on i+j.
BigInt lattice_sum(long imax, long jmax, long r, long deg, BoundMethod method, BoundTrace* trace) {
  BigInt total = 0;
  for (long k = 0; k <= imax + jmax; ++k) {
    const long lo = std::max(0L, k - jmax);
    const long hi = std::min(imax, k);
    if (hi < lo) continue;
    const BigInt cells = hi - lo + 1;
    total += cells * (k == 0 ? BigInt(1) : katz_B(k, r, deg, method, trace));
  }
  return total;
}

}  // namespace

BigInt biprojective_bound(long N, long M, long r, long d1, long d2, BoundMethod method,
                          BoundTrace* trace) {
  require(N >= 0 && M >= 0, "biprojective bound needs N, M >= 0");
  require(r >= 1, "biprojective bound needs r >= 1");
  require(d1 >= 0 && d2 >= 0, "degrees must be nonnegative");
  return lattice_sum(N, M, r, d1 + d2, method, trace);
}

ImageBound image_betti_bound(long N, long M, long r, long d1, long d2, long p, BoundMethod method,
                             BoundTrace* trace) {
  require(p >= 1, "image bound needs p >= 1");
  require(N >= 0 && M >= 0, "image bound needs N, M >= 0");
  require(r >= 1, "image bound needs r >= 1");
  require(d1 >= 0 && d2 >= 0, "degrees must be nonnegative");
  const BigInt sum = lattice_sum((N + 1) * (p + 1) - 1, M, r * (p + 1), d1 + d2, method, trace);
  ImageBound out;
  out.exact = BigRat(2 * sum, BigInt(p));
  out.exact.canonicalize();
  mpz_cdiv_q(out.ceiling.get_mpz_t(), out.exact.get_num_mpz_t(), out.exact.get_den_mpz_t());
  return out;
}

}  // namespace cohomqe
