#pragma once

#include <string>
#include <vector>

#include "cohomqe/polyring.hpp"

namespace cohomqe {

/// Universal bound E(N, r, d) on |chi_c| of an affine set cut out by r
/// equations of degree <= d in A^N.
enum class BoundMethod {
  Bombieri,           // (4(1+d)+5)^{N+r}
  AdolphsonSperber,   // 2^r (r+1+rd)^N
  Char0OPTM,          // 2^r (1+rd)(1+2rd)^{2N+1}; characteristic zero only
};

std::string to_string(BoundMethod m);
BoundMethod parse_bound_method(const std::string& s);  // "bombieri" | "as" | "char0"

/// Optional record of the intermediate E/A/B evaluations, in call order.
using BoundTrace = std::vector<std::string>;

BigInt euler_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace = nullptr);

/// A(N,r,d) = E(N,r,d) + 2 + 2 sum_{n=1}^{N-1} E(n,r,d).
BigInt katz_A(long N, long r, long d, BoundMethod method, BoundTrace* trace = nullptr);

/// B(N,r,d) = 1 + sum over nonempty S of {1..r} of A(N+1, 1, 1 + d|S|),
/// summed as 1 + sum_s C(r,s) A(N+1, 1, 1 + d s).
BigInt katz_B(long N, long r, long d, BoundMethod method, BoundTrace* trace = nullptr);

/// Bound on h_c of an affine set in A^N: B(N,r,d).
BigInt affine_betti_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace = nullptr);

/// Bound on h of a projective set in P^N: 1 + sum_{n=1}^N B(n,r,d).
BigInt projective_betti_bound(long N, long r, long d, BoundMethod method, BoundTrace* trace = nullptr);

/// Characteristic-zero bound on h (not h_c): d (2d-1)^{2N-1}.
BigInt affine_h_bound_char0(long N, long d);

/// X in P^N x P^M cut out by r bihomogeneous equations of bidegree (d1, d2):
/// sum_{i<=N, j<=M} B~(i+j) with B~(0) = 1, B~(k) = B(k, r, d1+d2).
BigInt biprojective_bound(long N, long M, long r, long d1, long d2, BoundMethod method,
                          BoundTrace* trace = nullptr);

struct ImageBound {
  BigRat exact;
  BigInt ceiling;
};

/// Bound on sum_{h<p} b_h(pi(X)) through the p-fold relative join:
/// (2/p) sum_{i <= (N+1)(p+1)-1, j <= M} B~(i+j) with r(p+1) equations and
/// degree d1+d2.
ImageBound image_betti_bound(long N, long M, long r, long d1, long d2, long p, BoundMethod method,
                             BoundTrace* trace = nullptr);

}  // namespace cohomqe
