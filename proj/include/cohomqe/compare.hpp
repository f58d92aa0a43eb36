#pragma once

#include <vector>

#include "cohomqe/formula.hpp"
#include "cohomqe/motivic.hpp"
#include "cohomqe/polyring.hpp"
#include "json.hpp"

namespace cohomqe {

// Hypercover versus relative-join estimates for X = P^1 x P^n over P^n.

/// sum_{0<=p<=n} sum_{0<=j<=2(n-p)} C(2p+1, j): the hypercover estimate of b_{2n}(P^n).
BigInt hypercover_sum_example(long n);

/// b_{2n}(P^{2(2n+2)-1} x P^n) = n + 1, the telescoped join value; cross-checked
/// against the expanded Poincare polynomial.
BigInt join_side_example(long n);

struct GapRow {
  long n;
  BigInt hypercover;
  BigInt join;
  BigRat ratio;
};

std::vector<GapRow> gap_table(long n_max);

struct TelescopedSums {
  BigInt even_sum;  // sum_{2i<p} b_{2i}(pi(X)) = b_{p-1}(J)
  BigInt odd_sum;   // sum_{2i-1<p} b_{2i-1}(pi(X)) = b_{p-2}(J)
};

/// `join_betti` lists b_0, b_1, ... of J^[p]_pi(X); it must reach index p-1.
/// p must be odd.
TelescopedSums telescoped_betti_sums(const std::vector<BigInt>& join_betti, long p);

/// Betti numbers b_0..b_{len-1} read off a Poincare polynomial.
std::vector<BigInt> betti_list(const IntPoly& P, std::size_t len);

struct DefectReport {
  long threshold;                   // floor((n - r) / r)
  std::vector<int> betti;           // b_0 .. b_{threshold-1} of pi(X)
  long maximizing_p;                // argmax_p min(p, n - r - p(r - 1))
  long ambient_minus_equations;     // M - E = p + n - (p+1) r at the maximizing p
};

/// Betti numbers of pi(X) forced below the threshold when X in P^N x P^n is a
/// local complete intersection of pure dimension n - r with finite fibers
/// over P^n. The hypotheses are the caller's responsibility.
DefectReport join_defect_betti(long N, long n, long r);

/// X x_pi ... x_pi X with k factors: the free blocks are shared, the bound
/// block is repeated k times as separate blocks.
ProperFormula fiber_power_formula(const ProperFormula& psi, int k);

/// sum_{p+q=i} b_q(X^{x_pi (p+1)}) for psi with one bound block, with Betti
/// numbers from union_betti.
BigInt hypercover_betti_bound(const ProperFormula& psi, long i, const PieceOptions& opts = {});

struct PoincareReport {
  bool holds = false;
  long p = 0;
  IntPoly image_P;   // P(pi(X))
  IntPoly rhs;       // P(pi(X)) (1 + T^2 + ... + T^{2((p+1)(n+1)-1)})
  IntPoly join_mod;  // P(J^[p]_pi(X)) mod T^p
  IntPoly rhs_mod;   // rhs mod T^p
};

/// Checks P(J^[p]_pi(X)) = P(pi(X)) (1 + T^2 + ...) mod T^p for psi with free
/// blocks and one bound block. Betti numbers are the true ones (union_betti),
/// not the class polynomial.
PoincareReport verify_poincare_congruence(const ProperFormula& psi, long p,
                                          const PieceOptions& opts = {});

struct ConnectivityReport {
  bool holds = false;
  long p = 0;
  IntPoly ambient_P;                  // P(P^{(p+1)(n+1)-1})
  std::vector<BigInt> join_betti;     // b_0..b_{p-1} of the join, and b_p when p is even
  std::vector<BigInt> ambient_betti;  // b_0..b_p of the ambient space
};

/// b_j(J^[p](X)) = b_j(P^N) for j < p and b_p(J) >= b_p(P^N), psi a single-block
/// formula with nonempty realization. For odd p the ambient b_p is 0, so b_p of
/// the join is not computed.
ConnectivityReport verify_join_connectivity(const ProperFormula& psi, long p,
                                            const PieceOptions& opts = {});

nlohmann::ordered_json to_json(const PoincareReport& r);
nlohmann::ordered_json to_json(const ConnectivityReport& r);
nlohmann::ordered_json to_json(const DefectReport& r);

}  // namespace cohomqe
