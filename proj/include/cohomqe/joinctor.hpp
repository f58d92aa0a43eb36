#pragma once

#include <cstdint>
#include <vector>

#include "cohomqe/formula.hpp"
#include "json.hpp"

namespace cohomqe {

/// Derived quantities of the join construction for free-block dimensions
/// e = (e_1..e_m) and bound-block dimensions f = (f_1..f_n).
///
/// Vectors indexed by level j = 1..n keep a placeholder at index 0 so the
/// code reads with the same subscripts as the recurrences:
///   d_0 = sum e_i,  N_1 = 1,  N_j = 2 N_{j-1} (d_{j-2} + 1),
///   m_j = 2 (d_{j-1} + 1)(f_j + 1) - 1,  d_j = d_{j-1} + N_j m_j.
struct JoinParams {
  int m = 0;  // free blocks
  int n = 0;  // bound blocks
  std::vector<int> e;                 // size m
  std::vector<int> f;                 // size n
  std::vector<std::int64_t> N;        // size n+1, N[0] unused (0)
  std::vector<std::int64_t> d;        // size n+1
  std::vector<std::int64_t> mj;       // size n+1, mj[0] unused (0)
  std::vector<BlockSignature> msig;   // size n+1, msig[0] = (e_1..e_m)

  /// Number of index tuples at level j: 2 d_{j-1} + 2.
  std::int64_t slots(int j) const { return 2 * d[static_cast<std::size_t>(j) - 1] + 2; }
};

JoinParams join_params(const std::vector<int>& e, const std::vector<int>& f);
JoinParams join_params(const ProperFormula& psi);

struct SizeStats {
  std::int64_t conjunct_count = 0;
  std::int64_t atom_count = 0;
  std::int64_t variable_count = 0;
  std::int64_t input_size = 0;  // node count of psi
  std::int64_t circuit_size_bound = 0;
};

/// J_{m,n}(psi): the conjunction over every index tuple (i_1..i_n) of psi with
/// bound block j placed in slot i_j of the level-j block indexed by
/// (i_1..i_{j-1}). Slot t of a level-j block occupies coordinates
/// [t (f_j+1), (t+1)(f_j+1)). Output blocks are (e_1..e_m, m_1, m_2 x N_2, ...),
/// level-j blocks ordered lexicographically by their index tuple. Conjuncts
/// are ordered by index tuple and never deduplicated.
ProperFormula build_join_formula(const ProperFormula& psi, const JoinParams& params);

/// Serial reference for build_join_formula; same output.
ProperFormula build_join_formula_serial(const ProperFormula& psi, const JoinParams& params);

/// J^[p]_pi(R(psi)): psi has free blocks and exactly one bound block of
/// dimension n; the result joins p+1 copies of the bound block into one block
/// of dimension (p+1)(n+1)-1. p = 0 returns psi's matrix unchanged.
ProperFormula relative_join_formula(const ProperFormula& psi, int p);

/// J(X_0, ..., X_p) for single-block formulas; block i lands at contiguous
/// offset sum_{k<i} (n_k + 1) of one block of dimension sum (n_i + 1) - 1.
ProperFormula multijoin_formula(const std::vector<ProperFormula>& parts);

SizeStats join_size_stats(const ProperFormula& psi, const JoinParams& params);

nlohmann::ordered_json params_to_json(const JoinParams& p);
nlohmann::ordered_json stats_to_json(const SizeStats& s);

}  // namespace cohomqe
