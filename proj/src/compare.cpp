#include "cohomqe/compare.hpp"

#include <algorithm>

#include "cohomqe/error.hpp"
#include "cohomqe/joinctor.hpp"

namespace cohomqe {

BigInt hypercover_sum_example(long n) {
  if (n < 1) throw Error("InvalidArgument", "n must be >= 1");
  BigInt total = 0;
  for (long p = 0; p <= n; ++p) {
    for (long j = 0; j <= 2 * (n - p) && j <= 2 * p + 1; ++j) {
      BigInt c;
      mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(2 * p + 1), static_cast<unsigned long>(j));
      total += c;
    }
  }
  return total;
}

BigInt join_side_example(long n) {
  if (n < 1) throw Error("InvalidArgument", "n must be >= 1");
  const int big = static_cast<int>(2 * (2 * n + 2) - 1);
  const IntPoly P = substitute_square(qpoly_multiproj(BlockSignature{big, static_cast<int>(n)}));
  const BigInt b = P.coeff(static_cast<std::size_t>(2 * n));
  if (b != n + 1) throw Error("InternalError", "b_2n of the join side disagrees with n+1");
  return b;
}

std::vector<GapRow> gap_table(long n_max) {
  std::vector<GapRow> rows;
  for (long n = 1; n <= n_max; ++n) {
    GapRow r{n, hypercover_sum_example(n), join_side_example(n), {}};
    r.ratio = BigRat(r.hypercover, r.join);
    r.ratio.canonicalize();
    rows.push_back(std::move(r));
  }
  return rows;
}

TelescopedSums telescoped_betti_sums(const std::vector<BigInt>& join_betti, long p) {
  if (p < 1 || p % 2 == 0) throw Error("InvalidArgument", "p must be odd and positive");
  if (static_cast<long>(join_betti.size()) < p)
    throw Error("InsufficientDegrees", "need Betti numbers up to degree " + std::to_string(p - 1));
  TelescopedSums s;
  s.even_sum = join_betti[static_cast<std::size_t>(p - 1)];
  s.odd_sum = p >= 2 ? join_betti[static_cast<std::size_t>(p - 2)] : BigInt(0);
  return s;
}

std::vector<BigInt> betti_list(const IntPoly& P, std::size_t len) {
  std::vector<BigInt> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) out.push_back(P.coeff(i));
  return out;
}

DefectReport join_defect_betti(long N, long n, long r) {
  if (r < 1 || n <= r) throw Error("InvalidArgument", "need n > r >= 1");
  if (N < 0) throw Error("InvalidArgument", "need N >= 0");
  DefectReport rep;
  rep.threshold = (n - r) / r;
  if (rep.threshold <= 0)
    throw Error("InvalidArgument", "threshold floor((n-r)/r) is " + std::to_string(rep.threshold));
  for (long i = 0; i < rep.threshold; ++i) rep.betti.push_back(i % 2 == 0 ? 1 : 0);
  rep.maximizing_p = rep.threshold;
  rep.ambient_minus_equations = rep.maximizing_p + n - (rep.maximizing_p + 1) * r;
  return rep;
}

ProperFormula fiber_power_formula(const ProperFormula& psi, int k) {
  if (k < 1) throw Error("InvalidArgument", "fiber power needs k >= 1");
  if (psi.bound_count() != 1) throw Error("BlockMismatch", "fiber power needs exactly one bound block");
  std::vector<int> dims = psi.free_dims();
  for (int t = 0; t < k; ++t) dims.push_back(psi.blocks.dims.back());
  ProperFormula out;
  out.blocks = BlockSignature(std::move(dims));
  out.free_count = psi.free_count;
  std::vector<FormulaNode> parts;
  for (int t = 0; t < k; ++t) {
    std::vector<BlockSlot> slots;
    for (int i = 0; i < psi.free_count; ++i) slots.push_back({i, 0});
    slots.push_back({psi.free_count + t, 0});
    auto map = coordinate_map(psi.blocks, out.blocks, slots);
    parts.push_back(substitute_node(psi.tree, out.blocks, map));
  }
  if (psi.tree.kind == NodeKind::True || psi.tree.kind == NodeKind::False)
    out.tree = psi.tree;
  else
    out.tree = parts.size() == 1 ? std::move(parts[0]) : FormulaNode::make_and(std::move(parts));
  return out;
}

BigInt hypercover_betti_bound(const ProperFormula& psi, long i, const PieceOptions& opts) {
  if (i < 0) throw Error("InvalidArgument", "degree must be nonnegative");
  BigInt total = 0;
  for (long p = 0; p <= i; ++p) {
    const auto pieces = formula_to_pieces(fiber_power_formula(psi, static_cast<int>(p + 1)), opts);
    total += union_betti(pieces, i - p).back();
  }
  return total;
}

PoincareReport verify_poincare_congruence(const ProperFormula& psi, long p, const PieceOptions& opts) {
  if (p < 1) throw Error("InvalidArgument", "p must be >= 1");
  if (psi.bound_count() != 1) throw Error("BlockMismatch", "congruence check needs exactly one bound block");
  const int n = psi.blocks.dims.back();

  PoincareReport rep;
  rep.p = p;
  rep.join_mod = IntPoly(union_betti(formula_to_pieces(relative_join_formula(psi, static_cast<int>(p)), opts), p - 1));

  std::vector<int> keep;
  for (int b = 0; b < psi.free_count; ++b) keep.push_back(b);
  rep.image_P = union_poincare(project_pieces(formula_to_pieces(psi, opts), keep));

  const long top = (p + 1) * (n + 1) - 1;
  rep.rhs = rep.image_P * substitute_square(qpoly_multiproj(BlockSignature{static_cast<int>(top)}));
  rep.rhs_mod = poly_trunc(rep.rhs, p - 1);
  rep.holds = rep.join_mod == rep.rhs_mod;
  return rep;
}

ConnectivityReport verify_join_connectivity(const ProperFormula& psi, long p, const PieceOptions& opts) {
  if (p < 1) throw Error("InvalidArgument", "p must be >= 1");
  if (psi.blocks.size() != 1) throw Error("BlockMismatch", "connectivity check needs a single-block formula");
  const auto pieces = formula_to_pieces(psi, opts);
  if (pieces.empty()) throw Error("InvalidArgument", "connectivity check needs a nonempty realization");

  const std::vector<ProperFormula> copies(static_cast<std::size_t>(p) + 1, psi);
  const ProperFormula J = multijoin_formula(copies);

  ConnectivityReport rep;
  rep.p = p;
  rep.ambient_P = substitute_square(qpoly_multiproj(J.blocks));
  rep.ambient_betti = betti_list(rep.ambient_P, static_cast<std::size_t>(p) + 1);
  rep.join_betti = union_betti(formula_to_pieces(J, opts), p % 2 == 0 ? p : p - 1);
  rep.holds = true;
  for (long j = 0; j < p; ++j)
    if (rep.join_betti[static_cast<std::size_t>(j)] != rep.ambient_betti[static_cast<std::size_t>(j)])
      rep.holds = false;
  if (p % 2 == 0 && rep.join_betti.back() < rep.ambient_betti.back()) rep.holds = false;
  return rep;
}

namespace {

nlohmann::ordered_json big_list(const std::vector<BigInt>& v) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

}  // namespace

nlohmann::ordered_json to_json(const PoincareReport& r) {
  nlohmann::ordered_json j;
  j["check"] = "poincare";
  j["holds"] = r.holds;
  j["p"] = r.p;
  j["image_P"] = poly_to_json(r.image_P);
  j["rhs"] = poly_to_json(r.rhs);
  j["join_mod"] = poly_to_json(r.join_mod);
  j["rhs_mod"] = poly_to_json(r.rhs_mod);
  return j;
}

nlohmann::ordered_json to_json(const ConnectivityReport& r) {
  nlohmann::ordered_json j;
  j["check"] = "connectivity";
  j["holds"] = r.holds;
  j["p"] = r.p;
  j["ambient_P"] = poly_to_json(r.ambient_P);
  j["join_betti"] = big_list(r.join_betti);
  j["ambient_betti"] = big_list(r.ambient_betti);
  return j;
}

nlohmann::ordered_json to_json(const DefectReport& r) {
  nlohmann::ordered_json j;
  j["threshold"] = r.threshold;
  j["betti"] = r.betti;
  j["maximizing_p"] = r.maximizing_p;
  j["ambient_minus_equations"] = r.ambient_minus_equations;
  return j;
}

}  // namespace cohomqe
