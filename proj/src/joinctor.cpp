#include "cohomqe/joinctor.hpp"

#include <atomic>
#include <string>

#include "cohomqe/error.hpp"

namespace cohomqe {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("Overflow", "join parameter overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("Overflow", "join parameter overflow");
  return r;
}

int to_dim(std::int64_t v) {
  if (v > (1 << 24)) throw Error("Overflow", "joined block dimension " + std::to_string(v) + " is too large");
  return static_cast<int>(v);
}

}  // namespace

JoinParams join_params(const std::vector<int>& e, const std::vector<int>& f) {
  if (f.empty()) throw Error("InvalidArgument", "the join needs at least one bound block");
  for (int x : e)
    if (x < 0) throw Error("InvalidArgument", "negative free block dimension");
  for (int x : f)
    if (x < 0) throw Error("InvalidArgument", "negative bound block dimension");

  JoinParams p;
  p.m = static_cast<int>(e.size());
  p.n = static_cast<int>(f.size());
  p.e = e;
  p.f = f;
  const auto n = static_cast<std::size_t>(p.n);
  p.N.assign(n + 1, 0);
  p.d.assign(n + 1, 0);
  p.mj.assign(n + 1, 0);
  p.msig.assign(n + 1, BlockSignature{});

  for (int x : e) p.d[0] += x;
  p.msig[0] = BlockSignature(e);

  for (std::size_t j = 1; j <= n; ++j) {
    if (j == 1)
      p.N[1] = 1;
    else
      p.N[j] = checked_mul(2 * p.N[j - 1], checked_add(p.d[j - 2], 1));
    p.mj[j] = checked_mul(checked_mul(2, checked_add(p.d[j - 1], 1)), f[j - 1] + 1) - 1;
    p.d[j] = checked_add(p.d[j - 1], checked_mul(p.N[j], p.mj[j]));

    if (p.N[j] > (1 << 20)) throw Error("Overflow", "too many joined blocks at level " + std::to_string(j));
    std::vector<int> dims = p.msig[j - 1].dims;
    dims.insert(dims.end(), static_cast<std::size_t>(p.N[j]), to_dim(p.mj[j]));
    p.msig[j] = BlockSignature(std::move(dims));
  }
  return p;
}

JoinParams join_params(const ProperFormula& psi) {
  return join_params(psi.free_dims(), psi.bound_dims());
}

namespace {

void check_matches(const ProperFormula& psi, const JoinParams& params) {
  if (psi.free_dims() != params.e || psi.bound_dims() != params.f)
    throw Error("BlockMismatch", "formula blocks " + to_string(psi.blocks) +
                                     " do not match the join parameters");
}

std::int64_t tuple_count(const JoinParams& params) {
  std::int64_t k = 1;
  for (int j = 1; j <= params.n; ++j) k = checked_mul(k, params.slots(j));
  return k;
}

// Block mapping for the index tuple with flat rank `k` (i_1 most significant).
std::vector<BlockSlot> tuple_mapping(const JoinParams& params, std::int64_t k) {
  const auto n = static_cast<std::size_t>(params.n);
  std::vector<std::int64_t> idx(n + 1);
  for (std::size_t j = n; j >= 1; --j) {
    const std::int64_t r = params.slots(static_cast<int>(j));
    idx[j] = k % r;
    k /= r;
  }
  std::vector<BlockSlot> slots;
  for (int i = 0; i < params.m; ++i) slots.push_back({i, 0});
  std::int64_t base = params.m;
  std::int64_t prefix_rank = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    slots.push_back({static_cast<int>(base + prefix_rank),
                     static_cast<int>(idx[j] * (params.f[j - 1] + 1))});
    base += params.N[j];
    prefix_rank = prefix_rank * params.slots(static_cast<int>(j)) + idx[j];
  }
  return slots;
}

ProperFormula join_shell(const ProperFormula& psi, const JoinParams& params) {
  check_matches(psi, params);
  ProperFormula out;
  out.blocks = params.msig[static_cast<std::size_t>(params.n)];
  out.free_count = params.m;
  return out;
}

}  // namespace

ProperFormula build_join_formula_serial(const ProperFormula& psi, const JoinParams& params) {
  ProperFormula out = join_shell(psi, params);
  if (psi.tree.kind == NodeKind::True || psi.tree.kind == NodeKind::False) {
    out.tree = psi.tree;
    return out;
  }
  const std::int64_t K = tuple_count(params);
  std::vector<FormulaNode> conj;
  conj.reserve(static_cast<std::size_t>(K));
  for (std::int64_t k = 0; k < K; ++k) {
    auto map = coordinate_map(psi.blocks, out.blocks, tuple_mapping(params, k));
    conj.push_back(substitute_node(psi.tree, out.blocks, map));
  }
  out.tree = FormulaNode::make_and(std::move(conj));
  return out;
}

ProperFormula build_join_formula(const ProperFormula& psi, const JoinParams& params) {
  ProperFormula out = join_shell(psi, params);
  if (psi.tree.kind == NodeKind::True || psi.tree.kind == NodeKind::False) {
    out.tree = psi.tree;
    return out;
  }
  const std::int64_t K = tuple_count(params);
  // The first mapping validates slot widths; the rest share its layout.
  coordinate_map(psi.blocks, out.blocks, tuple_mapping(params, 0));

  std::vector<FormulaNode> conj(static_cast<std::size_t>(K));
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < K; ++k) {
    try {
      auto map = coordinate_map(psi.blocks, out.blocks, tuple_mapping(params, k));
      conj[static_cast<std::size_t>(k)] = substitute_node(psi.tree, out.blocks, map);
    } catch (...) {
      failed = true;
    }
  }
  if (failed) throw Error("InternalError", "join conjunct generation failed");
  out.tree = FormulaNode::make_and(std::move(conj));
  return out;
}

namespace {

// Conjunction with the trivial sentinels folded away.
FormulaNode fold_conjunction(std::vector<FormulaNode> parts) {
  std::vector<FormulaNode> kept;
  for (auto& c : parts) {
    if (c.kind == NodeKind::False) return FormulaNode::make_false();
    if (c.kind != NodeKind::True) kept.push_back(std::move(c));
  }
  if (kept.empty()) return FormulaNode::make_true();
  if (kept.size() == 1) return std::move(kept[0]);
  return FormulaNode::make_and(std::move(kept));
}

}  // namespace

ProperFormula relative_join_formula(const ProperFormula& psi, int p) {
  if (p < 0) throw Error("InvalidArgument", "join order p must be nonnegative");
  if (psi.bound_count() != 1)
    throw Error("BlockMismatch", "relative join needs exactly one bound block, formula has " +
                                     std::to_string(psi.bound_count()));
  const int n = psi.blocks.dims.back();
  std::vector<int> dims = psi.free_dims();
  dims.push_back((p + 1) * (n + 1) - 1);

  ProperFormula out;
  out.blocks = BlockSignature(std::move(dims));
  out.free_count = psi.free_count;
  std::vector<FormulaNode> parts;
  for (int t = 0; t <= p; ++t) {
    std::vector<BlockSlot> slots;
    for (int i = 0; i < psi.free_count; ++i) slots.push_back({i, 0});
    slots.push_back({psi.free_count, t * (n + 1)});
    auto map = coordinate_map(psi.blocks, out.blocks, slots);
    parts.push_back(substitute_node(psi.tree, out.blocks, map));
  }
  out.tree = fold_conjunction(std::move(parts));
  return out;
}

ProperFormula multijoin_formula(const std::vector<ProperFormula>& parts) {
  if (parts.empty()) throw Error("InvalidArgument", "multijoin needs at least one formula");
  int width = 0;
  for (const auto& psi : parts) {
    if (psi.blocks.size() != 1)
      throw Error("BlockMismatch", "multijoin inputs must have a single block");
    width += psi.blocks.dims[0] + 1;
  }
  ProperFormula out;
  out.blocks = BlockSignature{width - 1};
  out.free_count = 0;
  std::vector<FormulaNode> conj;
  int offset = 0;
  for (const auto& psi : parts) {
    const BlockSlot slot{0, offset};
    auto map = coordinate_map(psi.blocks, out.blocks, std::span<const BlockSlot>(&slot, 1));
    conj.push_back(substitute_node(psi.tree, out.blocks, map));
    offset += psi.blocks.dims[0] + 1;
  }
  out.tree = fold_conjunction(std::move(conj));
  return out;
}

SizeStats join_size_stats(const ProperFormula& psi, const JoinParams& params) {
  check_matches(psi, params);
  SizeStats s;
  s.conjunct_count = tuple_count(params);
  s.atom_count = checked_mul(s.conjunct_count, static_cast<std::int64_t>(atom_count(psi.tree)));
  for (int x : params.e) s.variable_count += x + 1;
  for (int j = 1; j <= params.n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    s.variable_count = checked_add(s.variable_count, checked_mul(params.N[ju], params.mj[ju] + 1));
  }
  s.input_size = static_cast<std::int64_t>(node_count(psi.tree));
  s.circuit_size_bound = checked_mul(s.conjunct_count, s.input_size);
  return s;
}

nlohmann::ordered_json params_to_json(const JoinParams& p) {
  nlohmann::ordered_json j;
  j["m"] = p.m;
  j["n"] = p.n;
  j["e"] = p.e;
  j["f"] = p.f;
  auto levels = nlohmann::ordered_json::array();
  for (int i = 0; i <= p.n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    nlohmann::ordered_json row;
    row["i"] = i;
    if (i > 0) row["N"] = p.N[iu];
    row["d"] = p.d[iu];
    if (i > 0) row["m"] = p.mj[iu];
    row["msig"] = p.msig[iu].dims;
    levels.push_back(std::move(row));
  }
  j["levels"] = std::move(levels);
  return j;
}

nlohmann::ordered_json stats_to_json(const SizeStats& s) {
  nlohmann::ordered_json j;
  j["conjunct_count"] = s.conjunct_count;
  j["atom_count"] = s.atom_count;
  j["variable_count"] = s.variable_count;
  j["input_size"] = s.input_size;
  j["circuit_size_bound"] = s.circuit_size_bound;
  return j;
}

}  // namespace cohomqe
