#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohomqe/polyring.hpp"

namespace cohomqe {

/// Exponent vector over every homogeneous coordinate of every block, blocks
/// laid out consecutively in declaration order.
using Exponents = std::vector<int>;

/// A polynomial in the coordinates of a product of projective spaces.
/// Homogeneity per block is not enforced on construction; validate_proper()
/// checks it term by term.
struct MultiHomPoly {
  BlockSignature blocks;
  std::map<Exponents, BigInt> terms;  // no zero coefficients
  std::vector<int> multidegree;       // per block, taken from the leading term

  /// Builds the polynomial and fills in the multidegree. Drops zero terms.
  static MultiHomPoly from_terms(BlockSignature blocks, std::map<Exponents, BigInt> terms);

  /// Per-block degree of a single exponent vector.
  std::vector<int> block_degrees(const Exponents& e) const;
  bool is_constant() const;

  friend bool operator==(const MultiHomPoly& a, const MultiHomPoly& b);
};

enum class NodeKind { And, Or, Atom, Not, True, False };

/// Negation-free and/or tree. `Not` exists only so that parsed input with a
/// negation can be reported by the validator; `True`/`False` are the
/// top-level sentinels for the trivial formulas.
struct FormulaNode {
  NodeKind kind = NodeKind::True;
  std::vector<FormulaNode> children;
  MultiHomPoly atom;

  static FormulaNode make_and(std::vector<FormulaNode> children);
  static FormulaNode make_or(std::vector<FormulaNode> children);
  static FormulaNode make_atom(MultiHomPoly p);
  static FormulaNode make_true() { return FormulaNode{NodeKind::True, {}, {}}; }
  static FormulaNode make_false() { return FormulaNode{NodeKind::False, {}, {}}; }

  friend bool operator==(const FormulaNode& a, const FormulaNode& b);
};

enum class Quantifier { Exists, Forall };

struct ProperFormula {
  BlockSignature blocks;  // free blocks first, then bound blocks
  int free_count = 0;
  FormulaNode tree;
  std::optional<std::vector<Quantifier>> prefix;  // outermost first, one per bound block

  int bound_count() const { return static_cast<int>(blocks.size()) - free_count; }
  /// Dimension of each free block, e.g. (e_1, ..., e_m).
  std::vector<int> free_dims() const;
  std::vector<int> bound_dims() const;

  friend bool operator==(const ProperFormula& a, const ProperFormula& b);
};

/// Parses the s-expression format and validates the result. Throws
/// SyntaxError, or the validator's error.
ProperFormula parse_formula(std::string_view text);
ProperFormula read_formula_file(const std::string& path);

/// Throws Error with kind NegationPresent, NotMultiHomogeneous, BlockMismatch
/// or InvalidFormula; the message names the offending node path.
void validate_proper(const ProperFormula& f);

/// Canonical text; parse_formula(format_formula(f)) == f for canonical f.
std::string format_formula(const ProperFormula& f);
std::string format_node(const FormulaNode& n, const BlockSignature& blocks, int free_count);

/// Sorts And/Or children by their canonical text, recursively.
void canonicalize(ProperFormula& f);

/// Destination of a source block: a target block and the coordinate offset
/// at which the source block's n_i + 1 coordinates start.
struct BlockSlot {
  int target_block = 0;
  int offset = 0;
};

/// Maps every source coordinate index to a target coordinate index.
/// Throws ArityMismatch when a slot does not fit its target block.
std::vector<int> coordinate_map(const BlockSignature& source, const BlockSignature& target,
                                std::span<const BlockSlot> mapping);

/// Renames the coordinates of every atom. `coord_map` comes from coordinate_map().
FormulaNode substitute_node(const FormulaNode& n, const BlockSignature& target,
                            std::span<const int> coord_map);

ProperFormula substitute_blocks(const ProperFormula& f, const BlockSignature& target,
                                int target_free_count, std::span<const BlockSlot> mapping);

std::size_t atom_count(const FormulaNode& n);
/// Number of And/Or/Atom/sentinel nodes.
std::size_t node_count(const FormulaNode& n);

std::string quantifier_word(std::span<const Quantifier> w);  // e.g. "EA"
std::vector<Quantifier> parse_quantifier_word(std::string_view s);

}  // namespace cohomqe
