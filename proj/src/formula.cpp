#include "cohomqe/formula.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cohomqe/error.hpp"

namespace cohomqe {

// ---------------------------------------------------------------------------
// Data model

MultiHomPoly MultiHomPoly::from_terms(BlockSignature blocks, std::map<Exponents, BigInt> terms) {
  MultiHomPoly p;
  p.blocks = std::move(blocks);
  for (auto& [e, c] : terms)
    if (sgn(c) != 0) p.terms.emplace(e, std::move(c));
  p.multidegree = p.terms.empty() ? std::vector<int>(p.blocks.size(), 0)
                                  : p.block_degrees(p.terms.begin()->first);
  return p;
}

std::vector<int> MultiHomPoly::block_degrees(const Exponents& e) const {
  std::vector<int> deg(blocks.size(), 0);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int k = 0; k <= blocks.dims[b]; ++k, ++pos)
      if (pos < e.size()) deg[b] += e[pos];
  }
  return deg;
}

bool MultiHomPoly::is_constant() const {
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) {
    return std::all_of(t.first.begin(), t.first.end(), [](int x) { return x == 0; });
  });
}

bool operator==(const MultiHomPoly& a, const MultiHomPoly& b) {
  if (a.blocks != b.blocks || a.multidegree != b.multidegree) return false;
  if (a.terms.size() != b.terms.size()) return false;
  auto it = b.terms.begin();
  for (const auto& [e, c] : a.terms) {
    if (e != it->first || c != it->second) return false;
    ++it;
  }
  return true;
}

FormulaNode FormulaNode::make_and(std::vector<FormulaNode> children) {
  if (children.empty()) throw Error("InvalidFormula", "and requires at least one child");
  return FormulaNode{NodeKind::And, std::move(children), {}};
}

FormulaNode FormulaNode::make_or(std::vector<FormulaNode> children) {
  if (children.empty()) throw Error("InvalidFormula", "or requires at least one child");
  return FormulaNode{NodeKind::Or, std::move(children), {}};
}

FormulaNode FormulaNode::make_atom(MultiHomPoly p) {
  return FormulaNode{NodeKind::Atom, {}, std::move(p)};
}

bool operator==(const FormulaNode& a, const FormulaNode& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::Atom) return a.atom == b.atom;
  return a.children == b.children;
}

std::vector<int> ProperFormula::free_dims() const {
  return {blocks.dims.begin(), blocks.dims.begin() + free_count};
}

std::vector<int> ProperFormula::bound_dims() const {
  return {blocks.dims.begin() + free_count, blocks.dims.end()};
}

bool operator==(const ProperFormula& a, const ProperFormula& b) {
  return a.blocks == b.blocks && a.free_count == b.free_count && a.prefix == b.prefix &&
         a.tree == b.tree;
}

// ---------------------------------------------------------------------------
// S-expression reader

namespace {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", line_, col_);
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError("unexpected ')'", line_, col_);
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unclosed '('", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      e.atom.push_back(text_[pos_]);
      advance();
    }
    return e;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void fail(const SExpr& e, const std::string& msg) {
  throw SyntaxError(msg, e.line, e.column);
}

bool is_head(const SExpr& e, std::string_view head) {
  return e.is_list && !e.items.empty() && !e.items[0].is_list && e.items[0].atom == head;
}

int parse_int(const SExpr& e) {
  if (e.is_list || e.atom.empty()) fail(e, "expected an integer");
  for (char c : e.atom)
    if (!std::isdigit(static_cast<unsigned char>(c))) fail(e, "expected a nonnegative integer");
  try {
    return std::stoi(e.atom);
  } catch (const std::exception&) {
    fail(e, "integer out of range");
  }
}

bool parse_number(const std::string& s, BigRat& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  std::size_t slash = s.find('/');
  for (std::size_t k = i; k < s.size(); ++k) {
    if (k == slash) continue;
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  }
  std::string body = s[0] == '+' ? s.substr(1) : s;
  if (out.set_str(body, 10) != 0) return false;
  if (sgn(out.get_den()) == 0) return false;
  out.canonicalize();
  return true;
}

using RatPoly = std::map<Exponents, BigRat>;

class FormulaBuilder {
 public:
  FormulaBuilder(BlockSignature blocks, int free_count)
      : blocks_(std::move(blocks)), free_count_(free_count) {
    long off = 0;
    for (int d : blocks_.dims) {
      offsets_.push_back(off);
      off += d + 1;
    }
    width_ = off;
  }

  FormulaNode clause(const SExpr& e) {
    if (!e.is_list) {
      if (e.atom == "true") return FormulaNode::make_true();
      if (e.atom == "false") return FormulaNode::make_false();
      fail(e, "expected a clause, found '" + e.atom + "'");
    }
    if (e.items.empty() || e.items[0].is_list) fail(e, "expected a clause head");
    const std::string& head = e.items[0].atom;
    if (head == "and" || head == "or") {
      if (e.items.size() < 2) fail(e, "'" + head + "' requires at least one clause");
      std::vector<FormulaNode> kids;
      for (std::size_t i = 1; i < e.items.size(); ++i) kids.push_back(clause(e.items[i]));
      return head == "and" ? FormulaNode::make_and(std::move(kids))
                           : FormulaNode::make_or(std::move(kids));
    }
    if (head == "not") {
      if (e.items.size() != 2) fail(e, "'not' takes one clause");
      FormulaNode n{NodeKind::Not, {}, {}};
      n.children.push_back(clause(e.items[1]));
      return n;
    }
    if (head == "=0") {
      if (e.items.size() != 2) fail(e, "'=0' takes one polynomial");
      return FormulaNode::make_atom(clear_denominators(poly(e.items[1])));
    }
    fail(e, "unknown clause '" + head + "'");
  }

 private:
  RatPoly poly(const SExpr& e) {
    if (!e.is_list) {
      BigRat c;
      if (parse_number(e.atom, c)) {
        RatPoly p;
        if (sgn(c) != 0) p.emplace(Exponents(width_, 0), c);
        return p;
      }
      Exponents ex(width_, 0);
      ex[variable(e)] = 1;
      return RatPoly{{ex, BigRat(1)}};
    }
    if (e.items.size() < 2 || e.items[0].is_list) fail(e, "expected (+ ...) or (* ...)");
    const std::string& op = e.items[0].atom;
    if (op == "+") {
      RatPoly acc;
      for (std::size_t i = 1; i < e.items.size(); ++i) add_into(acc, poly(e.items[i]));
      return acc;
    }
    if (op == "*") {
      RatPoly acc{{Exponents(width_, 0), BigRat(1)}};
      for (std::size_t i = 1; i < e.items.size(); ++i) acc = multiply(acc, poly(e.items[i]));
      return acc;
    }
    fail(e, "unknown polynomial operator '" + op + "'");
  }

  std::size_t variable(const SExpr& e) {
    const std::string& s = e.atom;
    auto bad = [&]() { fail(e, "unknown variable '" + s + "'"); };
    if (s.size() < 4 || (s[0] != 'w' && s[0] != 'x')) bad();
    std::size_t us = s.find('_');
    if (us == std::string::npos || us == 1 || us + 1 == s.size()) bad();
    for (std::size_t i = 1; i < s.size(); ++i)
      if (i != us && !std::isdigit(static_cast<unsigned char>(s[i]))) bad();
    int idx = std::stoi(s.substr(1, us - 1));
    int coord = std::stoi(s.substr(us + 1));
    int block = s[0] == 'w' ? idx : free_count_ + idx;
    bool in_range = s[0] == 'w' ? idx < free_count_
                                : block < static_cast<int>(blocks_.size());
    if (!in_range) fail(e, "variable '" + s + "' refers to an undeclared block");
    if (coord > blocks_.dims[static_cast<std::size_t>(block)])
      fail(e, "variable '" + s + "' exceeds the block's coordinate count");
    return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(block)] + coord);
  }

  static void add_into(RatPoly& acc, const RatPoly& p) {
    for (const auto& [ex, c] : p) {
      auto [it, fresh] = acc.emplace(ex, c);
      if (!fresh) {
        it->second += c;
        if (sgn(it->second) == 0) acc.erase(it);
      }
    }
  }

  RatPoly multiply(const RatPoly& a, const RatPoly& b) const {
    RatPoly out;
    for (const auto& [ea, ca] : a) {
      for (const auto& [eb, cb] : b) {
        Exponents e(width_);
        for (long i = 0; i < width_; ++i) e[i] = ea[i] + eb[i];
        add_into(out, RatPoly{{e, ca * cb}});
      }
    }
    return out;
  }

  MultiHomPoly clear_denominators(const RatPoly& p) const {
    BigInt lcm = 1;
    for (const auto& [e, c] : p) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    std::map<Exponents, BigInt> terms;
    for (const auto& [e, c] : p) {
      BigRat scaled = c * lcm;
      terms.emplace(e, scaled.get_num());
    }
    return MultiHomPoly::from_terms(blocks_, std::move(terms));
  }

  BlockSignature blocks_;
  int free_count_;
  std::vector<long> offsets_;
  long width_ = 0;
};

}  // namespace

ProperFormula parse_formula(std::string_view text) {
  auto exprs = Reader(text).read_all();
  if (exprs.empty()) throw SyntaxError("empty formula", 1, 1);
  std::size_t i = 0;
  if (!is_head(exprs[0], "blocks")) fail(exprs[0], "formula must start with (blocks ...)");

  std::vector<int> free_dims, bound_dims;
  const SExpr& header = exprs[0];
  if (header.items.size() < 2) fail(header, "(blocks ...) needs at least one block");
  for (std::size_t k = 1; k < header.items.size(); ++k) {
    const SExpr& decl = header.items[k];
    if (!decl.is_list || decl.items.size() != 2 || decl.items[0].is_list)
      fail(decl, "block declaration must be (w DIM) or (x DIM)");
    int dim = parse_int(decl.items[1]);
    if (decl.items[0].atom == "w") {
      if (!bound_dims.empty()) fail(decl, "free (w) blocks must be declared before bound (x) blocks");
      free_dims.push_back(dim);
    } else if (decl.items[0].atom == "x") {
      bound_dims.push_back(dim);
    } else {
      fail(decl, "block kind must be w or x");
    }
  }
  ++i;

  ProperFormula f;
  f.free_count = static_cast<int>(free_dims.size());
  free_dims.insert(free_dims.end(), bound_dims.begin(), bound_dims.end());
  f.blocks = BlockSignature(std::move(free_dims));

  if (i < exprs.size() && is_head(exprs[i], "prefix")) {
    std::vector<Quantifier> word;
    for (std::size_t k = 1; k < exprs[i].items.size(); ++k) {
      const SExpr& q = exprs[i].items[k];
      if (q.is_list) fail(q, "quantifier expected");
      if (q.atom == "exists")
        word.push_back(Quantifier::Exists);
      else if (q.atom == "forall")
        word.push_back(Quantifier::Forall);
      else
        fail(q, "quantifier must be exists or forall");
    }
    if (word.empty()) fail(exprs[i], "(prefix ...) needs at least one quantifier");
    f.prefix = std::move(word);
    ++i;
  }
  if (i >= exprs.size()) throw SyntaxError("missing formula body", exprs.back().line, exprs.back().column);
  if (i + 1 < exprs.size()) fail(exprs[i + 1], "unexpected trailing expression");

  FormulaBuilder builder(f.blocks, f.free_count);
  f.tree = builder.clause(exprs[i]);
  validate_proper(f);
  canonicalize(f);
  return f;
}

ProperFormula read_formula_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IOError", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_formula(ss.str());
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void validate_node(const FormulaNode& n, const BlockSignature& blocks, const std::string& path,
                   bool top) {
  switch (n.kind) {
    case NodeKind::Not:
      throw Error("NegationPresent", "negation at " + path);
    case NodeKind::True:
    case NodeKind::False:
      if (!top) throw Error("InvalidFormula", "true/false allowed only at top level, found at " + path);
      return;
    case NodeKind::And:
    case NodeKind::Or:
      if (n.children.empty()) throw Error("InvalidFormula", "empty and/or at " + path);
      for (std::size_t i = 0; i < n.children.size(); ++i)
        validate_node(n.children[i], blocks, path + "." + std::to_string(i), false);
      return;
    case NodeKind::Atom: {
      const MultiHomPoly& p = n.atom;
      if (p.blocks != blocks)
        throw Error("BlockMismatch", "atom at " + path + " is declared over " +
                                         to_string(p.blocks) + ", formula has " + to_string(blocks));
      const auto width = static_cast<std::size_t>(blocks.coordinate_count());
      for (const auto& [e, c] : p.terms) {
        if (e.size() != width)
          throw Error("BlockMismatch", "atom at " + path + " has a malformed exponent vector");
        auto deg = p.block_degrees(e);
        for (std::size_t b = 0; b < deg.size(); ++b) {
          if (deg[b] != p.multidegree[b])
            throw Error("NotMultiHomogeneous", "atom at " + path + " is not homogeneous in block " +
                                                   std::to_string(b) + " (degrees " +
                                                   std::to_string(p.multidegree[b]) + " and " +
                                                   std::to_string(deg[b]) + ")");
        }
      }
      return;
    }
  }
}

}  // namespace

void validate_proper(const ProperFormula& f) {
  if (f.blocks.size() == 0) throw Error("InvalidFormula", "formula has no blocks");
  for (int d : f.blocks.dims)
    if (d < 0) throw Error("InvalidFormula", "negative block dimension");
  if (f.free_count < 0 || f.free_count > static_cast<int>(f.blocks.size()))
    throw Error("InvalidFormula", "free block count out of range");
  if (f.prefix && static_cast<int>(f.prefix->size()) != f.bound_count())
    throw Error("InvalidFormula", "prefix has " + std::to_string(f.prefix->size()) +
                                      " quantifiers for " + std::to_string(f.bound_count()) +
                                      " bound blocks");
  validate_node(f.tree, f.blocks, "root", true);
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

std::string var_name(std::size_t coord, const BlockSignature& blocks, int free_count) {
  std::size_t off = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto width = static_cast<std::size_t>(blocks.dims[b]) + 1;
    if (coord < off + width) {
      const auto ib = static_cast<int>(b);
      std::string name = ib < free_count ? "w" + std::to_string(ib) : "x" + std::to_string(ib - free_count);
      return name + "_" + std::to_string(coord - off);
    }
    off += width;
  }
  return "?";
}

std::string format_term(const Exponents& e, const BigInt& c, const BlockSignature& blocks,
                        int free_count) {
  std::vector<std::string> factors;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) factors.push_back(var_name(i, blocks, free_count));
  if (factors.empty()) return c.get_str();
  if (c == 1 && factors.size() == 1) return factors[0];
  std::string s = "(*";
  if (c != 1) s += " " + c.get_str();
  for (const auto& f : factors) s += " " + f;
  return s + ")";
}

void format_into(std::string& out, const FormulaNode& n, const BlockSignature& blocks,
                 int free_count) {
  switch (n.kind) {
    case NodeKind::True:
      out += "true";
      return;
    case NodeKind::False:
      out += "false";
      return;
    case NodeKind::Not:
      out += "(not ";
      format_into(out, n.children.at(0), blocks, free_count);
      out += ")";
      return;
    case NodeKind::And:
    case NodeKind::Or:
      out += n.kind == NodeKind::And ? "(and" : "(or";
      for (const auto& c : n.children) {
        out += " ";
        format_into(out, c, blocks, free_count);
      }
      out += ")";
      return;
    case NodeKind::Atom: {
      out += "(=0 ";
      const auto& t = n.atom.terms;
      if (t.empty()) {
        out += "0";
      } else if (t.size() == 1) {
        out += format_term(t.begin()->first, t.begin()->second, blocks, free_count);
      } else {
        out += "(+";
        for (const auto& [e, c] : t) out += " " + format_term(e, c, blocks, free_count);
        out += ")";
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

std::string format_node(const FormulaNode& n, const BlockSignature& blocks, int free_count) {
  std::string out;
  format_into(out, n, blocks, free_count);
  return out;
}

std::string format_formula(const ProperFormula& f) {
  std::string out = "(blocks";
  for (std::size_t b = 0; b < f.blocks.size(); ++b)
    out += std::string(" (") + (static_cast<int>(b) < f.free_count ? "w " : "x ") +
           std::to_string(f.blocks.dims[b]) + ")";
  out += ")\n";
  if (f.prefix) {
    out += "(prefix";
    for (auto q : *f.prefix) out += q == Quantifier::Exists ? " exists" : " forall";
    out += ")\n";
  }
  format_into(out, f.tree, f.blocks, f.free_count);
  out += "\n";
  return out;
}

namespace {

void canonicalize_node(FormulaNode& n, const BlockSignature& blocks, int free_count) {
  for (auto& c : n.children) canonicalize_node(c, blocks, free_count);
  if (n.kind != NodeKind::And && n.kind != NodeKind::Or) return;
  std::vector<std::pair<std::string, FormulaNode>> keyed;
  keyed.reserve(n.children.size());
  for (auto& c : n.children) keyed.emplace_back(format_node(c, blocks, free_count), std::move(c));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  n.children.clear();
  for (auto& [k, c] : keyed) n.children.push_back(std::move(c));
}

}  // namespace

void canonicalize(ProperFormula& f) { canonicalize_node(f.tree, f.blocks, f.free_count); }

// ---------------------------------------------------------------------------
// Substitution

std::vector<int> coordinate_map(const BlockSignature& source, const BlockSignature& target,
                                std::span<const BlockSlot> mapping) {
  if (mapping.size() != source.size())
    throw Error("ArityMismatch", "mapping has " + std::to_string(mapping.size()) +
                                     " slots for " + std::to_string(source.size()) + " blocks");
  std::vector<long> target_off;
  long off = 0;
  for (int d : target.dims) {
    target_off.push_back(off);
    off += d + 1;
  }
  std::vector<int> map;
  map.reserve(static_cast<std::size_t>(source.coordinate_count()));
  for (std::size_t b = 0; b < source.size(); ++b) {
    const BlockSlot& s = mapping[b];
    if (s.target_block < 0 || s.target_block >= static_cast<int>(target.size()))
      throw Error("ArityMismatch", "slot for block " + std::to_string(b) + " names a missing target block");
    const int target_width = target.dims[static_cast<std::size_t>(s.target_block)] + 1;
    const int width = source.dims[b] + 1;
    if (s.offset < 0 || s.offset + width > target_width)
      throw Error("ArityMismatch", "block " + std::to_string(b) + " of width " +
                                       std::to_string(width) + " does not fit at offset " +
                                       std::to_string(s.offset) + " of a block of width " +
                                       std::to_string(target_width));
    for (int k = 0; k < width; ++k)
      map.push_back(static_cast<int>(target_off[static_cast<std::size_t>(s.target_block)]) + s.offset + k);
  }
  return map;
}

FormulaNode substitute_node(const FormulaNode& n, const BlockSignature& target,
                            std::span<const int> coord_map) {
  if (n.kind != NodeKind::Atom) {
    FormulaNode out{n.kind, {}, {}};
    out.children.reserve(n.children.size());
    for (const auto& c : n.children) out.children.push_back(substitute_node(c, target, coord_map));
    return out;
  }
  const auto width = static_cast<std::size_t>(target.coordinate_count());
  std::map<Exponents, BigInt> terms;
  for (const auto& [e, c] : n.atom.terms) {
    Exponents te(width, 0);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) te[static_cast<std::size_t>(coord_map[i])] += e[i];
    terms.emplace(std::move(te), c);
  }
  return FormulaNode::make_atom(MultiHomPoly::from_terms(target, std::move(terms)));
}

ProperFormula substitute_blocks(const ProperFormula& f, const BlockSignature& target,
                                int target_free_count, std::span<const BlockSlot> mapping) {
  auto map = coordinate_map(f.blocks, target, mapping);
  ProperFormula out;
  out.blocks = target;
  out.free_count = target_free_count;
  out.tree = substitute_node(f.tree, target, map);
  if (f.prefix && static_cast<int>(f.prefix->size()) == out.bound_count()) out.prefix = f.prefix;
  return out;
}

std::size_t atom_count(const FormulaNode& n) {
  if (n.kind == NodeKind::Atom) return 1;
  std::size_t s = 0;
  for (const auto& c : n.children) s += atom_count(c);
  return s;
}

std::size_t node_count(const FormulaNode& n) {
  std::size_t s = 1;
  for (const auto& c : n.children) s += node_count(c);
  return s;
}

std::string quantifier_word(std::span<const Quantifier> w) {
  std::string s;
  for (auto q : w) s += q == Quantifier::Exists ? 'E' : 'A';
  return s;
}

std::vector<Quantifier> parse_quantifier_word(std::string_view s) {
  std::vector<Quantifier> w;
  for (char c : s) {
    if (c == 'E')
      w.push_back(Quantifier::Exists);
    else if (c == 'A')
      w.push_back(Quantifier::Forall);
    else
      throw Error("InvalidArgument", std::string("quantifier word letters must be E or A, got '") + c + "'");
  }
  return w;
}

}  // namespace cohomqe
