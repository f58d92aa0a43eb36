#include "cohomqe/motivic.hpp"

#include <algorithm>
#include <map>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cohomqe/error.hpp"

namespace cohomqe {

// ---------------------------------------------------------------------------
// LinearPiece

LinearPiece LinearPiece::full(const BlockSignature& blocks) {
  return LinearPiece{blocks, std::vector<RatMatrix>(blocks.size())};
}

IntPoly LinearPiece::class_in_L() const {
  std::vector<int> dims;
  dims.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) dims.push_back(dim(b));
  return qpoly_multiproj(BlockSignature(std::move(dims)));
}

bool LinearPiece::subset_of(const LinearPiece& other) const {
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (!rowspace_contains(systems[b], other.systems[b])) return false;
  return true;
}

bool operator==(const LinearPiece& a, const LinearPiece& b) {
  if (a.blocks != b.blocks) return false;
  for (std::size_t i = 0; i < a.systems.size(); ++i)
    if (compare(a.systems[i], b.systems[i]) != 0) return false;
  return true;
}

bool operator<(const LinearPiece& a, const LinearPiece& b) {
  if (a.blocks != b.blocks) return a.blocks < b.blocks;
  for (std::size_t i = 0; i < a.systems.size(); ++i) {
    const int c = compare(a.systems[i], b.systems[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::optional<LinearPiece> intersect_pieces(const LinearPiece& a, const LinearPiece& b) {
  if (a.blocks != b.blocks) throw Error("BlockMismatch", "intersecting pieces over different blocks");
  LinearPiece out{a.blocks, {}};
  out.systems.reserve(a.systems.size());
  for (std::size_t i = 0; i < a.systems.size(); ++i) {
    const RatMatrix& sa = a.systems[i];
    const RatMatrix& sb = b.systems[i];
    if (rowspace_contains(sa, sb)) {
      out.systems.push_back(sa);
      continue;
    }
    if (rowspace_contains(sb, sa)) {
      out.systems.push_back(sb);
      continue;
    }
    RatMatrix m = sa;
    m.insert(m.end(), sb.begin(), sb.end());
    if (static_cast<int>(rref(m)) > a.blocks.dims[i]) return std::nullopt;
    out.systems.push_back(std::move(m));
  }
  return out;
}

std::vector<LinearPiece> reduce_pieces(std::vector<LinearPiece> pieces) {
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  // Larger pieces first, so a piece is only checked against candidates that
  // could contain it.
  std::stable_sort(pieces.begin(), pieces.end(), [](const LinearPiece& a, const LinearPiece& b) {
    int ra = 0, rb = 0;
    for (std::size_t i = 0; i < a.systems.size(); ++i) {
      ra += a.rank(i);
      rb += b.rank(i);
    }
    return ra < rb;
  });
  std::vector<LinearPiece> kept;
  for (auto& p : pieces) {
    bool covered = std::any_of(kept.begin(), kept.end(),
                               [&](const LinearPiece& k) { return p.subset_of(k); });
    if (!covered) kept.push_back(std::move(p));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// ---------------------------------------------------------------------------
// Formula -> pieces

namespace {

class PieceBuilder {
 public:
  PieceBuilder(const BlockSignature& blocks, std::size_t cap) : blocks_(blocks), cap_(cap) {
    long off = 0;
    for (int d : blocks_.dims) {
      offsets_.push_back(off);
      off += d + 1;
    }
  }

  std::vector<LinearPiece> build(const FormulaNode& n, const std::string& path) {
    switch (n.kind) {
      case NodeKind::True:
        return {LinearPiece::full(blocks_)};
      case NodeKind::False:
        return {};
      case NodeKind::Not:
        throw Error("NegationPresent", "negation at " + path);
      case NodeKind::Atom:
        return atom(n.atom, path);
      case NodeKind::Or: {
        std::vector<LinearPiece> all;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          auto part = build(n.children[i], path + "." + std::to_string(i));
          all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
          check_cap(all.size());
        }
        return reduce_pieces(std::move(all));
      }
      case NodeKind::And: {
        std::vector<LinearPiece> acc{LinearPiece::full(blocks_)};
        for (std::size_t i = 0; i < n.children.size() && !acc.empty(); ++i) {
          auto part = build(n.children[i], path + "." + std::to_string(i));
          std::set<LinearPiece> next;
          for (const auto& a : acc) {
            for (const auto& c : part) {
              if (auto r = intersect_pieces(a, c)) {
                next.insert(std::move(*r));
                check_cap(next.size());
              }
            }
          }
          acc = reduce_pieces({next.begin(), next.end()});
        }
        return acc;
      }
    }
    return {};
  }

 private:
  void check_cap(std::size_t n) const {
    if (n > cap_)
      throw Error("PieceLimitExceeded", "more than " + std::to_string(cap_) + " partial pieces");
  }

  std::vector<LinearPiece> atom(const MultiHomPoly& p, const std::string& path) const {
    if (p.terms.empty()) return {LinearPiece::full(blocks_)};
    if (p.is_constant()) return {};
    int block = -1;
    for (std::size_t b = 0; b < p.multidegree.size(); ++b) {
      if (p.multidegree[b] == 0) continue;
      if (block >= 0) throw Error("MixedBlockAtom", "atom at " + path + " involves more than one block");
      block = static_cast<int>(b);
    }
    const auto bu = static_cast<std::size_t>(block);
    if (p.multidegree[bu] != 1) throw Error("NonLinearAtom", "atom at " + path + " is not linear");
    RatRow row(static_cast<std::size_t>(blocks_.dims[bu]) + 1);
    for (const auto& [e, c] : p.terms) {
      for (int k = 0; k <= blocks_.dims[bu]; ++k) {
        if (e[static_cast<std::size_t>(offsets_[bu] + k)] == 1) row[static_cast<std::size_t>(k)] = c;
      }
    }
    LinearPiece piece = LinearPiece::full(blocks_);
    RatMatrix m{row};
    rref(m);
    if (static_cast<int>(m.size()) > blocks_.dims[bu]) return {};
    piece.systems[bu] = std::move(m);
    return {piece};
  }

  BlockSignature blocks_;
  std::size_t cap_;
  std::vector<long> offsets_;
};

}  // namespace

std::vector<LinearPiece> formula_to_pieces(const ProperFormula& phi, const PieceOptions& opts) {
  PieceBuilder builder(phi.blocks, opts.piece_cap);
  return reduce_pieces(builder.build(phi.tree, "root"));
}

// ---------------------------------------------------------------------------
// Classes

namespace {

class UnionClass {
 public:
  IntPoly of(const std::vector<LinearPiece>& pieces) {
    if (pieces.empty()) return {};
    if (pieces.size() == 1) return pieces[0].class_in_L();
    auto it = memo_.find(pieces);
    if (it != memo_.end()) return it->second;

    IntPoly total;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      total += pieces[k].class_in_L();
      std::vector<LinearPiece> overlap;
      for (std::size_t i = 0; i < k; ++i)
        if (auto r = intersect_pieces(pieces[i], pieces[k])) overlap.push_back(std::move(*r));
      if (!overlap.empty()) total -= of(reduce_pieces(std::move(overlap)));
    }
    memo_.emplace(pieces, total);
    return total;
  }

 private:
  std::map<std::vector<LinearPiece>, IntPoly> memo_;
};

void subset_walk(const std::vector<LinearPiece>& pieces, std::size_t next, const LinearPiece& cur,
                 std::size_t size, IntPoly& acc) {
  IntPoly c = cur.class_in_L();
  if (size % 2)
    acc += c;
  else
    acc -= c;
  for (std::size_t j = next; j < pieces.size(); ++j)
    if (auto r = intersect_pieces(cur, pieces[j])) subset_walk(pieces, j + 1, *r, size + 1, acc);
}

}  // namespace

GrothClass pieces_class(const std::vector<LinearPiece>& pieces) {
  UnionClass u;
  return {u.of(reduce_pieces(pieces))};
}

GrothClass pieces_class_subsets(const std::vector<LinearPiece>& pieces) {
  if (pieces.size() > 20)
    throw Error("PieceLimitExceeded", "subset enumeration is capped at 20 pieces, got " +
                                          std::to_string(pieces.size()));
  const auto k = static_cast<long>(pieces.size());
  std::vector<IntPoly> partial(pieces.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    subset_walk(pieces, iu + 1, pieces[iu], 1, partial[iu]);
  }
  IntPoly total;
  for (const auto& p : partial) total += p;
  return {total};
}

IntPoly class_to_Q(const GrothClass& c) {
  for (const auto& x : c.poly_in_L.coeffs())
    if (sgn(x) < 0) throw Error("NegativeCoefficient", "class " + c.poly_in_L.to_string('L') +
                                                          " has a negative coefficient");
  return c.poly_in_L;
}

IntPoly class_to_P(const GrothClass& c) { return substitute_square(class_to_Q(c)); }

std::vector<LinearPiece> project_pieces(const std::vector<LinearPiece>& pieces,
                                        const std::vector<int>& keep) {
  std::vector<int> k = keep;
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  std::vector<LinearPiece> out;
  for (const auto& p : pieces) {
    LinearPiece q;
    std::vector<int> dims;
    for (int b : k) {
      if (b < 0 || b >= static_cast<int>(p.blocks.size()))
        throw Error("InvalidArgument", "projection keeps a missing block " + std::to_string(b));
      dims.push_back(p.blocks.dims[static_cast<std::size_t>(b)]);
      q.systems.push_back(p.systems[static_cast<std::size_t>(b)]);
    }
    q.blocks = BlockSignature(std::move(dims));
    out.push_back(std::move(q));
  }
  return reduce_pieces(std::move(out));
}

// ---------------------------------------------------------------------------
// Point counting

bool is_prime(unsigned long q) {
  if (q < 2) return false;
  for (unsigned long d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

namespace {

// Formula flattened for evaluation mod q.
class ModEvaluator {
 public:
  ModEvaluator(const ProperFormula& phi, std::uint64_t q) : q_(q) { root_ = compile(phi.tree); }

  bool eval(const std::uint64_t* x) const { return eval(root_, x); }

 private:
  struct Term {
    std::uint64_t coef;
    std::vector<std::pair<std::size_t, int>> powers;
  };
  struct Node {
    NodeKind kind;
    std::vector<int> kids;
    std::vector<Term> terms;
  };

  int compile(const FormulaNode& n) {
    Node out{n.kind, {}, {}};
    if (n.kind == NodeKind::Not) throw Error("NegationPresent", "negation in counted formula");
    if (n.kind == NodeKind::Atom) {
      for (const auto& [e, c] : n.atom.terms) {
        const std::uint64_t r = mpz_fdiv_ui(c.get_mpz_t(), q_);
        if (r == 0)
          throw Error("BadReduction", "prime " + std::to_string(q_) + " divides coefficient " + c.get_str());
        Term t{r, {}};
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i]) t.powers.emplace_back(i, e[i]);
        out.terms.push_back(std::move(t));
      }
    }
    for (const auto& c : n.children) out.kids.push_back(compile(c));
    nodes_.push_back(std::move(out));
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool eval(int id, const std::uint64_t* x) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
      case NodeKind::True:
        return true;
      case NodeKind::False:
      case NodeKind::Not:
        return false;
      case NodeKind::And:
        for (int k : n.kids)
          if (!eval(k, x)) return false;
        return true;
      case NodeKind::Or:
        for (int k : n.kids)
          if (eval(k, x)) return true;
        return false;
      case NodeKind::Atom: {
        std::uint64_t s = 0;
        for (const auto& t : n.terms) {
          std::uint64_t v = t.coef;
          for (const auto& [i, k] : t.powers)
            for (int r = 0; r < k && v; ++r) v = v * x[i] % q_;
          s = (s + v) % q_;
        }
        return s == 0;
      }
    }
    return false;
  }

  std::uint64_t q_;
  std::vector<Node> nodes_;
  int root_ = 0;
};

// One normalized representative (first nonzero coordinate = 1) per point of P^n(F_q).
std::vector<std::vector<std::uint64_t>> projective_points(int n, std::uint64_t q) {
  std::vector<std::vector<std::uint64_t>> pts;
  const auto width = static_cast<std::size_t>(n) + 1;
  for (std::size_t lead = 0; lead < width; ++lead) {
    const std::size_t free_digits = width - lead - 1;
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < free_digits; ++i) count *= q;
    for (std::uint64_t t = 0; t < count; ++t) {
      std::vector<std::uint64_t> v(width, 0);
      v[lead] = 1;
      std::uint64_t rest = t;
      for (std::size_t i = width; i-- > lead + 1;) {
        v[i] = rest % q;
        rest /= q;
      }
      pts.push_back(std::move(v));
    }
  }
  return pts;
}

struct Enumeration {
  std::vector<std::vector<std::vector<std::uint64_t>>> points;  // per block
  std::vector<std::size_t> offsets;
  std::size_t width = 0;
  std::uint64_t total = 1;
};

Enumeration prepare(const ProperFormula& phi, unsigned long q, std::uint64_t budget) {
  if (!is_prime(q)) throw Error("PrimeRequired", std::to_string(q) + " is not prime");
  BigInt total = 1;
  for (int n : phi.blocks.dims) {
    BigInt qq = q;
    BigInt pts;
    mpz_pow_ui(pts.get_mpz_t(), qq.get_mpz_t(), static_cast<unsigned long>(n) + 1);
    pts = (pts - 1) / (qq - 1);
    total *= pts;
    if (total > BigInt(std::to_string(budget)))
      throw Error("BudgetExceeded", "more than " + std::to_string(budget) + " points to enumerate");
  }
  Enumeration en;
  for (int n : phi.blocks.dims) {
    en.offsets.push_back(en.width);
    en.width += static_cast<std::size_t>(n) + 1;
    en.points.push_back(projective_points(n, q));
  }
  en.total = total.get_ui();
  return en;
}

}  // namespace

BigInt count_points_serial(const ProperFormula& phi, unsigned long q, std::uint64_t budget) {
  const Enumeration en = prepare(phi, q, budget);
  const ModEvaluator ev(phi, q);
  const std::size_t nb = en.points.size();
  std::vector<std::size_t> idx(nb, 0);
  std::vector<std::uint64_t> x(en.width);
  for (std::size_t b = 0; b < nb; ++b) std::copy(en.points[b][0].begin(), en.points[b][0].end(), x.begin() + static_cast<long>(en.offsets[b]));

  std::uint64_t count = 0;
  for (;;) {
    if (ev.eval(x.data())) ++count;
    std::size_t b = nb;
    while (b > 0) {
      --b;
      if (++idx[b] < en.points[b].size()) break;
      idx[b] = 0;
      if (b == 0) return BigInt(std::to_string(count));
    }
    // Reload every block from b on; the ones after b wrapped to index 0.
    for (std::size_t k = b; k < nb; ++k) {
      const auto& pt = en.points[k][idx[k]];
      std::copy(pt.begin(), pt.end(), x.begin() + static_cast<long>(en.offsets[k]));
    }
  }
}

BigInt count_points(const ProperFormula& phi, unsigned long q, std::uint64_t budget) {
  const Enumeration en = prepare(phi, q, budget);
  const ModEvaluator ev(phi, q);
  const std::size_t nb = en.points.size();
  const auto total = static_cast<long long>(en.total);

  std::uint64_t count = 0;
#pragma omp parallel reduction(+ : count)
  {
    std::vector<std::uint64_t> x(en.width);
#pragma omp for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
      auto rest = static_cast<std::uint64_t>(flat);
      for (std::size_t b = nb; b-- > 0;) {
        const std::size_t sz = en.points[b].size();
        const auto& pt = en.points[b][rest % sz];
        rest /= sz;
        std::copy(pt.begin(), pt.end(), x.begin() + static_cast<long>(en.offsets[b]));
      }
      if (ev.eval(x.data())) ++count;
    }
  }
  return BigInt(std::to_string(count));
}

GrothClass class_from_counts(const ProperFormula& phi, const std::vector<unsigned long>& primes,
                             std::uint64_t budget) {
  const long ambient = phi.blocks.total();
  if (static_cast<long>(primes.size()) < ambient + 1)
    throw Error("InvalidArgument", "need at least " + std::to_string(ambient + 1) +
                                       " primes for ambient dimension " + std::to_string(ambient));
  std::set<unsigned long> distinct(primes.begin(), primes.end());
  if (distinct.size() != primes.size()) throw Error("InvalidArgument", "primes must be pairwise distinct");

  const std::size_t k = primes.size();
  std::vector<BigRat> xs(k), coef(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = BigRat(BigInt(std::to_string(primes[i])));
    coef[i] = BigRat(count_points(phi, primes[i], budget));
  }
  // Newton divided differences, then expansion into the monomial basis.
  for (std::size_t level = 1; level < k; ++level)
    for (std::size_t i = k - 1; i >= level; --i) {
      coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level]);
      if (i == level) break;
    }
  std::vector<BigRat> poly{coef[k - 1]};
  for (std::size_t i = k - 1; i-- > 0;) {
    // poly = poly * (x - xs[i]) + coef[i]
    std::vector<BigRat> next(poly.size() + 1);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] -= poly[j] * xs[i];
    }
    next[0] += coef[i];
    poly = std::move(next);
  }
  std::vector<BigInt> ints;
  for (auto& c : poly) {
    c.canonicalize();
    if (c.get_den() != 1)
      throw Error("NotPolynomialCount", "interpolated point count has a non-integer coefficient " + c.get_str());
    ints.push_back(c.get_num());
  }
  IntPoly result(std::move(ints));
  if (result.degree() > ambient)
    throw Error("NotPolynomialCount", "interpolated point count has degree " +
                                          std::to_string(result.degree()) + " > ambient dimension " +
                                          std::to_string(ambient));
  return {result};
}

}  // namespace cohomqe
