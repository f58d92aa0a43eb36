#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <unordered_map>

#include "cohomqe/error.hpp"
#include "cohomqe/motivic.hpp"

namespace cohomqe {

namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % kPrime);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mulmod(a, a))
    if (e & 1) r = mulmod(r, a);
  return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

struct VecHash {
  template <class T>
  std::size_t operator()(const std::vector<T>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// A coordinate group: columns of one block that never share a row with
// columns outside the group, in any piece. Every flat of the arrangement is
// then a direct sum of one subspace per group.
struct Group {
  std::size_t block = 0;
  std::vector<std::size_t> cols;
  std::map<RatMatrix, int> ids;
  std::vector<RatMatrix> spaces;
  std::vector<std::vector<int>> meet_tab;
  std::vector<std::vector<signed char>> inside_tab;

  int intern(RatMatrix m) {
    auto [it, fresh] = ids.emplace(m, static_cast<int>(spaces.size()));
    if (fresh) spaces.push_back(std::move(m));
    return it->second;
  }

  int affine_dim(int id) const {
    return static_cast<int>(cols.size()) - static_cast<int>(spaces[static_cast<std::size_t>(id)].size());
  }

  void grow() {
    const std::size_t n = spaces.size();
    if (meet_tab.size() == n) return;
    meet_tab.resize(n);
    inside_tab.resize(n);
    for (auto& row : meet_tab) row.resize(n, -1);
    for (auto& row : inside_tab) row.resize(n, -1);
  }

  int meet(int a, int b) {
    grow();
    int& slot = meet_tab[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    if (slot >= 0) return slot;
    RatMatrix m = spaces[static_cast<std::size_t>(a)];
    const auto& sb = spaces[static_cast<std::size_t>(b)];
    m.insert(m.end(), sb.begin(), sb.end());
    rref(m);
    const int id = intern(std::move(m));
    grow();
    meet_tab[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = id;
    meet_tab[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = id;
    return id;
  }

  // Subspace a lies inside subspace b.
  bool inside(int a, int b) {
    grow();
    signed char& slot = inside_tab[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    if (slot < 0)
      slot = rowspace_contains(spaces[static_cast<std::size_t>(a)], spaces[static_cast<std::size_t>(b)]) ? 1 : 0;
    return slot == 1;
  }
};

using Flat = std::vector<int>;

class Arrangement {
 public:
  explicit Arrangement(const std::vector<LinearPiece>& pieces) {
    const BlockSignature& sig = pieces.front().blocks;
    blocks_ = sig.size();
    for (std::size_t b = 0; b < sig.size(); ++b) {
      const std::size_t width = static_cast<std::size_t>(sig.dims[b]) + 1;
      std::vector<std::size_t> parent(width);
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (const auto& p : pieces) {
        for (const auto& row : p.systems[b]) {
          std::size_t first = width;
          for (std::size_t c = 0; c < width; ++c) {
            if (sgn(row[c]) == 0) continue;
            if (first == width)
              first = c;
            else
              parent[find(c)] = find(first);
          }
        }
      }
      std::map<std::size_t, std::size_t> root_to_group;
      for (std::size_t c = 0; c < width; ++c) {
        auto [it, fresh] = root_to_group.emplace(find(c), groups_.size());
        if (fresh) groups_.push_back(Group{b, {}, {}, {}, {}, {}});
        groups_[it->second].cols.push_back(c);
      }
    }
    for (const auto& p : pieces) pieces_.push_back(to_flat(p));
  }

  const std::vector<Flat>& pieces() const { return pieces_; }

  // Projective dimension per block; empty when the flat is empty.
  std::vector<int> dims(const Flat& f) const {
    std::vector<int> aff(blocks_, 0);
    for (std::size_t g = 0; g < groups_.size(); ++g) aff[groups_[g].block] += groups_[g].affine_dim(f[g]);
    for (int& a : aff) {
      if (a < 1) return {};
      --a;
    }
    return aff;
  }

  std::size_t block_count() const { return blocks_; }

  Flat meet(const Flat& a, const Flat& b) {
    Flat out(a.size());
    for (std::size_t g = 0; g < a.size(); ++g) out[g] = groups_[g].meet(a[g], b[g]);
    return out;
  }

  bool inside(const Flat& a, const Flat& b) {
    for (std::size_t g = 0; g < a.size(); ++g)
      if (!groups_[g].inside(a[g], b[g])) return false;
    return true;
  }

 private:
  Flat to_flat(const LinearPiece& p) {
    Flat f(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      Group& grp = groups_[g];
      RatMatrix m;
      for (const auto& row : p.systems[grp.block]) {
        RatRow r;
        bool hit = false;
        for (std::size_t c : grp.cols) {
          r.push_back(row[c]);
          if (sgn(row[c]) != 0) hit = true;
        }
        if (hit) m.push_back(std::move(r));
      }
      f[g] = grp.intern(std::move(m));
    }
    return f;
  }

  std::size_t blocks_ = 0;
  std::vector<Group> groups_;
  std::vector<Flat> pieces_;
};

struct FlatInfo {
  Flat flat;
  std::vector<int> dims;
  std::vector<std::vector<int>> children;  // dims of the flats x n P strictly inside x
};

bool dominates(const std::vector<int>& x, const std::vector<int>& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (x[i] < a[i]) return false;
  return true;
}

std::vector<FlatInfo> intersection_poset(Arrangement& arr, std::size_t cap) {
  std::vector<FlatInfo> flats;
  std::unordered_map<Flat, std::size_t, VecHash> index;
  auto add = [&](const Flat& f, std::vector<int> d) {
    auto [it, fresh] = index.emplace(f, flats.size());
    if (fresh) {
      if (flats.size() >= cap)
        throw Error("FlatLimitExceeded", "more than " + std::to_string(cap) + " intersections of pieces");
      flats.push_back({f, std::move(d), {}});
    }
  };
  for (const auto& p : arr.pieces()) add(p, arr.dims(p));
  for (std::size_t i = 0; i < flats.size(); ++i) {
    const Flat x = flats[i].flat;
    for (const auto& p : arr.pieces()) {
      if (arr.inside(x, p)) continue;
      Flat c = arr.meet(x, p);
      auto d = arr.dims(c);
      if (d.empty()) continue;
      auto& ch = flats[i].children;
      if (std::find(ch.begin(), ch.end(), d) == ch.end()) ch.push_back(d);
      add(c, std::move(d));
    }
  }
  return flats;
}

using SparseCol = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

// Faces of one size, flattened and sorted lexicographically.
struct FaceLevel {
  std::size_t size = 0;
  std::vector<std::uint32_t> verts;

  std::size_t count() const { return size ? verts.size() / size : 0; }
  const std::uint32_t* at(std::size_t i) const { return verts.data() + i * size; }

  std::size_t find(const std::uint32_t* f) const {
    std::size_t lo = 0, hi = count();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (std::lexicographical_compare(at(mid), at(mid) + size, f, f + size))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }
};

// Rank mod kPrime of the boundary map from `upper` to `lower`.
std::size_t boundary_rank(const FaceLevel& upper, const FaceLevel& lower) {
  std::vector<std::int64_t> pivot(lower.count(), -1);
  std::vector<SparseCol> stored;
  SparseCol col, tmp;
  std::vector<std::uint32_t> sub(lower.size);
  for (std::size_t c = 0; c < upper.count(); ++c) {
    const std::uint32_t* f = upper.at(c);
    col.clear();
    for (std::size_t i = 0; i < upper.size; ++i) {
      std::size_t w = 0;
      for (std::size_t j = 0; j < upper.size; ++j)
        if (j != i) sub[w++] = f[j];
      col.emplace_back(static_cast<std::uint32_t>(lower.find(sub.data())), i % 2 ? kPrime - 1 : 1);
    }
    std::sort(col.begin(), col.end());
    while (!col.empty()) {
      const auto [low, val] = col.back();
      const std::int64_t pv = pivot[low];
      if (pv < 0) {
        const std::uint64_t inv = invmod(val);
        for (auto& e : col) e.second = mulmod(e.second, inv);
        pivot[low] = static_cast<std::int64_t>(stored.size());
        stored.push_back(col);
        break;
      }
      const SparseCol& piv = stored[static_cast<std::size_t>(pv)];
      const std::uint64_t neg = kPrime - val;
      tmp.clear();
      std::size_t a = 0, b = 0;
      while (a < col.size() || b < piv.size()) {
        if (b == piv.size() || (a < col.size() && col[a].first < piv[b].first)) {
          tmp.push_back(col[a++]);
        } else if (a == col.size() || piv[b].first < col[a].first) {
          tmp.emplace_back(piv[b].first, mulmod(neg, piv[b].second));
          ++b;
        } else {
          const std::uint64_t v = (col[a].second + mulmod(neg, piv[b].second)) % kPrime;
          if (v) tmp.emplace_back(col[a].first, v);
          ++a;
          ++b;
        }
      }
      col.swap(tmp);
    }
  }
  return stored.size();
}

// h^0..h^top of the complex on `vertex_count` vertices whose simplices are the
// vertex sets lying in a common facet; `incidence[v]` is the bitset of facets
// containing v. Faces are generated once each, in lexicographic order, by
// extending a face with larger vertices while some facet still contains it.
std::vector<std::size_t> complex_cohomology(std::size_t vertex_count,
                                            const std::vector<std::vector<std::uint64_t>>& incidence,
                                            long top, std::size_t face_cap) {
  const std::size_t words = incidence.empty() ? 0 : incidence.front().size();
  const std::size_t max_size = static_cast<std::size_t>(top) + 2;
  std::vector<FaceLevel> levels(1);
  levels.push_back({1, {}});
  std::vector<std::uint64_t> bits;
  for (std::uint32_t v = 0; v < vertex_count; ++v) {
    levels[1].verts.push_back(v);
    bits.insert(bits.end(), incidence[v].begin(), incidence[v].end());
  }
  std::size_t total = vertex_count;
  std::vector<std::uint64_t> next_bits, meet(words);
  for (std::size_t s = 1; s < max_size && levels[s].count() > 0; ++s) {
    FaceLevel next{s + 1, {}};
    next_bits.clear();
    const FaceLevel& cur = levels[s];
    for (std::size_t i = 0; i < cur.count(); ++i) {
      const std::uint32_t* f = cur.at(i);
      const std::uint64_t* fb = bits.data() + i * words;
      for (std::uint32_t v = f[s - 1] + 1; v < vertex_count; ++v) {
        bool any = false;
        for (std::size_t w = 0; w < words; ++w) {
          meet[w] = fb[w] & incidence[v][w];
          any |= meet[w] != 0;
        }
        if (!any) continue;
        next.verts.insert(next.verts.end(), f, f + s);
        next.verts.push_back(v);
        if (s + 1 < max_size) next_bits.insert(next_bits.end(), meet.begin(), meet.end());
        if (++total > face_cap)
          throw Error("FaceLimitExceeded", "nerve exceeds " + std::to_string(face_cap) + " simplices");
      }
    }
    levels.push_back(std::move(next));
    bits.swap(next_bits);
  }
  while (levels.size() < max_size + 2) levels.push_back({levels.size(), {}});

  // rank[s] = rank of the boundary from size-s faces to size-(s-1) faces.
  std::vector<std::size_t> rank(max_size + 2, 0);
  for (std::size_t s = 2; s <= max_size; ++s)
    if (levels[s].count() > 0) rank[s] = boundary_rank(levels[s], levels[s - 1]);
  std::vector<std::size_t> h(static_cast<std::size_t>(top) + 1);
  for (std::size_t a = 0; a <= static_cast<std::size_t>(top); ++a)
    h[a] = levels[a + 1].count() - rank[a + 1] - rank[a + 2];
  return h;
}

using Incidence = std::vector<std::vector<std::uint64_t>>;

bool subset_bits(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

Incidence transpose(const Incidence& inc, std::size_t cols) {
  const std::size_t words = (inc.size() + 63) / 64;
  Incidence out(cols, std::vector<std::uint64_t>(words, 0));
  for (std::size_t v = 0; v < inc.size(); ++v)
    for (std::size_t f = 0; f < cols; ++f)
      if (inc[v][f / 64] >> (f % 64) & 1) out[f][v / 64] |= std::uint64_t{1} << (v % 64);
  return out;
}

// Drops rows contained in another row (or equal to an earlier one).
bool drop_dominated(Incidence& inc) {
  std::vector<char> gone(inc.size(), 0);
  for (std::size_t v = 0; v < inc.size(); ++v)
    for (std::size_t u = 0; u < inc.size() && !gone[v]; ++u) {
      if (u == v || gone[u] || !subset_bits(inc[v], inc[u])) continue;
      if (subset_bits(inc[u], inc[v]) && u > v) continue;
      gone[v] = 1;
    }
  Incidence kept;
  for (std::size_t v = 0; v < inc.size(); ++v)
    if (!gone[v]) kept.push_back(std::move(inc[v]));
  const bool changed = kept.size() != inc.size();
  inc.swap(kept);
  return changed;
}

// The complex generated by facets, as vertex -> facet bitsets, reduced by
// strong collapses: a vertex whose facets all contain another vertex goes,
// and so does a facet inside another facet. Returns the smaller of the two
// dual descriptions; both have the homotopy type of the original.
Incidence collapse(Incidence inc, std::size_t facets, long top) {
  Incidence dual = transpose(inc, facets);
  for (bool changed = true; changed;) {
    changed = drop_dominated(inc);
    dual = transpose(inc, facets);
    changed |= drop_dominated(dual);
    facets = dual.size();
    inc = transpose(dual, inc.size());
  }
  auto faces = [&](const Incidence& m) {
    double total = 0;
    for (const auto& row : transpose(m, m.empty() ? 0 : m.front().size() * 64)) {
      std::size_t k = 0;
      for (auto w : row) k += static_cast<std::size_t>(__builtin_popcountll(w));
      double c = 1;
      for (long s = 1; s <= top + 2 && s <= static_cast<long>(k); ++s) {
        c = c * static_cast<double>(k - static_cast<std::size_t>(s) + 1) / static_cast<double>(s);
        total += c;
      }
    }
    return total;
  };
  return faces(dual) < faces(inc) ? dual : inc;
}

}  // namespace

std::vector<BigInt> union_betti(const std::vector<LinearPiece>& pieces, long max_degree, const BettiOptions& opts) {
  if (max_degree < 0) throw Error("InvalidArgument", "max_degree must be nonnegative");
  std::vector<BigInt> betti(static_cast<std::size_t>(max_degree) + 1, 0);
  if (pieces.empty()) return betti;

  Arrangement arr(pieces);
  const auto flats = intersection_poset(arr, opts.flat_cap);
  const std::size_t words = (arr.pieces().size() + 63) / 64;
  const std::size_t nb = arr.block_count();

  // H^*(X_S) splits over monomials h^a, and the summand for a is the nerve of
  // the flats with dims >= a. Within a block only the distinct flat dimensions
  // matter, so a runs over cells (t_{k-1}, t_k] of those thresholds.
  std::vector<std::vector<int>> thresholds(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    for (const auto& x : flats) thresholds[b].push_back(x.dims[b]);
    std::sort(thresholds[b].begin(), thresholds[b].end());
    thresholds[b].erase(std::unique(thresholds[b].begin(), thresholds[b].end()), thresholds[b].end());
  }

  struct Cell {
    std::vector<int> need;  // required dims per block
    std::vector<BigInt> weight;  // sum of T^{2|a|} over the cell, truncated
    long low;  // smallest 2|a|
  };
  std::vector<Cell> cells;
  std::vector<std::size_t> pick(nb, 0);
  while (true) {
    Cell c{std::vector<int>(nb), std::vector<BigInt>(static_cast<std::size_t>(max_degree) + 1, 0), 0};
    c.weight[0] = 1;
    for (std::size_t b = 0; b < nb && c.low <= max_degree; ++b) {
      const int lo = pick[b] == 0 ? 0 : thresholds[b][pick[b] - 1] + 1;
      const int hi = thresholds[b][pick[b]];
      c.need[b] = hi;
      c.low += 2L * lo;
      std::vector<BigInt> next(c.weight.size(), 0);
      for (std::size_t e = 0; e < c.weight.size(); ++e) {
        if (sgn(c.weight[e]) == 0) continue;
        for (long t = e + 2L * lo; t <= static_cast<long>(e) + 2L * hi && t <= max_degree; t += 2)
          next[static_cast<std::size_t>(t)] += c.weight[e];
      }
      c.weight.swap(next);
    }
    if (c.low <= max_degree) cells.push_back(std::move(c));
    std::size_t b = 0;
    while (b < nb && ++pick[b] == thresholds[b].size()) pick[b++] = 0;
    if (b == nb) break;
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.low < y.low; });

  std::map<std::vector<std::size_t>, std::vector<std::size_t>> cache;
  for (const auto& c : cells) {
    std::vector<std::size_t> minimal;
    for (std::size_t i = 0; i < flats.size(); ++i) {
      const auto& x = flats[i];
      if (!dominates(x.dims, c.need)) continue;
      if (std::any_of(x.children.begin(), x.children.end(), [&](const auto& d) { return dominates(d, c.need); }))
        continue;
      minimal.push_back(i);
    }
    if (minimal.empty()) continue;
    const long top = max_degree - c.low;
    auto it = cache.find(minimal);
    if (it == cache.end()) {
      std::vector<std::vector<std::uint64_t>> incidence;
      for (std::size_t i : minimal) {
        std::vector<std::uint64_t> row(words, 0);
        for (std::size_t p = 0; p < arr.pieces().size(); ++p)
          if (arr.inside(flats[i].flat, arr.pieces()[p])) row[p / 64] |= std::uint64_t{1} << (p % 64);
        incidence.push_back(std::move(row));
      }
      const auto reduced = collapse(std::move(incidence), arr.pieces().size(), top);
      it = cache.emplace(minimal, complex_cohomology(reduced.size(), reduced, top, opts.face_cap)).first;
    }
    const auto& h = it->second;
    for (std::size_t e = 0; e < c.weight.size(); ++e) {
      if (sgn(c.weight[e]) == 0) continue;
      for (std::size_t a = 0; a < h.size() && e + a <= static_cast<std::size_t>(max_degree); ++a)
        if (h[a]) betti[e + a] += c.weight[e] * static_cast<unsigned long>(h[a]);
    }
  }
  return betti;
}

IntPoly union_poincare(const std::vector<LinearPiece>& pieces, const BettiOptions& opts) {
  if (pieces.empty()) return {};
  int top = 0;
  for (const auto& p : pieces) {
    int d = 0;
    for (std::size_t b = 0; b < p.blocks.size(); ++b) d += p.dim(b);
    top = std::max(top, d);
  }
  return IntPoly(union_betti(pieces, 2L * top, opts));
}

}  // namespace cohomqe
