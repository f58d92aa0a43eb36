#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>

#include "cohomqe/error.hpp"
#include "cohomqe/fop.hpp"
#include "cohomqe/formula.hpp"
#include "cohomqe/joinctor.hpp"
#include "cohomqe/motivic.hpp"

using namespace cohomqe;

namespace {

BigInt random_big(std::mt19937_64& rng, int bits) {
  BigInt x = 0;
  for (int i = 0; i < bits; i += 64) {
    x <<= 64;
    x += static_cast<unsigned long>(rng());
  }
  x >>= static_cast<unsigned>((bits + 63) / 64 * 64 - bits);
  return rng() % 2 ? x : BigInt(-x);
}

IntPoly random_poly(std::mt19937_64& rng, long max_degree, int bits) {
  const long deg = max_degree < 0 ? -1 : static_cast<long>(rng() % static_cast<unsigned long>(max_degree + 1));
  std::vector<BigInt> c;
  for (long i = 0; i <= deg; ++i) c.push_back(random_big(rng, bits));
  return IntPoly(std::move(c));
}

BlockSignature random_sig(std::mt19937_64& rng, long total_cap) {
  std::vector<int> d;
  long total = 0;
  const int k = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < k; ++i) {
    const int n = static_cast<int>(rng() % 11);
    if (total + n > total_cap) break;
    d.push_back(n);
    total += n;
  }
  if (d.empty()) d.push_back(0);
  return BlockSignature(d);
}

std::string atom(char kind, int index, const std::vector<int>& c) {
  const std::string var = std::string(1, kind) + std::to_string(index) + "_";
  std::string s = "(=0 (+";
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) s += " (* " + std::to_string(c[i]) + " " + var + std::to_string(i) + ")";
  return s + "))";
}

// Random conjunction of linear atoms, one block per atom; `kinds[b]` is the
// variable letter of block b. Coefficients in {-1, 0, 1}.
std::string random_conj(std::mt19937_64& rng, const std::vector<int>& dims, const std::string& kinds) {
  std::vector<int> index(dims.size());
  std::map<char, int> seen;
  for (std::size_t b = 0; b < dims.size(); ++b) index[b] = seen[kinds[b]]++;
  std::string s = "(and";
  int atoms = 0;
  for (std::size_t b = 0; b < dims.size(); ++b) {
    const int k = static_cast<int>(rng() % 3);
    for (int t = 0; t < k && t <= dims[b]; ++t) {
      std::vector<int> c(static_cast<std::size_t>(dims[b]) + 1);
      for (int& x : c) x = static_cast<int>(rng() % 3) - 1;
      if (std::all_of(c.begin(), c.end(), [](int x) { return x == 0; })) c[rng() % c.size()] = 1;
      s += " " + atom(kinds[b], index[b], c);
      ++atoms;
    }
  }
  if (atoms == 0) {
    const std::size_t b = dims.size() - 1;
    std::vector<int> c(static_cast<std::size_t>(dims[b]) + 1, 0);
    c[0] = 1;
    s += " " + atom(kinds[b], index[b], c);
  }
  return s + ")";
}

IntPoly true_q(const std::vector<LinearPiece>& ps) { return pseudo(union_poincare(ps)); }

// Q of psi^omega computed on the realization directly, quantifiers
// innermost first. Over a union of linear pieces the fiber over a point is
// all of P^f exactly when a piece containing the point has no equation in
// the eliminated block.
IntPoly quantified_q(std::vector<LinearPiece> ps, const ProperFormula& psi, const std::vector<Quantifier>& omega) {
  int blocks = static_cast<int>(psi.blocks.size());
  for (int i = static_cast<int>(omega.size()) - 1; i >= 0; --i) {
    --blocks;
    std::vector<LinearPiece> keep_pieces;
    for (auto& p : ps)
      if (omega[static_cast<std::size_t>(i)] == Quantifier::Exists || p.rank(static_cast<std::size_t>(blocks)) == 0)
        keep_pieces.push_back(p);
    std::vector<int> keep;
    for (int b = 0; b < blocks; ++b) keep.push_back(b);
    ps = project_pieces(keep_pieces, keep);
  }
  if (blocks == 0) return ps.empty() ? IntPoly{} : IntPoly{1};
  return true_q(ps);
}

}  // namespace

TEST_CASE("rec is an involution") {
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 1000; ++iter) {
    const auto sig = random_sig(rng, 40);
    const IntPoly q = random_poly(rng, sig.total(), 1 + static_cast<int>(rng() % 200));
    CHECK(rec(rec(q, sig), sig) == q);
  }
}

TEST_CASE("pseudo commutes with a P^1 factor") {
  std::mt19937_64 rng(2);
  for (int iter = 0; iter < 300; ++iter) {
    const IntPoly p = random_poly(rng, 60, 100);
    CHECK(pseudo(p * IntPoly{1, 0, 1}) == pseudo(p) * IntPoly{1, 1});
  }
}

TEST_CASE("products of projective spaces are palindromic") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    const auto sig = random_sig(rng, 40);
    const IntPoly q = qpoly_multiproj(sig);
    CHECK(poly_reverse(q, sig.total()) == q);
    CHECK(q.degree() == sig.total());
  }
}

TEST_CASE("polynomial json round trip") {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 300; ++iter) {
    const IntPoly q = random_poly(rng, 200, 256);
    const std::string text = poly_to_json(q).dump();
    CHECK(poly_from_json(nlohmann::json::parse(text)) == q);
    CHECK(poly_to_json(poly_from_json(nlohmann::json::parse(text))).dump() == text);
  }
}

TEST_CASE("ring identities") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    const IntPoly a = random_poly(rng, 30, 80), b = random_poly(rng, 30, 80), c = random_poly(rng, 30, 80);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
    const BigInt z = random_big(rng, 20);
    CHECK(poly_eval_int(a * b, z) == poly_eval_int(a, z) * poly_eval_int(b, z));
  }
}

TEST_CASE("parallel kernels match their serial references") {
  std::mt19937_64 rng(6);
  const char* texts[] = {
      "(blocks (x 2) (x 1)) (or (=0 x0_0) (and (=0 x0_1) (=0 x1_0)) (=0 (+ x0_0 (* -1 x0_2))))",
      "(blocks (x 3)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_2 x0_3)))",
      "(blocks (x 1) (x 1) (x 1)) (or (=0 x0_0) (=0 x1_1) (=0 x2_0))",
  };
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    for (const char* t : texts) {
      const auto phi = parse_formula(t);
      for (unsigned long q : {2ul, 3ul, 5ul}) CHECK(count_points(phi, q) == count_points_serial(phi, q));
    }
    const auto psi = parse_formula(
        "(blocks (w 1) (x 1) (x 1)) (or (and (=0 w0_0) (=0 x0_0)) (and (=0 w0_1) (=0 x1_1)))");
    const auto params = join_params(psi);
    CHECK(build_join_formula(psi, params) == build_join_formula_serial(psi, params));
  }
  set_thread_count(0);

  for (int iter = 0; iter < 60; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 2);
    std::string text = "(blocks (x " + std::to_string(n) + ")) (or";
    const int k = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) text += " " + random_conj(rng, {n}, "x");
    text += ")";
    const auto ps = formula_to_pieces(parse_formula(text));
    CHECK_MESSAGE(pieces_class(ps) == pieces_class_subsets(ps), text);
  }
}

TEST_CASE("point counts agree with the class") {
  // coefficients chosen so that no two forms become dependent mod 2, 3, 5, 7
  const char* texts[] = {
      "(blocks (x 1)) (=0 x0_0)",
      "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))",
      "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))",
      "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))",
      "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1) (=0 x0_2))",
      "(blocks (x 2)) (or (=0 x0_0) (and (=0 x0_1) (=0 x0_2)))",
      "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))",
      "(blocks (x 3)) (or (=0 x0_0) (and (=0 x0_1) (=0 x0_2)) (and (=0 x0_2) (=0 x0_3)))",
      "(blocks (x 1) (x 1)) (or (=0 x0_0) (=0 x1_0))",
      "(blocks (x 1) (x 1)) (or (and (=0 x0_0) (=0 x1_0)) (and (=0 x0_1) (=0 x1_1)))",
      "(blocks (x 1) (x 2)) (or (=0 x1_0) (and (=0 x0_0) (=0 x1_1)))",
      "(blocks (x 1) (x 1)) true",
      "(blocks (x 2)) (and (=0 x0_0) (=0 x0_1))",
  };
  for (const char* t : texts) {
    const auto phi = parse_formula(t);
    const auto cls = pieces_class(formula_to_pieces(phi));
    for (unsigned long q : {2ul, 3ul, 5ul, 7ul})
      CHECK_MESSAGE(count_points(phi, q) == poly_eval_int(cls.poly_in_L, q), t);
    CHECK_MESSAGE(class_from_counts(phi, {2, 3, 5, 7}) == cls, t);
  }
}

TEST_CASE("quantifier elimination against projections") {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int iter = 0; iter < 120; ++iter) {
    const bool sentence = rng() % 3 == 0;
    std::vector<int> dims;
    std::string header = "(blocks";
    std::string prefix;
    if (!sentence) {
      const int e = static_cast<int>(rng() % 2) + 1;
      dims.push_back(e);
      header += " (w " + std::to_string(e) + ")";
      prefix += "w";
    }
    const int f = static_cast<int>(rng() % 3);
    dims.push_back(f);
    header += " (x " + std::to_string(f) + "))";
    prefix += "x";

    std::string body = "(or";
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) body += " " + random_conj(rng, dims, prefix.c_str());
    body += ")";
    const auto psi = parse_formula(header + " " + body);

    const auto params = join_params(psi);
    const auto J = build_join_formula(psi, params);
    std::vector<LinearPiece> jp;
    try {
      jp = formula_to_pieces(J);
    } catch (const Error& e) {
      if (e.kind() == "PieceLimitExceeded") continue;
      throw;
    }
    const IntPoly qJ = true_q(jp);
    const auto ps = formula_to_pieces(psi);
    for (auto w : {Quantifier::Exists, Quantifier::Forall}) {
      const std::vector<Quantifier> omega{w};
      const IntPoly expect = quantified_q(ps, psi, omega);
      const std::string what = header + " " + body + " " + quantifier_word(omega);
      CHECK_MESSAGE(qe_pseudo_poincare(qJ, params, omega) == expect, what);
      if (sentence) CHECK(decide_sentence(qJ, params, omega) == !expect.is_zero());
    }
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("validated formulas survive canonical printing") {
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<int> dims{static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
    std::string text = "(blocks (w " + std::to_string(dims[0]) + ") (x " + std::to_string(dims[1]) + ")) (or";
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) text += " " + random_conj(rng, dims, "wx");
    text += ")";
    const auto f = parse_formula(text);
    CHECK(parse_formula(format_formula(f)) == f);
  }
}
