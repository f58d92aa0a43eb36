#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cohomqe/error.hpp"
#include "cohomqe/formula.hpp"
#include "cohomqe/joinctor.hpp"
#include "cohomqe/motivic.hpp"

using namespace cohomqe;

namespace {

const char* kEgQe = R"(
(blocks (w 1) (x 1) (x 1))
(prefix exists forall)
(or
  (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))
  (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))
)";

// Recurrences evaluated with plain loops, kept apart from join_params.
struct Ref {
  std::vector<long> N, d, m;
};

Ref recurrences(const std::vector<int>& e, const std::vector<int>& f) {
  Ref r;
  long d0 = 0;
  for (int x : e) d0 += x;
  r.d.push_back(d0);
  r.N.push_back(0);
  r.m.push_back(0);
  for (std::size_t j = 1; j <= f.size(); ++j) {
    const long Nj = j == 1 ? 1 : 2 * r.N[j - 1] * (r.d[j - 2] + 1);
    const long mj = 2 * (r.d[j - 1] + 1) * (f[j - 1] + 1) - 1;
    r.N.push_back(Nj);
    r.m.push_back(mj);
    r.d.push_back(r.d[j - 1] + Nj * mj);
  }
  return r;
}

GrothClass cls(const ProperFormula& f) { return pieces_class(formula_to_pieces(f)); }

}  // namespace

TEST_CASE("worked example parameters") {
  const auto p = join_params({1}, {1, 1});
  CHECK(p.N == std::vector<std::int64_t>{0, 1, 4});
  CHECK(p.d == std::vector<std::int64_t>{1, 8, 148});
  CHECK(p.mj == std::vector<std::int64_t>{0, 7, 35});
  CHECK(p.msig[0] == BlockSignature{1});
  CHECK(p.msig[1] == BlockSignature{1, 7});
  CHECK(p.msig[2] == BlockSignature{1, 7, 35, 35, 35, 35});
  CHECK(p.slots(1) == 4);
  CHECK(p.slots(2) == 18);
}

TEST_CASE("small parameters") {
  const auto a = join_params({0}, {0});
  CHECK(a.d[0] == 0);
  CHECK(a.N[1] == 1);
  CHECK(a.mj[1] == 1);
  CHECK(a.d[1] == 1);

  const auto b = join_params({}, {1});
  CHECK(b.d[0] == 0);
  CHECK(b.N[1] == 1);
  CHECK(b.mj[1] == 3);
  CHECK(b.d[1] == 3);
  CHECK(b.msig[0] == BlockSignature{});
}

TEST_CASE("parameters against the recurrences") {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<int> e(rng() % 3), f(1 + rng() % 3);
    for (int& x : e) x = static_cast<int>(rng() % 3);
    for (int& x : f) x = static_cast<int>(rng() % 3);
    const auto p = join_params(e, f);
    const auto r = recurrences(e, f);
    for (std::size_t j = 0; j <= f.size(); ++j) {
      CHECK(p.d[j] == r.d[j]);
      CHECK(p.msig[j].total() == p.d[j]);
      if (j > 0) {
        CHECK(p.N[j] == r.N[j]);
        CHECK(p.mj[j] == r.m[j]);
      }
    }
  }
}

TEST_CASE("worked example join formula") {
  const auto psi = parse_formula(kEgQe);
  const auto params = join_params(psi);
  const auto J = build_join_formula(psi, params);
  CHECK(J.blocks == BlockSignature{1, 7, 35, 35, 35, 35});
  CHECK(J.free_count == 1);
  REQUIRE(J.tree.kind == NodeKind::And);
  CHECK(J.tree.children.size() == 72);
  validate_proper(J);

  const auto s = join_size_stats(psi, params);
  CHECK(s.conjunct_count == 72);
  CHECK(s.variable_count == 2 + 8 + 4 * 36);
  CHECK(s.atom_count == 72 * 5);
  CHECK(s.input_size == static_cast<std::int64_t>(node_count(psi.tree)));

  CHECK(build_join_formula_serial(psi, params) == J);
}

TEST_CASE("single atom sentence joins to two atoms") {
  const auto psi = parse_formula("(blocks (x 1)) (=0 x0_0)");
  const auto params = join_params(psi);
  const auto J = build_join_formula(psi, params);
  CHECK(J.blocks == BlockSignature{3});
  CHECK(atom_count(J.tree) == 2);
  // x0 = x2 = 0 in P^3: a line
  CHECK(cls(J).poly_in_L == IntPoly{1, 1});
}

TEST_CASE("true input stays true") {
  const auto psi = parse_formula("(blocks (w 1) (x 1)) true");
  const auto params = join_params(psi);
  const auto J = build_join_formula(psi, params);
  CHECK(J.tree.kind == NodeKind::True);
  CHECK(J.blocks == BlockSignature{1, 7});
  CHECK(join_size_stats(psi, params).atom_count == 0);
}

TEST_CASE("size stats for the smallest case") {
  const auto psi = parse_formula("(blocks (w 0) (x 0)) (=0 x0_0)");
  CHECK(join_size_stats(psi, join_params(psi)).conjunct_count == 2);
}

TEST_CASE("conjunct count equals generated tuples") {
  std::mt19937 rng(5);
  for (int iter = 0; iter < 30; ++iter) {
    const int e = static_cast<int>(rng() % 2);
    const int f1 = static_cast<int>(rng() % 2), f2 = static_cast<int>(rng() % 2);
    const std::string text = "(blocks (w " + std::to_string(e) + ") (x " + std::to_string(f1) + ") (x " +
                             std::to_string(f2) + ")) (or (=0 x0_0) (=0 x1_0))";
    const auto psi = parse_formula(text);
    const auto params = join_params(psi);
    const auto J = build_join_formula(psi, params);
    const auto stats = join_size_stats(psi, params);
    REQUIRE(J.tree.kind == NodeKind::And);
    CHECK(static_cast<std::int64_t>(J.tree.children.size()) == stats.conjunct_count);
    CHECK(stats.conjunct_count == params.slots(1) * params.slots(2));
    CHECK(static_cast<std::int64_t>(atom_count(J.tree)) == stats.atom_count);
    CHECK(J.blocks.total() == params.d[2]);
    CHECK(build_join_formula_serial(psi, params) == J);
  }
}

TEST_CASE("relative join") {
  const auto full = parse_formula("(blocks (w 1) (x 1)) true");
  const auto rj = relative_join_formula(full, 1);
  CHECK(rj.blocks == BlockSignature{1, 3});
  CHECK(rj.tree.kind == NodeKind::True);

  const auto psi = parse_formula("(blocks (w 1) (x 1)) (=0 x0_0)");
  const auto r2 = relative_join_formula(psi, 2);
  CHECK(r2.blocks == BlockSignature{1, 5});
  CHECK(atom_count(r2.tree) == 3);
  const std::string text = format_formula(r2);
  for (const char* v : {"x0_0", "x0_2", "x0_4"}) CHECK(text.find(v) != std::string::npos);
  // P^1 x P^2
  CHECK(cls(r2).poly_in_L == IntPoly{1, 2, 2, 1});

  CHECK(relative_join_formula(psi, 0) == psi);
}

TEST_CASE("relative join fibers are joins of fibers") {
  // Over w = (1:0) the fiber is all of P^1, over the other points of P^1 it
  // is a point. The join of p+1 lines is P^{2p+1} and of p+1 points is P^p,
  // so the class is [P^{2p+1}] + L [P^p].
  const auto psi = parse_formula("(blocks (w 1) (x 1)) (or (=0 w0_1) (=0 x0_0))");
  for (int p = 1; p <= 3; ++p) {
    const auto rj = relative_join_formula(psi, p);
    IntPoly expect = qpoly_multiproj(BlockSignature{2 * p + 1}) + IntPoly{0, 1} * qpoly_multiproj(BlockSignature{p});
    CHECK(cls(rj).poly_in_L == expect);
    for (unsigned long q : {2ul, 3ul})
      CHECK(count_points(rj, q) == poly_eval_int(expect, q));
  }
}

TEST_CASE("multijoin") {
  const auto a = parse_formula("(blocks (x 1)) (=0 x0_0)");
  const auto J = multijoin_formula({a, a});
  CHECK(J.blocks == BlockSignature{3});
  const std::string text = format_formula(J);
  CHECK(text.find("x0_0") != std::string::npos);
  CHECK(text.find("x0_2") != std::string::npos);
  CHECK(atom_count(J.tree) == 2);

  CHECK(multijoin_formula({a}) == a);

  const auto t = parse_formula("(blocks (x 2)) true");
  const auto Jt = multijoin_formula({t, t, t});
  CHECK(Jt.blocks == BlockSignature{8});
  CHECK(Jt.tree.kind == NodeKind::True);

  // mixed dimensions: a point of P^1 joined with a line of P^2 is a plane in P^4
  const auto b = parse_formula("(blocks (x 2)) (=0 x0_1)");
  CHECK(cls(multijoin_formula({a, b})).poly_in_L == IntPoly{1, 1, 1});
}

TEST_CASE("json tables") {
  const auto p = join_params({1}, {1, 1});
  const auto j = params_to_json(p);
  REQUIRE(j.at("levels").size() == 3);
  CHECK(j.at("levels")[2].at("d") == 148);
  CHECK(j.at("levels")[2].at("N") == 4);
  CHECK(j.at("levels")[1].at("m") == 7);
}
