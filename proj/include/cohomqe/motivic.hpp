#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cohomqe/formula.hpp"
#include "cohomqe/linalg.hpp"
#include "cohomqe/polyring.hpp"

namespace cohomqe {

/// A product of projective-linear subspaces, one per block, each cut out by a
/// system of linear forms kept in reduced row-echelon form. Pieces held by
/// the library are always nonempty: rank(block i) <= n_i.
struct LinearPiece {
  BlockSignature blocks;
  std::vector<RatMatrix> systems;

  static LinearPiece full(const BlockSignature& blocks);

  int rank(std::size_t block) const { return static_cast<int>(systems[block].size()); }
  /// Dimension of the linear space in block i: n_i - r_i.
  int dim(std::size_t block) const { return blocks.dims[block] - rank(block); }
  /// prod_i [P^{n_i - r_i}] = prod_i (1 + L + ... + L^{n_i - r_i}).
  IntPoly class_in_L() const;
  /// Set inclusion: this piece lies inside `other`.
  bool subset_of(const LinearPiece& other) const;

  friend bool operator==(const LinearPiece& a, const LinearPiece& b);
  friend bool operator<(const LinearPiece& a, const LinearPiece& b);
};

/// Class in the Grothendieck ring, as a polynomial in the Lefschetz class L.
struct GrothClass {
  IntPoly poly_in_L;
  friend bool operator==(const GrothClass&, const GrothClass&) = default;
};

struct PieceOptions {
  std::size_t piece_cap = 4096;  // surviving partial pieces during DNF expansion
};

/// R(phi) as a union of linear pieces, by DNF expansion with eager pruning of
/// empty partial conjunctions, deduplication and subsumption removal.
/// Atoms must be linear forms in a single block (constant atoms are allowed:
/// 0 is true, a nonzero constant is false).
std::vector<LinearPiece> formula_to_pieces(const ProperFormula& phi, const PieceOptions& opts = {});

std::optional<LinearPiece> intersect_pieces(const LinearPiece& a, const LinearPiece& b);

/// Deduplicates and drops every piece contained in another one.
std::vector<LinearPiece> reduce_pieces(std::vector<LinearPiece> pieces);

/// [union of pieces]. Uses [A u B] = [A] + [B] - [A n B] recursively, with
/// intersections reduced at every level; no limit on the piece count.
GrothClass pieces_class(const std::vector<LinearPiece>& pieces);

/// Reference implementation: literal inclusion-exclusion over all nonempty
/// subsets, pruning supersets of empty intersections. At most 20 pieces.
GrothClass pieces_class_subsets(const std::vector<LinearPiece>& pieces);

/// Q with L -> T; P with L -> T^2. Throws NegativeCoefficient.
IntPoly class_to_Q(const GrothClass& c);
IntPoly class_to_P(const GrothClass& c);

struct BettiOptions {
  std::size_t flat_cap = 250'000;    // distinct intersections of pieces
  std::size_t face_cap = 6'000'000;  // simplices kept per nerve
};

/// Betti numbers b_0..b_{max_degree} of the union of the pieces.
///
/// The Mayer-Vietoris spectral sequence of the cover by pieces degenerates at
/// E_2 for weight reasons, so b_j = sum_k h^{j-2k}(N_k) where N_k is the nerve
/// of the pieces whose common intersection has dimension >= k. N_k is modelled
/// by the complex on the minimal flats of dimension >= k, a set of them being a
/// simplex when one piece contains all of them. Ranks are taken mod a 61-bit
/// prime.
std::vector<BigInt> union_betti(const std::vector<LinearPiece>& pieces, long max_degree,
                                const BettiOptions& opts = {});

/// P of the union from union_betti, up to twice the largest piece dimension.
IntPoly union_poincare(const std::vector<LinearPiece>& pieces, const BettiOptions& opts = {});

/// Image under the coordinate projection onto the blocks in `keep`.
std::vector<LinearPiece> project_pieces(const std::vector<LinearPiece>& pieces,
                                        const std::vector<int>& keep);

/// Number of F_q-points of R(phi) by enumeration of projective points.
/// Budget applies to prod_i (q^{n_i+1} - 1)/(q - 1). Uses OpenMP.
BigInt count_points(const ProperFormula& phi, unsigned long q,
                    std::uint64_t budget = 10'000'000);

/// Single-threaded odometer enumeration; same contract as count_points.
BigInt count_points_serial(const ProperFormula& phi, unsigned long q,
                           std::uint64_t budget = 10'000'000);

/// Interpolates the point counts at the given primes. Needs at least
/// |n| + 1 primes; throws NotPolynomialCount when the interpolant is not an
/// integer polynomial of degree <= |n|.
GrothClass class_from_counts(const ProperFormula& phi, const std::vector<unsigned long>& primes,
                             std::uint64_t budget = 10'000'000);

bool is_prime(unsigned long q);

/// Thread count used by OpenMP regions; 0 keeps the runtime default.
void set_thread_count(int threads);

}  // namespace cohomqe
