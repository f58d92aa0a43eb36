#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cohomqe/formula.hpp"
#include "cohomqe/joinctor.hpp"
#include "cohomqe/polyring.hpp"

namespace cohomqe {

/// Rec_n(q) = Q(P^n) - T^{|n|} q(1/T). An involution on polynomials of
/// degree <= |n|; maps Q of a closed set to Q of its complement and back.
IntPoly rec(const IntPoly& q, const BlockSignature& sig);

namespace stage {
struct Rec {
  BlockSignature sig;
};
struct Trunc {
  long keep;    // m: highest kept index
  long domain;  // n: maximal input degree
};
struct MulOneMinusTPow {
  long power;
};
struct Pseudo {};
}  // namespace stage

using Stage = std::variant<stage::Rec, stage::Trunc, stage::MulOneMinusTPow, stage::Pseudo>;

std::string to_string(const Stage& s);

/// A composite polynomial operator. `stages` is written outermost first, the
/// way compositions are read: {A, B, C} denotes A o B o C and C is applied first.
struct OperatorSpec {
  std::vector<Stage> stages;

  /// Highest input degree the spec accepts without DegreeTooHigh, if bounded.
  long input_bound = -1;
};

std::string to_string(const OperatorSpec& spec);

/// Propagates the degree bound `input_degree` through the stages, innermost
/// first, and returns the output bound. Throws DegreeTooHigh naming the first
/// stage whose domain the flowing bound exceeds.
long check_degree_flow(const OperatorSpec& spec, long input_degree);

/// F^omega = F_1 o ... o F_n with
///   F_i = Trunc(d_{i-1}, d_i + N_i) o (1-T)^{N_i}                       (exists)
///   F_i = Rec(m_{i-1}) o Trunc(d_{i-1}, d_i + N_i) o (1-T)^{N_i} o Rec(m_i) (forall)
OperatorSpec build_F_omega(const JoinParams& params, const std::vector<Quantifier>& omega);

struct StageTrace {
  std::size_t stage_index;  // position in spec.stages
  std::string description;
  IntPoly output;
};

/// Applies the stages innermost first. DegreeTooHigh reports the stage index.
IntPoly apply_operator_spec(const OperatorSpec& spec, const IntPoly& q,
                            std::vector<StageTrace>* trace = nullptr);

/// Q(psi^omega) from Q(J_{m,n}(psi)).
IntPoly qe_pseudo_poincare(const IntPoly& qJ, const JoinParams& params,
                           const std::vector<Quantifier>& omega,
                           std::vector<StageTrace>* trace = nullptr);

/// Truth of a sentence (m = 0) from Q(J_{0,n}(psi)). The result must be 0 or 1;
/// anything else throws UnexpectedValue.
bool decide_sentence(const IntPoly& qJ, const JoinParams& params,
                     const std::vector<Quantifier>& omega);

}  // namespace cohomqe
