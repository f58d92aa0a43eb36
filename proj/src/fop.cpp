#include "cohomqe/fop.hpp"

#include "cohomqe/error.hpp"

namespace cohomqe {

IntPoly rec(const IntPoly& q, const BlockSignature& sig) {
  const long top = sig.total();
  if (q.degree() > top)
    throw Error("DegreeTooHigh", "Rec" + to_string(sig) + " needs degree <= " + std::to_string(top) +
                                     ", got " + std::to_string(q.degree()));
  return qpoly_multiproj(sig) - poly_reverse(q, top);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Maximal admissible input degree of a stage, or -1 when unbounded.
long stage_domain(const Stage& s) {
  return std::visit(overloaded{[](const stage::Rec& r) { return r.sig.total(); },
                               [](const stage::Trunc& t) { return t.domain; },
                               [](const stage::MulOneMinusTPow&) { return -1L; },
                               [](const stage::Pseudo&) { return -1L; }},
                    s);
}

long stage_output_bound(const Stage& s, long in) {
  return std::visit(overloaded{[](const stage::Rec& r) { return r.sig.total(); },
                               [](const stage::Trunc& t) { return t.keep; },
                               [in](const stage::MulOneMinusTPow& m) { return in + m.power; },
                               [in](const stage::Pseudo&) { return (in + 1) / 2; }},
                    s);
}

IntPoly apply_stage(const Stage& s, const IntPoly& q) {
  return std::visit(overloaded{[&](const stage::Rec& r) { return rec(q, r.sig); },
                               [&](const stage::Trunc& t) { return poly_trunc(q, t.keep); },
                               [&](const stage::MulOneMinusTPow& m) { return q * one_minus_t_pow(m.power); },
                               [&](const stage::Pseudo&) { return pseudo(q); }},
                    s);
}

}  // namespace

std::string to_string(const Stage& s) {
  return std::visit(
      overloaded{[](const stage::Rec& r) { return "Rec" + to_string(r.sig); },
                 [](const stage::Trunc& t) {
                   return "Trunc_{" + std::to_string(t.keep) + "," + std::to_string(t.domain) + "}";
                 },
                 [](const stage::MulOneMinusTPow& m) {
                   return m.power == 1 ? std::string("(1-T)") : "(1-T)^" + std::to_string(m.power);
                 },
                 [](const stage::Pseudo&) { return std::string("Pseudo"); }},
      s);
}

std::string to_string(const OperatorSpec& spec) {
  if (spec.stages.empty()) return "id";
  std::string out;
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    if (i) out += " o ";
    out += to_string(spec.stages[i]);
  }
  return out;
}

long check_degree_flow(const OperatorSpec& spec, long input_degree) {
  long bound = input_degree;
  for (std::size_t k = spec.stages.size(); k-- > 0;) {
    const long dom = stage_domain(spec.stages[k]);
    if (dom >= 0 && bound > dom)
      throw Error("DegreeTooHigh", "stage " + std::to_string(k) + " (" + to_string(spec.stages[k]) +
                                       ") accepts degree <= " + std::to_string(dom) +
                                       ", incoming bound is " + std::to_string(bound));
    bound = stage_output_bound(spec.stages[k], bound);
  }
  return bound;
}

OperatorSpec build_F_omega(const JoinParams& params, const std::vector<Quantifier>& omega) {
  if (static_cast<int>(omega.size()) != params.n)
    throw Error("LengthMismatch", "quantifier word has length " + std::to_string(omega.size()) +
                                      ", formula has " + std::to_string(params.n) + " bound blocks");
  OperatorSpec spec;
  for (int i = 1; i <= params.n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const bool forall = omega[iu - 1] == Quantifier::Forall;
    if (forall) spec.stages.emplace_back(stage::Rec{params.msig[iu - 1]});
    spec.stages.emplace_back(stage::Trunc{static_cast<long>(params.d[iu - 1]),
                                          static_cast<long>(params.d[iu] + params.N[iu])});
    spec.stages.emplace_back(stage::MulOneMinusTPow{static_cast<long>(params.N[iu])});
    if (forall) spec.stages.emplace_back(stage::Rec{params.msig[iu]});
  }
  spec.input_bound = static_cast<long>(params.d[static_cast<std::size_t>(params.n)]);
  check_degree_flow(spec, spec.input_bound);
  return spec;
}

IntPoly apply_operator_spec(const OperatorSpec& spec, const IntPoly& q,
                            std::vector<StageTrace>* trace) {
  IntPoly cur = q;
  for (std::size_t k = spec.stages.size(); k-- > 0;) {
    const long dom = stage_domain(spec.stages[k]);
    if (dom >= 0 && cur.degree() > dom)
      throw Error("DegreeTooHigh", "stage " + std::to_string(k) + " (" + to_string(spec.stages[k]) +
                                       ") accepts degree <= " + std::to_string(dom) + ", got " +
                                       std::to_string(cur.degree()));
    cur = apply_stage(spec.stages[k], cur);
    if (trace) trace->push_back({k, to_string(spec.stages[k]), cur});
  }
  return cur;
}

IntPoly qe_pseudo_poincare(const IntPoly& qJ, const JoinParams& params,
                           const std::vector<Quantifier>& omega, std::vector<StageTrace>* trace) {
  const OperatorSpec spec = build_F_omega(params, omega);
  if (qJ.degree() > spec.input_bound)
    throw Error("DegreeTooHigh", "Q(J) has degree " + std::to_string(qJ.degree()) + ", d_n is " +
                                     std::to_string(spec.input_bound));
  return apply_operator_spec(spec, qJ, trace);
}

bool decide_sentence(const IntPoly& qJ, const JoinParams& params,
                     const std::vector<Quantifier>& omega) {
  if (params.m != 0) throw Error("InvalidArgument", "decide_sentence needs a sentence (no free blocks)");
  const IntPoly r = qe_pseudo_poincare(qJ, params, omega);
  if (r == IntPoly{1}) return true;
  if (r.is_zero()) return false;
  throw Error("UnexpectedValue", "F^omega(Q(J)) = " + r.to_string() + ", expected 0 or 1");
}

}  // namespace cohomqe
