#include "cohomqe/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "cohomqe/bounds.hpp"
#include "cohomqe/compare.hpp"
#include "cohomqe/error.hpp"
#include "cohomqe/fop.hpp"
#include "cohomqe/formula.hpp"
#include "cohomqe/joinctor.hpp"
#include "cohomqe/motivic.hpp"

namespace cohomqe {

namespace {

using ojson = nlohmann::ordered_json;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string formula;
  std::string out_path;
  std::string stats_path;
  std::string q_join;
  std::string omega;
  std::string prime_list;
  std::string kind;
  std::string method = "as";
  std::string bound_args;
  std::string sweep;
  std::size_t piece_cap = 4096;
  std::uint64_t budget = 10'000'000;
  unsigned long prime = 0;
  long p = 0;
  long n_max = 20;
  long n = 0, r = 0, N = 0;
  int threads = 0;
  bool sentence = false;
  bool compute_q = false;
  bool json = false;
  bool csv = false;
  bool trace = false;
  bool poincare = false;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IOError", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error("IOError", "cannot write '" + path + "'");
  o << text;
}

ojson poly_json(const IntPoly& q) { return ojson{{"poly", poly_to_json(q)}}; }

IntPoly read_poly_file(const std::string& path) {
  const auto j = nlohmann::json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) throw Error("SyntaxError", "'" + path + "' is not JSON");
  return poly_from_json(j.is_object() ? j.at("poly") : j);
}

std::vector<unsigned long> parse_primes(const std::string& s) {
  std::vector<unsigned long> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw Usage("--from-counts: bad entry '" + tok + "'");
    const unsigned long q = std::stoul(tok);
    if (!is_prime(q)) throw Usage("--from-counts: " + tok + " is not prime");
    if (std::find(out.begin(), out.end(), q) != out.end())
      throw Usage("--from-counts: " + tok + " repeated");
    out.push_back(q);
  }
  if (out.empty()) throw Usage("--from-counts: empty prime list");
  return out;
}

std::vector<Quantifier> resolve_omega(const RunConfig& c, const ProperFormula& f) {
  if (!c.omega.empty()) {
    try {
      return parse_quantifier_word(c.omega);
    } catch (const Error& e) {
      throw Usage("--omega: " + std::string(e.what()));
    }
  }
  if (f.prefix) return *f.prefix;
  throw Usage("no quantifier prefix in the formula and no --omega given");
}

IntPoly join_q(const ProperFormula& psi, const JoinParams& params, const PieceOptions& opts) {
  const auto J = build_join_formula(psi, params);
  return pseudo(union_poincare(formula_to_pieces(J, opts)));
}

int cmd_join(const RunConfig& c, std::ostream& out) {
  const auto psi = read_formula_file(c.formula);
  if (c.sentence && psi.free_count != 0) throw Error("BlockMismatch", "--sentence given but the formula has free blocks");
  const auto params = join_params(psi);
  const auto J = build_join_formula(psi, params);
  const std::string text = format_formula(J) + "\n";
  ojson stats;
  stats["params"] = params_to_json(params);
  stats["stats"] = stats_to_json(join_size_stats(psi, params));
  const std::string stats_text = stats.dump(2) + "\n";
  if (!c.out_path.empty())
    write_text(c.out_path, text);
  else
    out << text;
  if (!c.stats_path.empty())
    write_text(c.stats_path, stats_text);
  else if (!c.out_path.empty())
    out << stats_text;
  return 0;
}

int cmd_qe(const RunConfig& c, std::ostream& out) {
  const auto psi = read_formula_file(c.formula);
  const auto omega = resolve_omega(c, psi);
  if (c.q_join.empty() == !c.compute_q) throw Usage("give exactly one of --q-join and --compute-q");
  const auto params = join_params(psi);
  const IntPoly qJ = c.compute_q ? join_q(psi, params, {c.piece_cap}) : read_poly_file(c.q_join);
  std::vector<StageTrace> trace;
  const IntPoly result = qe_pseudo_poincare(qJ, params, omega, c.trace ? &trace : nullptr);
  if (c.json) {
    ojson j;
    j["omega"] = quantifier_word(omega);
    j["operator"] = to_string(build_F_omega(params, omega));
    j["q_join"] = poly_to_json(qJ);
    if (c.trace) {
      auto stages = ojson::array();
      for (const auto& t : trace)
        stages.push_back(ojson{{"stage", t.stage_index}, {"op", t.description}, {"poly", poly_to_json(t.output)}});
      j["trace"] = std::move(stages);
    }
    j["poly"] = poly_to_json(result);
    out << j.dump() << "\n";
  } else {
    if (c.trace)
      for (const auto& t : trace) out << "# " << t.stage_index << " " << t.description << ": " << t.output.to_string() << "\n";
    out << result.to_string() << "\n";
  }
  return 0;
}

int cmd_decide(const RunConfig& c, std::ostream& out) {
  const auto psi = read_formula_file(c.formula);
  if (psi.free_count != 0) throw Error("BlockMismatch", "decide needs a sentence (no free blocks)");
  const auto omega = resolve_omega(c, psi);
  const auto params = join_params(psi);
  const IntPoly qJ = c.q_join.empty() ? join_q(psi, params, {c.piece_cap}) : read_poly_file(c.q_join);
  const bool truth = decide_sentence(qJ, params, omega);
  out << (truth ? "true" : "false") << "\n";
  return truth ? 0 : 1;
}

int cmd_qpoly(const RunConfig& c, std::ostream& out) {
  const auto phi = read_formula_file(c.formula);
  const IntPoly P = union_poincare(formula_to_pieces(phi, {c.piece_cap}));
  out << poly_json(c.poincare ? P : pseudo(P)).dump() << "\n";
  return 0;
}

int cmd_count(const RunConfig& c, std::ostream& out) {
  const auto phi = read_formula_file(c.formula);
  const BigInt n = count_points(phi, c.prime, c.budget);
  if (c.json)
    out << ojson{{"prime", c.prime}, {"count", n.get_str()}}.dump() << "\n";
  else
    out << n.get_str() << "\n";
  return 0;
}

int cmd_class(const RunConfig& c, std::ostream& out) {
  const auto phi = read_formula_file(c.formula);
  const GrothClass cls = c.prime_list.empty() ? pieces_class(formula_to_pieces(phi, {c.piece_cap}))
                                              : class_from_counts(phi, parse_primes(c.prime_list), c.budget);
  if (c.json)
    out << ojson{{"class_in_L", poly_to_json(cls.poly_in_L)}}.dump() << "\n";
  else
    out << cls.poly_in_L.to_string('L') << "\n";
  return 0;
}

std::map<std::string, long> parse_kv(const std::string& s) {
  std::map<std::string, long> kv;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw Usage("--args: expected key=value, got '" + tok + "'");
    try {
      kv[tok.substr(0, eq)] = std::stol(tok.substr(eq + 1));
    } catch (const std::exception&) {
      throw Usage("--args: bad value in '" + tok + "'");
    }
  }
  return kv;
}

const std::map<std::string, std::vector<std::string>>& bound_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"euler", {"N", "r", "d"}},          {"A", {"N", "r", "d"}},
      {"B", {"N", "r", "d"}},              {"affine", {"N", "r", "d"}},
      {"projective", {"N", "r", "d"}},     {"biproj", {"N", "M", "r", "d1", "d2"}},
      {"image", {"N", "M", "r", "d1", "d2", "p"}},
  };
  return keys;
}

ojson eval_bound(const std::string& kind, BoundMethod m, const std::map<std::string, long>& a,
                 BoundTrace* trace) {
  auto g = [&](const char* k) { return a.at(k); };
  ojson v;
  if (kind == "euler") v["value"] = euler_bound(g("N"), g("r"), g("d"), m, trace).get_str();
  else if (kind == "A") v["value"] = katz_A(g("N"), g("r"), g("d"), m, trace).get_str();
  else if (kind == "B") v["value"] = katz_B(g("N"), g("r"), g("d"), m, trace).get_str();
  else if (kind == "affine") v["value"] = affine_betti_bound(g("N"), g("r"), g("d"), m, trace).get_str();
  else if (kind == "projective") v["value"] = projective_betti_bound(g("N"), g("r"), g("d"), m, trace).get_str();
  else if (kind == "biproj")
    v["value"] = biprojective_bound(g("N"), g("M"), g("r"), g("d1"), g("d2"), m, trace).get_str();
  else {
    const auto ib = image_betti_bound(g("N"), g("M"), g("r"), g("d1"), g("d2"), g("p"), m, trace);
    v["value"] = ib.ceiling.get_str();
    v["exact"] = ib.exact.get_str();
  }
  return v;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const auto it = bound_keys().find(c.kind);
  if (it == bound_keys().end()) throw Usage("--kind: unknown kind '" + c.kind + "'");
  BoundMethod method;
  try {
    method = parse_bound_method(c.method);
  } catch (const Error& e) {
    throw Usage("--method: " + std::string(e.what()));
  }
  auto args = parse_kv(c.bound_args);

  std::string sweep_key;
  long lo = 0, hi = -1;
  if (!c.sweep.empty()) {
    const auto eq = c.sweep.find('=');
    const auto dots = c.sweep.find("..");
    if (eq == std::string::npos || dots == std::string::npos || dots < eq)
      throw Usage("--sweep: expected KEY=LO..HI");
    sweep_key = c.sweep.substr(0, eq);
    try {
      lo = std::stol(c.sweep.substr(eq + 1, dots - eq - 1));
      hi = std::stol(c.sweep.substr(dots + 2));
    } catch (const std::exception&) {
      throw Usage("--sweep: bad range in '" + c.sweep + "'");
    }
    if (hi < lo) throw Usage("--sweep: empty range");
    args[sweep_key] = lo;
  }
  for (const auto& k : it->second)
    if (!args.count(k)) throw Usage("--args: missing " + k + " for kind " + c.kind);
  for (const auto& [k, v] : args)
    if (std::find(it->second.begin(), it->second.end(), k) == it->second.end())
      throw Usage("--args: unexpected key " + k + " for kind " + c.kind);

  if (!sweep_key.empty()) {
    out << sweep_key << ",value\n";
    for (long x = lo; x <= hi; ++x) {
      args[sweep_key] = x;
      out << x << "," << eval_bound(c.kind, method, args, nullptr)["value"].get<std::string>() << "\n";
    }
    return 0;
  }

  BoundTrace trace;
  ojson v = eval_bound(c.kind, method, args, c.trace ? &trace : nullptr);
  if (c.json) {
    ojson j;
    j["kind"] = c.kind;
    j["method"] = to_string(method);
    ojson a;
    for (const auto& k : it->second) a[k] = args.at(k);
    j["args"] = std::move(a);
    j["value"] = v["value"];
    if (v.contains("exact")) j["exact"] = v["exact"];
    if (c.trace) j["trace"] = trace;
    out << j.dump() << "\n";
  } else {
    for (const auto& t : trace) out << "# " << t << "\n";
    out << v["value"].get<std::string>() << "\n";
  }
  return 0;
}

std::string ratio_text(const BigRat& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", r.get_d());
  return buf;
}

int cmd_gap(const RunConfig& c, std::ostream& out) {
  if (c.n_max < 1) throw Usage("--n-max must be >= 1");
  const auto rows = gap_table(c.n_max);
  if (c.csv) {
    out << "n,hypercover,join,ratio\n";
    for (const auto& r : rows)
      out << r.n << "," << r.hypercover.get_str() << "," << r.join.get_str() << "," << ratio_text(r.ratio) << "\n";
    return 0;
  }
  auto a = ojson::array();
  for (const auto& r : rows)
    a.push_back(ojson{{"n", r.n},
                      {"hypercover", r.hypercover.get_str()},
                      {"join", r.join.get_str()},
                      {"ratio", r.ratio.get_str()}});
  out << a.dump() << "\n";
  return 0;
}

int cmd_defect(const RunConfig& c, std::ostream& out) {
  out << to_json(join_defect_betti(c.N, c.n, c.r)).dump() << "\n";
  return 0;
}

int cmd_verify(const std::string& which, const RunConfig& c, std::ostream& out) {
  if (c.p < 1) throw Usage("--p must be >= 1");
  const auto psi = read_formula_file(c.formula);
  bool holds;
  ojson j;
  if (which == "poincare") {
    const auto rep = verify_poincare_congruence(psi, c.p, {c.piece_cap});
    holds = rep.holds;
    j = to_json(rep);
  } else {
    const auto rep = verify_join_connectivity(psi, c.p, {c.piece_cap});
    holds = rep.holds;
    j = to_json(rep);
  }
  if (c.json)
    out << j.dump() << "\n";
  else
    out << (holds ? "holds" : "fails") << "\n";
  return holds ? 0 : 1;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message) {
  err << ojson{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"cohomqe: quantifier elimination through Betti numbers"};
  app.require_subcommand(1);
  app.add_option("--threads", c.threads, "worker threads (COHOMQE_THREADS overrides)")->check(CLI::NonNegativeNumber);

  auto formula_opt = [&](CLI::App* s) { s->add_option("--formula", c.formula, "formula file")->required(); };
  auto cap_opt = [&](CLI::App* s) {
    s->add_option("--piece-cap", c.piece_cap, "DNF piece cap")->check(CLI::PositiveNumber);
  };
  auto budget_opt = [&](CLI::App* s) {
    s->add_option("--budget", c.budget, "point enumeration budget")->check(CLI::PositiveNumber);
  };

  auto* join = app.add_subcommand("join", "build the join formula");
  formula_opt(join);
  join->add_flag("--sentence", c.sentence, "require a sentence");
  join->add_option("--out", c.out_path, "join formula output");
  join->add_option("--stats", c.stats_path, "parameter and size JSON output");

  auto* qe = app.add_subcommand("qe", "Q of the quantified formula");
  formula_opt(qe);
  cap_opt(qe);
  qe->add_option("--q-join", c.q_join, "JSON file with Q of the join");
  qe->add_flag("--compute-q", c.compute_q, "compute Q of the join");
  qe->add_option("--omega", c.omega, "quantifier word over E/A, outermost first");
  qe->add_flag("--json", c.json);
  qe->add_flag("--trace", c.trace, "print every stage");

  auto* decide = app.add_subcommand("decide", "truth of a sentence");
  formula_opt(decide);
  cap_opt(decide);
  decide->add_option("--q-join", c.q_join, "JSON file with Q of the join");
  decide->add_option("--omega", c.omega, "quantifier word over E/A");

  auto* qpoly = app.add_subcommand("qpoly", "Q or P of the realization");
  formula_opt(qpoly);
  cap_opt(qpoly);
  qpoly->add_flag("--poincare", c.poincare, "print P instead of Q");

  auto* count = app.add_subcommand("count", "F_q point count");
  formula_opt(count);
  budget_opt(count);
  count->add_option("--prime", c.prime, "prime q")->required();
  count->add_flag("--json", c.json);

  auto* cls = app.add_subcommand("class", "class in the Grothendieck ring");
  formula_opt(cls);
  cap_opt(cls);
  budget_opt(cls);
  cls->add_option("--from-counts", c.prime_list, "interpolate point counts at these primes");
  cls->add_flag("--json", c.json);

  auto* bounds = app.add_subcommand("bounds", "explicit Betti bounds");
  bounds->add_option("--kind", c.kind, "euler|A|B|affine|projective|biproj|image")->required();
  bounds->add_option("--method", c.method, "bombieri|as|char0");
  bounds->add_option("--args", c.bound_args, "e.g. N=1,r=1,d=1");
  bounds->add_option("--sweep", c.sweep, "CSV sweep, e.g. N=1..10");
  bounds->add_flag("--json", c.json);
  bounds->add_flag("--trace", c.trace);

  auto* compare = app.add_subcommand("compare", "hypercover versus join");
  compare->require_subcommand(1);
  auto* gap = compare->add_subcommand("gap", "gap table");
  gap->add_option("--n-max", c.n_max);
  gap->add_flag("--csv", c.csv);
  auto* defect = compare->add_subcommand("defect", "join defect Betti numbers");
  defect->add_option("--n", c.n)->required();
  defect->add_option("--r", c.r)->required();
  defect->add_option("--N", c.N);

  auto* verify = app.add_subcommand("verify", "check a join theorem on a formula");
  verify->require_subcommand(1);
  std::vector<CLI::App*> verifiers;
  for (const char* name : {"poincare", "connectivity"}) {
    auto* v = verify->add_subcommand(name);
    formula_opt(v);
    cap_opt(v);
    v->add_option("--p", c.p)->required();
    v->add_flag("--json", c.json);
    verifiers.push_back(v);
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "UsageError", e.what());
    return 2;
  }

  if (const char* env = std::getenv("COHOMQE_THREADS"); env && *env) {
    try {
      c.threads = std::stoi(env);
    } catch (const std::exception&) {
      error_json(err, "UsageError", "COHOMQE_THREADS is not an integer");
      return 2;
    }
  }
  set_thread_count(c.threads);

  try {
    if (*join) return cmd_join(c, out);
    if (*qe) return cmd_qe(c, out);
    if (*decide) return cmd_decide(c, out);
    if (*qpoly) return cmd_qpoly(c, out);
    if (*count) return cmd_count(c, out);
    if (*cls) return cmd_class(c, out);
    if (*bounds) return cmd_bounds(c, out);
    if (*gap) return cmd_gap(c, out);
    if (*defect) return cmd_defect(c, out);
    if (*verifiers[0]) return cmd_verify("poincare", c, out);
    return cmd_verify("connectivity", c, out);
  } catch (const Usage& e) {
    error_json(err, "UsageError", e.what());
    return 2;
  } catch (const Error& e) {
    error_json(err, e.kind(), e.what());
    return 3;
  } catch (const std::exception& e) {
    error_json(err, "InternalError", e.what());
    return 3;
  }
}

}  // namespace cohomqe
