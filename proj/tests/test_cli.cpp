#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cohomqe/cli.hpp"
#include "json.hpp"

using namespace cohomqe;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) {
  const char* root = std::getenv("COHOMQE_DATA");
  return std::string(root ? root : COHOMQE_TEST_DATA) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scratch(const std::string& name, const std::string& text) {
  const std::string path = "cli_" + name + ".sexp";
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string error_kind(const Run& r) {
  const auto j = nlohmann::json::parse(r.err);
  return j.at("error").at("kind").get<std::string>();
}

}  // namespace

TEST_CASE("join stats match the golden table") {
  const std::string out_path = "cli_join_out.sexp", stats_path = "cli_join_stats.json";
  const auto r = run({"join", "--formula", data("data/eg_qe.sexp"), "--out", out_path, "--stats", stats_path});
  REQUIRE(r.code == 0);
  CHECK(slurp(stats_path) == slurp(data("golden/eg_qe_stats.json")));
  const auto j = nlohmann::json::parse(slurp(stats_path));
  CHECK(j["stats"]["conjunct_count"] == 72);
  CHECK(j["stats"]["variable_count"] == 154);
  CHECK(slurp(out_path).rfind("(blocks (w 1) (x 7) (x 35) (x 35) (x 35) (x 35))", 0) == 0);
}

TEST_CASE("qe on the worked example") {
  const auto ea = run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--omega", "EA"});
  CHECK(ea.code == 0);
  CHECK(ea.out == "1\n");
  const auto ae = run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--omega", "AE"});
  CHECK(ae.code == 0);
  CHECK(ae.out == "0\n");
  // the prefix in the file is (exists forall)
  CHECK(run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q"}).out == "1\n");

  const auto js = run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--json", "--trace"});
  const auto j = nlohmann::json::parse(js.out);
  CHECK(j["poly"].dump() == R"(["1"])");
  CHECK(j["trace"].size() == 6);
  CHECK(j["q_join"].size() == 144);
}

TEST_CASE("qe from a stored join polynomial") {
  const auto full = run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--json"});
  const auto q = nlohmann::json::parse(full.out)["q_join"];
  const std::string path = "cli_qjoin.json";
  std::ofstream(path) << nlohmann::json{{"poly", q}}.dump();
  CHECK(run({"qe", "--formula", data("data/eg_qe.sexp"), "--q-join", path, "--omega", "EA"}).out == "1\n");
  CHECK(run({"qe", "--formula", data("data/eg_qe.sexp"), "--q-join", path, "--compute-q"}).code == 2);
}

TEST_CASE("decide") {
  const auto empty = scratch("empty", "(blocks (x 1)) (prefix exists) (and (=0 x0_0) (=0 x0_1))");
  const auto f = run({"decide", "--formula", empty});
  CHECK(f.out == "false\n");
  CHECK(f.code == 1);
  const auto pt = scratch("pt", "(blocks (x 1)) (prefix exists) (=0 x0_0)");
  const auto t = run({"decide", "--formula", pt});
  CHECK(t.out == "true\n");
  CHECK(t.code == 0);
  CHECK(run({"decide", "--formula", pt, "--omega", "A"}).out == "false\n");
  CHECK(run({"decide", "--formula", data("data/eg_qe.sexp")}).code == 3);
}

TEST_CASE("usage errors exit 2") {
  const auto r = run({"qe", "--formula", data("data/eg_qe.sexp"), "--bogus"});
  CHECK(r.code == 2);
  CHECK(error_kind(r) == "UsageError");
  CHECK(run({}).code == 2);
  CHECK(run({"count", "--formula", data("data/eg_qe.sexp")}).code == 2);
  CHECK(run({"class", "--formula", data("data/eg_qe.sexp"), "--from-counts", "2,4"}).code == 2);
  CHECK(run({"class", "--formula", data("data/eg_qe.sexp"), "--from-counts", "2,2,3"}).code == 2);
  CHECK(run({"bounds", "--kind", "nope", "--args", "N=1"}).code == 2);
  CHECK(run({"bounds", "--kind", "B", "--args", "N=1,r=1"}).code == 2);
  CHECK(run({"bounds", "--kind", "B", "--method", "zz", "--args", "N=1,r=1,d=1"}).code == 2);
  CHECK(run({"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--omega", "EX"}).code == 2);
}

TEST_CASE("computation errors exit 3 with a structured error") {
  const auto missing = run({"qpoly", "--formula", "no/such/file.sexp"});
  CHECK(missing.code == 3);
  CHECK(error_kind(missing) == "IOError");

  const auto bad = scratch("bad", "(blocks (x 1)) (=0 x0_0");
  const auto syn = run({"qpoly", "--formula", bad});
  CHECK(syn.code == 3);
  CHECK(error_kind(syn) == "SyntaxError");

  const auto nonlin = scratch("nonlin", "(blocks (x 1)) (=0 (* x0_0 x0_1))");
  CHECK(error_kind(run({"qpoly", "--formula", nonlin})) == "NonLinearAtom");

  const auto big = scratch("big", "(blocks (x 9)) true");
  CHECK(error_kind(run({"count", "--formula", big, "--prime", "7", "--budget", "100"})) == "BudgetExceeded");
}

TEST_CASE("qpoly, count and class") {
  const auto lines = scratch("lines", "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))");
  CHECK(run({"qpoly", "--formula", lines}).out == "{\"poly\":[\"1\",\"2\"]}\n");
  CHECK(run({"qpoly", "--formula", lines, "--poincare"}).out == "{\"poly\":[\"1\",\"0\",\"2\"]}\n");
  const auto tri = scratch("tri", "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1) (=0 x0_2))");
  // b = 1, 1, 3 gives 1 + (3 - 1)T
  CHECK(run({"qpoly", "--formula", tri}).out == "{\"poly\":[\"1\",\"2\"]}\n");

  CHECK(run({"count", "--formula", lines, "--prime", "5"}).out == "11\n");
  CHECK(run({"count", "--formula", lines, "--prime", "5", "--json"}).out == "{\"prime\":5,\"count\":\"11\"}\n");
  CHECK(run({"count", "--formula", lines, "--prime", "4"}).code == 3);
  CHECK(run({"class", "--formula", lines}).out == "1 + 2*L\n");
  CHECK(run({"class", "--formula", lines, "--from-counts", "2,3,5", "--json"}).out ==
        "{\"class_in_L\":[\"1\",\"2\"]}\n");
}

TEST_CASE("bounds") {
  CHECK(run({"bounds", "--kind", "B", "--method", "as", "--args", "N=1,r=1,d=1"}).out == "51\n");
  const auto j = nlohmann::json::parse(
      run({"bounds", "--kind", "projective", "--args", "N=1,r=1,d=1", "--json"}).out);
  CHECK(j["value"] == "52");
  const auto sweep = run({"bounds", "--kind", "euler", "--args", "r=1,d=1", "--sweep", "N=1..3"});
  CHECK(sweep.out == "N,value\n1,6\n2,18\n3,54\n");
  const auto img = nlohmann::json::parse(
      run({"bounds", "--kind", "image", "--args", "N=0,M=0,r=1,d1=1,d2=1,p=1", "--json"}).out);
  CHECK(img.contains("exact"));
}

TEST_CASE("compare") {
  const auto gap = run({"compare", "gap", "--n-max", "3", "--csv"});
  CHECK(gap.code == 0);
  std::istringstream lines(gap.out);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "n,hypercover,join,ratio");
  CHECK(first == "1,3,2,1.500000e+00");
  const auto defect = run({"compare", "defect", "--n", "5", "--r", "1"});
  CHECK(nlohmann::json::parse(defect.out)["betti"].dump() == "[1,0,1,0]");
  CHECK(run({"compare", "defect", "--n", "2", "--r", "2"}).code == 3);
}

TEST_CASE("verify") {
  const auto pts = scratch("pts", "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))");
  const auto c = run({"verify", "connectivity", "--formula", pts, "--p", "3", "--json"});
  CHECK(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["holds"] == true);
  const auto desk = scratch("desk", "(blocks (w 1) (x 1)) (and (=0 w0_0) (or (=0 x0_0) (=0 x0_1)))");
  const auto p = run({"verify", "poincare", "--formula", desk, "--p", "3"});
  CHECK(p.out == "holds\n");
  CHECK(run({"verify", "poincare", "--formula", desk, "--p", "0"}).code == 2);
}

TEST_CASE("identical inputs give identical bytes") {
  const std::vector<std::vector<std::string>> cmds = {
      {"join", "--formula", data("data/eg_qe.sexp")},
      {"qe", "--formula", data("data/eg_qe.sexp"), "--compute-q", "--json", "--trace"},
      {"compare", "gap", "--n-max", "10"},
      {"bounds", "--kind", "B", "--args", "N=2,r=2,d=2", "--json", "--trace"},
  };
  for (const auto& cmd : cmds) {
    const auto a = run(cmd), b = run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("thread count from the environment") {
  const auto lines = scratch("lines_env", "(blocks (x 3)) (or (=0 x0_0) (=0 x0_1))");
  const auto base = run({"count", "--formula", lines, "--prime", "7", "--threads", "1"});
  setenv("COHOMQE_THREADS", "3", 1);
  CHECK(run({"count", "--formula", lines, "--prime", "7", "--threads", "1"}).out == base.out);
  setenv("COHOMQE_THREADS", "x", 1);
  CHECK(run({"count", "--formula", lines, "--prime", "7"}).code == 2);
  unsetenv("COHOMQE_THREADS");
}
