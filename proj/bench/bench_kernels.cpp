// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <string>

#include "cohomqe/joinctor.hpp"
#include "cohomqe/motivic.hpp"

using namespace cohomqe;

namespace {

const ProperFormula& count_formula() {
  static const auto f = parse_formula(
      "(blocks (x 2) (x 2)) (or (and (=0 x0_0) (=0 x1_1)) (=0 (+ x0_1 (* 2 x0_2))) (and (=0 x1_0) (=0 x1_2)))");
  return f;
}

const ProperFormula& join_input() {
  static const auto f = parse_formula(
      "(blocks (w 1) (x 1) (x 1)) (prefix exists forall) (or (and (=0 w0_0) (=0 x0_0)) (=0 x1_1))");
  return f;
}

std::vector<LinearPiece> arrangement(int k) {
  std::string text = "(blocks (x 5)) (or";
  for (int i = 0; i < k; ++i)
    text += " (=0 (+ x0_" + std::to_string(i % 6) + " (* " + std::to_string(i + 1) + " x0_" +
            std::to_string((i + 1) % 6) + ")))";
  text += ")";
  return formula_to_pieces(parse_formula(text));
}

void BM_count_serial(benchmark::State& st) {
  const auto q = static_cast<unsigned long>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(count_points_serial(count_formula(), q));
}

void BM_count_parallel(benchmark::State& st) {
  const auto q = static_cast<unsigned long>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(count_points(count_formula(), q));
}

void BM_join_serial(benchmark::State& st) {
  const auto params = join_params(join_input());
  for (auto _ : st) benchmark::DoNotOptimize(build_join_formula_serial(join_input(), params));
}

void BM_join_parallel(benchmark::State& st) {
  const auto params = join_params(join_input());
  for (auto _ : st) benchmark::DoNotOptimize(build_join_formula(join_input(), params));
}

void BM_class_subsets(benchmark::State& st) {
  const auto ps = arrangement(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(pieces_class_subsets(ps));
}

void BM_class_union(benchmark::State& st) {
  const auto ps = arrangement(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(pieces_class(ps));
}

}  // namespace

BENCHMARK(BM_count_serial)->Arg(5)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_parallel)->Arg(5)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_join_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_join_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_class_subsets)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_class_union)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
