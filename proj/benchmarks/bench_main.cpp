#include <benchmark/benchmark.h>

#include "vna/evaluate.hpp"
#include "vna/parser.hpp"

namespace {

using namespace vna;

void BM_dyadic_mul(benchmark::State& state) {
  Dyadic a(BigInt(982451653), 17), b(BigInt(-32452843), 9);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_dyadic_mul);

void BM_eval_qf_commutator(benchmark::State& state) {
  TracialAlgebra a = TracialAlgebra::matrix(static_cast<int>(state.range(0)));
  FormulaPtr f = parse_formula("d(x * y, y * x)");
  Assignment asg{{"x", random_unit_ball(a, 1)}, {"y", random_unit_ball(a, 2)}};
  for (auto _ : state) benchmark::DoNotOptimize(eval_qf(a, *f, asg));
}
BENCHMARK(BM_eval_qf_commutator)->DenseRange(1, 4, 1);

void BM_optimize_m2(benchmark::State& state) {
  TracialAlgebra a = TracialAlgebra::matrix(2);
  FormulaPtr f = parse_formula("sup x . sup y . d(x * y, y * x)");
  EvalOptions opts;
  opts.heuristic_budget = 500;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(a, f, opts));
}
BENCHMARK(BM_optimize_m2);

void BM_certify_m1_commutator(benchmark::State& state) {
  TracialAlgebra a = TracialAlgebra::matrix(1);
  FormulaPtr f = parse_formula("sup x . sup y . d(x * y, y * x)");
  Dyadic eps = Dyadic(1).div_pow2(2);
  for (auto _ : state) benchmark::DoNotOptimize(certify(a, f, eps));
}
BENCHMARK(BM_certify_m1_commutator);

void BM_project_unit_ball(benchmark::State& state) {
  TracialAlgebra a = TracialAlgebra::matrix(static_cast<int>(state.range(0)));
  AlgElement x = scale(2.0, random_unit_ball(a, 3));
  for (auto _ : state) benchmark::DoNotOptimize(project_unit_ball(x));
}
BENCHMARK(BM_project_unit_ball)->DenseRange(2, 8, 2);

}  // namespace

BENCHMARK_MAIN();
