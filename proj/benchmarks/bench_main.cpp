#include <benchmark/benchmark.h>

#include "vlnc/solver.hpp"
#include "vlnc/zoo.hpp"

using namespace vlnc;

namespace {

void BM_FieldMul(benchmark::State& state) {
    const Field& f = Field::get(3, 2);
    int acc = 1;
    for (auto _ : state) {
        for (int a = 1; a < f.size(); ++a) acc = f.mul(acc, a);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_FieldMul);

void BM_MatMul3(benchmark::State& state) {
    const Field& f = Field::get(5, 1);
    Mat a = mat_from_string(f, "[[1,2,3],[0,1,4],[2,0,1]]");
    Mat b = mat_from_string(f, "[[2,0,1],[1,1,0],[3,2,1]]");
    for (auto _ : state) benchmark::DoNotOptimize(mat_mul(a, b));
}
BENCHMARK(BM_MatMul3);

void BM_RingMul(benchmark::State& state) {
    const MatrixRing& R = MatrixRing::get(2, 2);
    int acc = R.one();
    for (auto _ : state) {
        for (int a = 1; a < R.size(); ++a) acc = R.mul(acc, a);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_RingMul);

void BM_EvaluateGlobalN1(benchmark::State& state) {
    Network net = build_n1(2);
    auto code = code_n1_dim2(2, Field::get(2, 1));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_global(net, code));
}
BENCHMARK(BM_EvaluateGlobalN1);

void BM_VerifyN1Dim2(benchmark::State& state) {
    Network net = build_n1(2);
    auto code = code_n1_dim2(2, Field::get(3, 1));
    for (auto _ : state) benchmark::DoNotOptimize(verify_solution(net, code));
}
BENCHMARK(BM_VerifyN1Dim2);

void BM_VerifyRing16(benchmark::State& state) {
    Network net = build_n1(2);
    auto code = code_n1_ring16(2);
    for (auto _ : state) benchmark::DoNotOptimize(verify_solution(net, code));
}
BENCHMARK(BM_VerifyRing16);

void BM_SolveM2Scalar(benchmark::State& state) {
    Network net = build_m2();
    SearchConfig cfg;
    cfg.field = &Field::get(3, 1);
    cfg.dim = 1;
    for (auto _ : state) benchmark::DoNotOptimize(solve(net, cfg));
}
BENCHMARK(BM_SolveM2Scalar);

void BM_CensusCharQsGF2(benchmark::State& state) {
    Network net = build_char_qs(2);
    SearchConfig cfg;
    cfg.field = &Field::get(2, 1);
    cfg.dim = 1;
    auto pred = CensusPredicate::global_nonzero("x1", "e1");
    for (auto _ : state) benchmark::DoNotOptimize(census(net, cfg, pred));
}
BENCHMARK(BM_CensusCharQsGF2);

void BM_ProbeCharM2(benchmark::State& state) {
    Network net = build_char_m(2);
    SearchConfig cfg;
    std::vector<const Field*> fields = {&Field::get(2, 1), &Field::get(3, 1)};
    for (auto _ : state) benchmark::DoNotOptimize(probe_characteristics(net, 1, fields, cfg));
}
BENCHMARK(BM_ProbeCharM2);

} // namespace

BENCHMARK_MAIN();
