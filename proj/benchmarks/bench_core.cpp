#include <benchmark/benchmark.h>

#include "gbulab/operators.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/spectral.hpp"
#include "gbulab/timestepper.hpp"

using namespace gbulab;

namespace {

Grid make(std::int64_t dim, std::int64_t n) {
    const auto m = static_cast<std::size_t>(n);
    return dim == 1 ? Grid::interval({0.0, 1.0}, m) : Grid::rectangle({0.0, 1.0}, {0.0, 1.0}, m, m);
}

void BM_EvaluateRhs(benchmark::State& st) {
    const Grid g = make(st.range(0), st.range(1));
    const Field u = sine_bump(g, 1.0);
    const RegularizedLaw law(3.0, 4.0, 1e-3, 1.0);
    Field out(g.size());
    for (auto _ : st) {
        evaluate_rhs(g, u, law, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_EvaluateRhs)->Args({1, 401})->Args({1, 4001})->Args({2, 101})->Args({2, 401});

void BM_Step(benchmark::State& st) {
    const GridPtr g = make_shared_grid(make(st.range(0), st.range(1)));
    const ProblemSpec s = ProblemSpec::make(*g, 3.0, 2.5, 0.0, 1.0, Field(g->size(), 0.0), sine_bump(*g, 1.0));
    const SolutionState state(g, s.u0);
    StepControl ctl;
    const double dt = stable_dt(state, s, ctl);
    for (auto _ : st) benchmark::DoNotOptimize(step(state, s, dt));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g->size()));
}
BENCHMARK(BM_Step)->Args({1, 401})->Args({1, 4001})->Args({2, 101})->Args({2, 401});

void BM_PrincipalEigenpair(benchmark::State& st) {
    const Grid g = make(st.range(0), st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(principal_eigenpair(g).lambda);
}
BENCHMARK(BM_PrincipalEigenpair)->Args({1, 401})->Args({2, 51})->Args({2, 101})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
