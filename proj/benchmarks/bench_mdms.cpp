#include <benchmark/benchmark.h>

#include <random>

#include "mdms/construction.hpp"
#include "mdms/search.hpp"
#include "mdms/setops.hpp"
#include "mdms/verify.hpp"

using namespace mdms;

namespace {

GroupSet random_set(const GroupSpecPtr& spec, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GroupSet out(spec);
    std::uniform_int_distribution<std::uint64_t> pick(0, spec->total_size() - 1);
    while (out.cardinality() < count) out.insert(pick(rng));
    return out;
}

EpsilonSchedule steep() {
    EpsilonSchedule s;
    s.epsilon = Rational(9, 10);
    s.levels = {Rational(7, 10), Rational(4, 5)};
    return s;
}

}  // namespace

static void BM_DifferenceSet(benchmark::State& state) {
    GroupSpecPtr spec = make_group_spec(
        {cyclic_module(5), cyclic_module(5), cyclic_module(5), cyclic_module(7)}, 2);
    GroupSet A = random_set(spec, static_cast<std::size_t>(state.range(0)), 42);
    for (auto _ : state) {
        GroupSet D = difference_set(A);
        benchmark::DoNotOptimize(D.cardinality());
    }
}
BENCHMARK(BM_DifferenceSet)->Arg(16)->Arg(64)->Arg(256);

static void BM_HFoldSumset(benchmark::State& state) {
    GroupSpecPtr spec = make_group_spec({cyclic_module(2053)}, 2);
    GroupSet A = random_set(spec, 48, 7);
    const int h = static_cast<int>(state.range(0));
    for (auto _ : state) {
        GroupSet S = h_fold_sumset(A, h);
        benchmark::DoNotOptimize(S.cardinality());
    }
}
BENCHMARK(BM_HFoldSumset)->Arg(2)->Arg(3)->Arg(4);

static void BM_LevelSet(benchmark::State& state) {
    ConstructionState cons = build_initial(2, steep());
    for (auto _ : state) {
        GroupSet L = level_set(cons, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(L.cardinality());
    }
}
BENCHMARK(BM_LevelSet)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_PairEnumeration(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        PairEnumerator it(n, 2, 2);
        AdmissiblePair pair;
        std::uint64_t count = 0;
        while (it.next(pair)) ++count;
        benchmark::DoNotOptimize(count);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(count_admissible_pairs(n, 2, 2)));
}
BENCHMARK(BM_PairEnumeration)->Arg(25)->Arg(125)->Unit(benchmark::kMillisecond);

static void BM_StructuralSweep(benchmark::State& state) {
    ConstructionState s1 = build_initial(2, default_schedule(2, Rational(9, 10)),
                                         std::vector<ModuleSpec>{cyclic_module(5)}, true);
    auto pairs = first_admissible_pairs(5, 2, 2, 2);
    ConstructionState s2 = inductive_step(s1, pairs, {7, 11});
    GroupSet L1 = level_set(s1, 1);
    for (auto _ : state) {
        Certificate cert = check_structural_lemma(s2, L1);
        benchmark::DoNotOptimize(cert.pass);
    }
}
BENCHMARK(BM_StructuralSweep)->Unit(benchmark::kMillisecond);

static void BM_ExhaustiveSearch(benchmark::State& state) {
    const std::uint64_t p = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        SearchReport report = exhaustive_search(p, 2);
        benchmark::DoNotOptimize(report.sets_examined);
    }
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(13)->Arg(17)->Arg(19)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
