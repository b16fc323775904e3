#include <doctest.h>

#include <random>

#include "mdms/construction.hpp"
#include "mdms/errors.hpp"
#include "mdms/json_io.hpp"
#include "mdms/setops.hpp"
#include "oracles.hpp"

using namespace mdms;

namespace {

/// Schedule with e_1 = 7/10, the value the worked h=2 example uses.
EpsilonSchedule steep_schedule() {
    EpsilonSchedule s;
    s.epsilon = Rational(9, 10);
    s.levels = {Rational(7, 10), Rational(4, 5)};
    return s;
}

/// Forced-tiny two-stage state: W_1 = Z/3 (single module), then one
/// appended module per chosen level-2 pair.
ConstructionState tiny_stage2(std::vector<std::uint64_t> sizes, std::uint64_t pair_count) {
    ConstructionState s1 = build_initial(2, default_schedule(2, Rational(9, 10)),
                                         std::vector<ModuleSpec>{cyclic_module(3)}, true);
    auto pairs = first_admissible_pairs(3, 2, 2, pair_count);
    return inductive_step(s1, pairs, std::move(sizes));
}

}  // namespace

TEST_SUITE("construction") {

TEST_CASE("default epsilon schedule") {
    EpsilonSchedule two = default_schedule(2, Rational(9, 10));
    CHECK(two.levels == std::vector<Rational>{Rational(3, 10), Rational(6, 10)});
    EpsilonSchedule one = default_schedule(1, Rational(9, 10));
    CHECK(one.levels == std::vector<Rational>{Rational(9, 20)});
    CHECK_THROWS_AS(default_schedule(2, Rational(0)), SpecError);
    CHECK_THROWS_AS(default_schedule(2, Rational(-1, 2)), SpecError);

    for (int h = 1; h <= 6; ++h) {
        EpsilonSchedule s = default_schedule(h, Rational(17, 23));
        CHECK_NOTHROW(s.validate());
        CHECK(s.levels.size() == static_cast<std::size_t>(h));
    }
}

TEST_CASE("choose_module_size picks the smallest admissible prime") {
    CHECK(choose_module_size(Rational(30, 7), 2) == 5);
    CHECK(choose_module_size(Rational(40, 9), 1) == 5);
    CHECK(choose_module_size(Rational(1), 4) == 5);  // the R_h constraint dominates
    CHECK(choose_module_size(Rational(13), 2) == 17);  // strictly above the bound
    CHECK(choose_module_size(Rational(12), 2) == 13);
}

TEST_CASE("initial step, h = 1") {
    ConstructionState state = build_initial(1, default_schedule(1, Rational(9, 10)));
    CHECK(state.spec->modules() == std::vector<ModuleSpec>{cyclic_module(5), cyclic_module(5)});
    GroupSet A = build_A(state);
    CHECK(A.cardinality() == 9);
    CHECK(Rational(BigInt(A.cardinality())) < state.schedule.level(1) * 25);
    CHECK(is_subtractive_basis(A));
}

TEST_CASE("initial step, h = 2 with the steep schedule") {
    ConstructionState state = build_initial(2, steep_schedule());
    CHECK(state.spec->modules().size() == 3);
    for (const ModuleSpec& m : state.spec->modules()) CHECK(m.modulus == 5);

    // f_1(1,1,1) = (0, -(1/2), -1) = (0, 2, 4) mod 5.
    std::uint64_t w = state.spec->encode({1, 1, 1});
    CHECK(state.f(w) == state.spec->encode({0, 2, 4}));
    CHECK(state.f(0) == 0);
}

TEST_CASE("initial step overrides need force") {
    EpsilonSchedule schedule = default_schedule(2, Rational(9, 10));
    std::vector<ModuleSpec> tiny{cyclic_module(3)};
    CHECK_THROWS_AS(build_initial(2, schedule, tiny, false), SpecError);
    ConstructionState forced = build_initial(2, schedule, tiny, true);
    CHECK(forced.taints == std::vector<std::string>{kTaintBoundWaived});
    // R_h violations are hard errors even when forced.
    CHECK_THROWS_AS(build_initial(2, schedule, std::vector<ModuleSpec>{cyclic_module(4)}, true),
                    SpecError);
}

TEST_CASE("A(W, f) for the zero function is all of W") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(7), cyclic_module(5)}, 2);
    FnTable zero = FnTable::explicit_table(spec, std::vector<std::uint64_t>(35, 0));
    CHECK(build_A(spec, zero) == GroupSet::full_set(spec));
}

TEST_CASE("A(W, f) is a subtractive basis for random f tables") {
    std::mt19937_64 rng(4096);
    for (const auto& spec : test::sample_specs(2, 2048)) {
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<std::uint64_t> table(spec->total_size());
            for (auto& v : table) v = rng() % spec->total_size();
            GroupSet A = build_A(spec, FnTable::explicit_table(spec, std::move(table)));
            CHECK(is_subtractive_basis(A));
        }
    }
}

TEST_CASE("pair enumeration order and counts on a two-element group") {
    auto level1 = enumerate_admissible_pairs(2, 2, 1);
    REQUIRE(level1.size() == 6);
    // Per element: (2,0), (1,1), (0,2).
    CHECK(level1[0].support == std::vector<PairEntry>{{0, 2, 0}});
    CHECK(level1[1].support == std::vector<PairEntry>{{0, 1, 1}});
    CHECK(level1[2].support == std::vector<PairEntry>{{0, 0, 2}});
    CHECK(level1[3].support == std::vector<PairEntry>{{1, 2, 0}});
    CHECK(level1[4].support == std::vector<PairEntry>{{1, 1, 1}});
    CHECK(level1[5].support == std::vector<PairEntry>{{1, 0, 2}});

    auto level2 = enumerate_admissible_pairs(2, 2, 2);
    REQUIRE(level2.size() == 4);
    CHECK(level2[0].support == std::vector<PairEntry>{{0, 1, 0}, {1, 1, 0}});
    CHECK(level2[1].support == std::vector<PairEntry>{{0, 1, 0}, {1, 0, 1}});
    CHECK(level2[2].support == std::vector<PairEntry>{{0, 0, 1}, {1, 1, 0}});
    CHECK(level2[3].support == std::vector<PairEntry>{{0, 0, 1}, {1, 0, 1}});

    CHECK(enumerate_admissible_pairs(2, 2, 3).empty());  // level beyond h
}

TEST_CASE("pair counting matches enumeration and the closed form") {
    CHECK(count_admissible_pairs(2, 2, 1) == 6);
    CHECK(count_admissible_pairs(2, 2, 2) == 4);
    CHECK(count_admissible_pairs(2, 2) == 10);
    CHECK(count_admissible_pairs(125, 2, 2) == 31000);
    CHECK(count_admissible_pairs(5, 3, 0) == 0);

    for (std::uint64_t n = 1; n <= 6; ++n) {
        for (int h = 1; h <= 4; ++h) {
            BigInt total = 0;
            for (int level = 1; level <= h; ++level) {
                BigInt count = count_admissible_pairs(n, h, level);
                CHECK(count == BigInt(enumerate_admissible_pairs(n, h, level).size()));
                total += count;
            }
            CHECK(total == count_admissible_pairs(n, h));
        }
    }
}

TEST_CASE("enumeration refuses over-budget requests with the exact count") {
    try {
        enumerate_admissible_pairs(100'000, 3, 3);
        FAIL("budget not enforced");
    } catch (const BudgetError& e) {
        std::string what = e.what();
        CHECK(what.find(count_admissible_pairs(100'000, 3, 3).str()) != std::string::npos);
    }
}

TEST_CASE("represent collapses single-support pairs") {
    ConstructionState state = build_initial(2, steep_schedule());
    const GroupSpec& spec = *state.spec;
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        std::uint64_t w = rng() % spec.total_size();
        AdmissiblePair all_alpha{{PairEntry{w, 2, 0}}};
        CHECK(represent(all_alpha, state) ==
              spec.add(spec.scalar_mul(2, w), spec.scalar_mul(2, state.f(w))));
        AdmissiblePair all_beta{{PairEntry{w, 0, 2}}};
        CHECK(represent(all_beta, state) == spec.scalar_mul(2, state.f(w)));
    }
}

TEST_CASE("represent equals the naive h-term expansion") {
    ConstructionState state = build_initial(3, default_schedule(3, Rational(9, 10)),
                                            std::vector<ModuleSpec>{cyclic_module(5), cyclic_module(7)},
                                            true);
    std::mt19937_64 rng(123);
    for (int level = 1; level <= 3; ++level) {
        auto pairs = enumerate_admissible_pairs(state.spec->total_size(), 3, level);
        for (int rep = 0; rep < 40; ++rep) {
            const AdmissiblePair& pair = pairs[rng() % pairs.size()];
            CHECK(represent(pair, state) == test::naive_represent(pair, state));
        }
    }
}

TEST_CASE("level sets of the worked h = 2 example") {
    ConstructionState state = build_initial(2, steep_schedule());
    GroupSet L1 = level_set(state, 1);
    CHECK(L1.cardinality() == 61);  // three hyperplanes: 75 - 15 + 1

    GroupSet L2 = level_set(state, 2);
    CHECK(L1.bits().is_subset_of(L2.bits()));
    CHECK(L2 == h_fold_sumset(build_A(state), 2));

    CHECK(Rational(BigInt(L1.cardinality())) < Rational(7, 10) * 125);
    CHECK_THROWS_AS(level_set(state, 0), SpecError);
    CHECK_THROWS_AS(level_set(state, 3), SpecError);
}

TEST_CASE("level 1 equals A when h = 1") {
    ConstructionState state = build_initial(1, default_schedule(1, Rational(9, 10)));
    CHECK(level_set(state, 1) == build_A(state));
}

TEST_CASE("required module bound") {
    EpsilonSchedule s = default_schedule(2, Rational(9, 10));  // gap 3/10
    CHECK(required_module_bound(31000, s, 1) == Rational(310000, 3));
    EpsilonSchedule half;
    half.epsilon = Rational(9, 10);
    half.levels = {Rational(1, 4), Rational(3, 4)};
    CHECK(required_module_bound(1, half, 1) == 2);
    CHECK_THROWS_AS(required_module_bound(1, s, 2), SpecError);

    Rational prev_bound = 0;
    for (BigInt n = 1; n < 100; n += 7) {
        Rational bound = required_module_bound(n, s, 1);
        CHECK(bound > prev_bound);  // monotonic in the pair count
        prev_bound = bound;
    }
}

TEST_CASE("inductive step on a forced-tiny instance") {
    ConstructionState s2 = tiny_stage2({5}, 1);
    CHECK(s2.k == 2);
    CHECK(s2.restricted);
    CHECK(s2.spec->total_size() == 15);

    ConstructionState s1 = previous_state(s2);
    CHECK(s1.spec->total_size() == 3);

    // pi_0(A_2) = A_1.
    GroupSet A1 = build_A(s1);
    GroupSet A2 = build_A(s2);
    GroupSet projected(s1.spec);
    A2.bits().for_each_set([&](std::uint64_t a) { projected.insert(a / 5); });
    CHECK(projected == A1);

    // pi_0(f_2(w)) = f_1(pi_0(w)) everywhere, and the appended coordinate
    // vanishes off the pair's support fibers.
    const AdmissiblePair& pair = s2.history.back().pairs.front();
    for (std::uint64_t w = 0; w < 15; ++w) {
        CHECK(s2.f(w) / 5 == s1.f(w / 5));
        bool touched = false;
        for (const PairEntry& e : pair.support) touched = touched || e.element == w / 5;
        if (!touched) CHECK(s2.f(w) % 5 == 0);
    }
}

TEST_CASE("inductive step rejects bad input") {
    ConstructionState s1 = build_initial(2, default_schedule(2, Rational(9, 10)),
                                         std::vector<ModuleSpec>{cyclic_module(3)}, true);
    auto level2 = first_admissible_pairs(3, 2, 2, 2);
    auto level1 = first_admissible_pairs(3, 2, 1, 1);

    CHECK_THROWS_AS(inductive_step(s1, {}, {}), SpecError);
    CHECK_THROWS_AS(inductive_step(s1, level1, {5}), SpecError);  // wrong level
    CHECK_THROWS_AS(inductive_step(s1, level2, {5}), SpecError);  // one size per pair
    CHECK_THROWS_AS(inductive_step(s1, {level2[0]}, {4}), SpecError);  // 4 violates R_2
    CHECK_THROWS_AS(inductive_step(s1, {level2[0], level2[0]}, {5, 5}), SpecError);  // duplicate

    ConstructionState s2 = tiny_stage2({5}, 1);
    CHECK_THROWS_AS(inductive_step(s2, {level2[0]}, {5}), SpecError);  // already at k = h
}

TEST_CASE("hat projection") {
    ConstructionState s2 = tiny_stage2({5, 7}, 2);
    ConstructionState s1 = previous_state(s2);
    const GroupSpec& next = *s2.spec;
    const GroupSpec& prev = *s1.spec;
    const std::uint64_t stride = next.total_size() / prev.total_size();

    // A single support point keeps its values.
    AdmissiblePair one{{PairEntry{2 * stride + 3, 1, 1}}};
    AdmissiblePair hat_one = hat_projection(one, next, prev);
    CHECK(hat_one.support == std::vector<PairEntry>{{2, 1, 1}});

    // Two support points in one fiber collapse to a single element.
    AdmissiblePair fiber{{PairEntry{stride + 1, 1, 0}, PairEntry{stride + 4, 0, 1}}};
    AdmissiblePair hat_fiber = hat_projection(fiber, next, prev);
    CHECK(hat_fiber.level() == 1);
    CHECK(hat_fiber.support == std::vector<PairEntry>{{1, 1, 1}});

    // Random pairs: weight preserved, level never grows, and the
    // representation commutes with the projection.
    std::mt19937_64 rng(555);
    for (int level = 1; level <= 2; ++level) {
        auto pairs = enumerate_admissible_pairs(next.total_size(), 2, level);
        for (int rep = 0; rep < 60; ++rep) {
            const AdmissiblePair& pair = pairs[rng() % pairs.size()];
            AdmissiblePair hat = hat_projection(pair, next, prev);
            CHECK(hat.weight() == 2);
            CHECK(hat.level() <= pair.level());
            CHECK(represent(pair, s2) / stride == represent(hat, s1));
        }
    }
}

TEST_CASE("state JSON round trip is byte-stable") {
    ConstructionState s2 = tiny_stage2({5}, 1);
    std::string once = state_to_json(s2);
    ConstructionState reloaded = state_from_json(once);
    CHECK(state_to_json(reloaded) == once);
    CHECK(reloaded.spec->same_group(*s2.spec));
    CHECK(reloaded.restricted == s2.restricted);
    for (std::uint64_t w = 0; w < s2.spec->total_size(); ++w) CHECK(reloaded.f(w) == s2.f(w));
}

}  // TEST_SUITE
