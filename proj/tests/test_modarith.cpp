#include <doctest.h>

#include <random>

#include "mdms/bitset.hpp"
#include "mdms/errors.hpp"
#include "mdms/modarith.hpp"
#include "oracles.hpp"

using namespace mdms;

TEST_SUITE("modarith") {

TEST_CASE("R_h validation by trial division") {
    CHECK(satisfies_rh(cyclic_module(6), 1));
    CHECK_FALSE(satisfies_rh(cyclic_module(6), 2));  // 2 | 6
    CHECK(satisfies_rh(cyclic_module(35), 4));       // 5 and 7 exceed 4
    CHECK_FALSE(satisfies_rh(cyclic_module(35), 5));
    CHECK(satisfies_rh(vector_space_module(5, 3), 4));
    CHECK_FALSE(satisfies_rh(vector_space_module(5, 3), 5));
    CHECK_FALSE(satisfies_rh(vector_space_module(9, 2), 2));  // 9 is not prime

    CHECK_THROWS_AS(GroupSpec({cyclic_module(6)}, 2), SpecError);
    CHECK_NOTHROW(GroupSpec({cyclic_module(35)}, 4));
}

TEST_CASE("group law on Z/5 + Z/5") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(5), cyclic_module(5)}, 2);
    auto idx = [&](std::uint64_t a, std::uint64_t b) { return spec->encode({a, b}); };

    CHECK(spec->add(idx(3, 4), idx(4, 3)) == idx(2, 2));
    CHECK(spec->sub(idx(1, 0), idx(0, 1)) == idx(1, 4));

    for (std::uint64_t a = 0; a < spec->total_size(); ++a) {
        CHECK(spec->add(a, 0) == a);
        CHECK(spec->sub(a, 0) == a);
        CHECK(spec->add(a, spec->neg(a)) == 0);
        CHECK(spec->sub(a, a) == 0);
    }
}

TEST_CASE("scalar multiplication") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(5)}, 2);
    CHECK(spec->scalar_mul(2, spec->encode({3})) == spec->encode({1}));
    for (std::uint64_t a = 0; a < 5; ++a) {
        CHECK(spec->scalar_mul(0, a) == 0);
        CHECK(spec->scalar_mul(1, a) == a);
        CHECK(spec->scalar_mul(-1, a) == spec->neg(a));
        CHECK(spec->scalar_mul(7, a) == spec->scalar_mul(2, a));  // 7 = 2 mod 5
    }
}

TEST_CASE("unit division inverts scalar multiplication") {
    GroupSpecPtr five = make_group_spec({cyclic_module(5)}, 2);
    CHECK(five->unit_div(five->encode({1}), 2) == five->encode({3}));  // 2*3 = 1 mod 5
    CHECK(five->unit_div(0, 2) == 0);
    CHECK_THROWS_AS(five->unit_div(1, 0), SpecError);
    CHECK_THROWS_AS(five->unit_div(1, 3), SpecError);  // r must stay within 1..h

    // Exhaustive on every spec that fits 10^4 elements.
    for (int h : {1, 2, 3}) {
        for (const auto& spec : test::sample_specs(h, 10'000)) {
            for (int r = 1; r <= h; ++r)
                for (std::uint64_t a = 0; a < spec->total_size(); ++a)
                    CHECK(spec->unit_div(spec->scalar_mul(r, a), r) == a);
        }
    }

    // Random sampling above 10^4.
    GroupSpecPtr big = make_group_spec({cyclic_module(101), cyclic_module(101)}, 2);
    REQUIRE(big->total_size() > 10'000);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> pick(0, big->total_size() - 1);
    for (int i = 0; i < 300; ++i) {
        std::uint64_t a = pick(rng);
        for (int r = 1; r <= 2; ++r) CHECK(big->unit_div(big->scalar_mul(r, a), r) == a);
    }
}

TEST_CASE("mixed-radix indexing, module 0 most significant") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(5), cyclic_module(7)}, 2);
    CHECK(spec->encode({1, 2}) == 1 * 7 + 2);
    CHECK(spec->encode({0, 0}) == 0);
    CHECK(spec->decode(9) == std::vector<std::uint64_t>{1, 2});

    CHECK_THROWS_AS(spec->encode({5, 0}), SpecError);
    CHECK_THROWS_AS(spec->encode({0}), SpecError);
    CHECK_THROWS_AS(spec->decode(35), SpecError);

    // encode/decode is a bijection on every small sample spec.
    for (int h : {1, 2, 4}) {
        for (const auto& s : test::sample_specs(h, 10'000)) {
            Bitset seen(s->total_size());
            for (std::uint64_t i = 0; i < s->total_size(); ++i) {
                std::uint64_t back = s->encode(s->decode(i));
                CHECK(back == i);
                seen.set(back);
            }
            CHECK(seen.full());
        }
    }
}

TEST_CASE("vector-space modules flatten into per-dimension digits") {
    GroupSpecPtr spec = make_group_spec({vector_space_module(3, 2), cyclic_module(5)}, 2);
    CHECK(spec->total_size() == 45);
    CHECK(spec->digit_count() == 3);
    CHECK(spec->encode({1, 2, 4}) == (1 * 3 + 2) * 5 + 4);
    CHECK(spec->add(spec->encode({1, 2, 4}), spec->encode({2, 2, 3})) == spec->encode({0, 1, 2}));
}

TEST_CASE("element wrappers reject mismatched coordinates") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(5), cyclic_module(5)}, 1);
    Element a = spec->element_from_digits({3, 4});
    Element b = spec->element_from_digits({4, 3});
    CHECK(add(a, b, *spec).digits == std::vector<std::uint64_t>{2, 2});

    Element foreign{{1, 2, 3}, 9};
    CHECK_THROWS_AS(add(a, foreign, *spec), SpecError);
    Element inconsistent{{1, 1}, 0};  // index does not match the digits
    CHECK_THROWS_AS(add(a, inconsistent, *spec), SpecError);
}

TEST_CASE("CRT isomorphism with coprime cyclic moduli") {
    GroupSpecPtr spec = make_group_spec({cyclic_module(5), cyclic_module(7)}, 2);
    CrtIsomorphism crt(spec);
    CHECK(crt.modulus() == 35);
    CHECK(crt.forward(spec->encode({1, 2})) == 16);  // 16 = 1 mod 5, 2 mod 7
    CHECK(crt.inverse(16) == spec->encode({1, 2}));

    // Bijective and additive, exhaustively.
    Bitset seen(35);
    for (std::uint64_t i = 0; i < 35; ++i) {
        std::uint64_t x = crt.forward(i);
        CHECK(crt.inverse(x) == i);
        seen.set(x);
    }
    CHECK(seen.full());
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> pick(0, 34);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t a = pick(rng), b = pick(rng);
        CHECK(crt.forward(spec->add(a, b)) == (crt.forward(a) + crt.forward(b)) % 35);
    }
}

TEST_CASE("CRT edge cases") {
    GroupSpecPtr single = make_group_spec({cyclic_module(7)}, 2);
    CrtIsomorphism identity(single);
    for (std::uint64_t i = 0; i < 7; ++i) CHECK(identity.forward(i) == i);

    CHECK_THROWS_AS(CrtIsomorphism(make_group_spec({cyclic_module(5), cyclic_module(35)}, 4)),
                    SpecError);
    CHECK_THROWS_AS(CrtIsomorphism(make_group_spec({vector_space_module(5, 2)}, 2)), SpecError);
}

}  // TEST_SUITE
