#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mdms/errors.hpp"
#include "mdms/json_io.hpp"
#include "mdms/search.hpp"

using namespace mdms;

namespace {

std::string golden(const std::string& name) {
    std::ifstream in(std::string(MDMS_TEST_DATA_DIR) + "/" + name);
    REQUIRE_MESSAGE(in.good(), "missing golden file ", name);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

/// Orbit count of nonempty subsets of Z/pZ under translation, p prime:
/// only the identity fixes anything beyond {} and Z/pZ itself.
std::uint64_t burnside_classes(std::uint64_t p) {
    return ((std::uint64_t{1} << p) + (p - 1) * 2) / p - 1;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("exhaustive search at p = 5, h = 2") {
    SearchReport report = exhaustive_search(5, 2);
    CHECK(report.found);
    CHECK(report.best_density == 1);  // Cauchy-Davenport forces |2A| = 5
    CHECK(report.best_set == IntSet{0, 1, 2});
    CHECK(report.sets_examined == burnside_classes(5));
}

TEST_CASE("exhaustive search at p = 2, h = 1") {
    SearchReport report = exhaustive_search(2, 1);
    CHECK(report.found);
    CHECK(report.best_set == IntSet{0, 1});
    CHECK(report.best_density == 1);
}

TEST_CASE("p = 13 golden report") {
    SearchReport report = exhaustive_search(13, 2);
    CHECK(search_report_to_json(report) == golden("search_p13_h2.json"));
}

TEST_CASE("each translation class is visited exactly once") {
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
        CHECK(count_translation_classes(p) == burnside_classes(p));
        CHECK(exhaustive_search(p, 2).sets_examined == burnside_classes(p));
    }
}

TEST_CASE("threaded exhaustive search merges deterministically") {
    SearchReport solo = exhaustive_search(17, 2, 1);
    SearchReport pooled = exhaustive_search(17, 2, 4);
    CHECK(search_report_to_json(solo) == search_report_to_json(pooled));
}

TEST_CASE("randomized search is deterministic per seed") {
    SearchReport a = randomized_search(11, 2, Rational(0), 99, 4000);
    SearchReport b = randomized_search(11, 2, Rational(0), 99, 4000);
    CHECK(search_report_to_json(a) == search_report_to_json(b));
    SearchReport c = randomized_search(11, 2, Rational(0), 100, 4000);
    CHECK(c.found == true);  // different seed may find a different witness, never an invalid one
}

TEST_CASE("randomized matches exhaustive at p = 5 and never beats it elsewhere") {
    SearchReport ex5 = exhaustive_search(5, 2);
    for (std::uint64_t seed : {1, 7, 2026}) {
        SearchReport r = randomized_search(5, 2, Rational(0), seed, 3000);
        CHECK(r.found);
        CHECK(r.best_density == ex5.best_density);
    }
    for (std::uint64_t p : {7, 11}) {
        SearchReport ex = exhaustive_search(p, 2);
        for (std::uint64_t seed : {3, 4}) {
            SearchReport r = randomized_search(p, 2, Rational(0), seed, 4000);
            if (r.found) CHECK(r.best_density >= ex.best_density);
        }
    }
}

TEST_CASE("every reported set is re-verified as a subtractive basis") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        SearchReport r = randomized_search(13, 2, Rational(0), seed, 2500);
        if (!r.found) continue;
        GroupSpecPtr spec = make_group_spec({cyclic_module(13)}, 1);
        GroupSet A(spec);
        for (std::int64_t v : r.best_set) A.insert(static_cast<std::uint64_t>(v));
        CHECK(is_subtractive_basis(A));
        CHECK(density(h_fold_sumset(A, 2)) == r.best_density);
    }
}

TEST_CASE("early stop honors the epsilon target") {
    SearchReport r = randomized_search(13, 2, Rational(99, 100), 5, 100000);
    CHECK(r.found);
    CHECK(r.best_density < Rational(99, 100));
    CHECK(r.sets_examined < 100000);  // stopped before exhausting the budget
}

TEST_CASE("search input validation") {
    CHECK_THROWS_AS(exhaustive_search(4, 2), SpecError);
    CHECK_THROWS_AS(exhaustive_search(29, 2), CapError);
    CHECK_THROWS_AS(randomized_search(9, 2, Rational(0), 0, 10), SpecError);
    CHECK_THROWS_AS(exhaustive_search(5, 0), SpecError);
}

}  // TEST_SUITE
