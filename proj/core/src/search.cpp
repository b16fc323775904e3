#include "mdms/search.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <random>
#include <thread>
#include <tuple>
#include <vector>

#include "mdms/errors.hpp"

namespace mdms {

namespace {

std::uint32_t rotate(std::uint32_t mask, std::uint64_t r, std::uint64_t p) {
    r %= p;
    if (r == 0) return mask;
    std::uint32_t pmask = (p == 32) ? ~0u : ((1u << p) - 1);
    return ((mask << r) | (mask >> (p - r))) & pmask;
}

/// Sorted-residue-list lexicographic order on subsets of Z/pZ.
bool lex_less(std::uint32_t x, std::uint32_t y) {
    if (x == y) return false;
    std::uint32_t diff = x ^ y;
    std::uint32_t d = static_cast<std::uint32_t>(std::countr_zero(diff));
    if (x & (1u << d)) return (y >> d) != 0;  // x owns the smaller element, unless y ran out
    return (x >> d) == 0;
}

/// Canonical = lexicographically smallest among all translates. Any
/// canonical representative contains 0.
bool is_canonical(std::uint32_t mask, std::uint64_t p) {
    for (std::uint64_t a = 1; a < p; ++a) {
        if (!(mask & (1u << a))) continue;
        std::uint32_t shifted = rotate(mask, p - a, p);  // mask - a
        if (lex_less(shifted, mask)) return false;
    }
    return true;
}

std::uint32_t mask_sum(std::uint32_t a, std::uint32_t b, std::uint64_t p) {
    std::uint32_t out = 0;
    for (std::uint64_t i = 0; i < p; ++i)
        if (a & (1u << i)) out |= rotate(b, i, p);
    return out;
}

std::uint32_t mask_h_fold(std::uint32_t a, int h, std::uint64_t p) {
    std::uint32_t out = a;
    for (int k = 2; k <= h; ++k) out = mask_sum(out, a, p);
    return out;
}

std::uint32_t mask_difference(std::uint32_t a, std::uint64_t p) {
    std::uint32_t out = 0;
    for (std::uint64_t i = 0; i < p; ++i)
        if (a & (1u << i)) out |= rotate(a, p - i, p);
    return out;
}

IntSet mask_to_set(std::uint32_t mask, std::uint64_t p) {
    IntSet out;
    for (std::uint64_t i = 0; i < p; ++i)
        if (mask & (1u << i)) out.push_back(static_cast<std::int64_t>(i));
    return out;
}

struct ExhaustivePartial {
    std::uint64_t classes = 0;
    bool found = false;
    std::uint32_t h_size = 0;
    std::uint32_t witness = 0;

    void offer(std::uint32_t hs, std::uint32_t mask) {
        if (!found || hs < h_size || (hs == h_size && lex_less(mask, witness))) {
            found = true;
            h_size = hs;
            witness = mask;
        }
    }

    void merge(const ExhaustivePartial& other) {
        classes += other.classes;
        if (other.found) offer(other.h_size, other.witness);
    }
};

ExhaustivePartial exhaustive_range(std::uint64_t p, int h, std::uint64_t begin, std::uint64_t end) {
    ExhaustivePartial out;
    const std::uint32_t pmask = (1u << p) - 1;
    for (std::uint64_t t = begin; t < end; ++t) {
        std::uint32_t mask = static_cast<std::uint32_t>((t << 1) | 1);  // 0 is always present
        if (!is_canonical(mask, p)) continue;
        ++out.classes;
        std::uint64_t c = static_cast<std::uint64_t>(std::popcount(mask));
        if (c * c - c + 1 < p) continue;  // |A-A| <= |A|^2-|A|+1 < p: cannot cover
        if (mask_difference(mask, p) != pmask) continue;
        out.offer(static_cast<std::uint32_t>(std::popcount(mask_h_fold(mask, h, p))), mask);
    }
    return out;
}

/// Recomputes density and re-verifies the basis property through the set
/// engine before the report leaves the module.
void finalize_report(SearchReport& report, std::uint32_t witness) {
    GroupSpecPtr spec = make_group_spec({cyclic_module(report.p)}, 1);
    GroupSet A(spec);
    for (std::uint64_t i = 0; i < report.p; ++i)
        if (witness & (1u << i)) A.insert(i);
    if (!is_subtractive_basis(A)) throw Error("search produced a non-basis witness");
    report.best_set = mask_to_set(witness, report.p);
    report.best_density = density(h_fold_sumset(A, report.h));
}

void validate_prime(std::uint64_t p) {
    if (!is_prime(p)) throw SpecError("p = " + std::to_string(p) + " is not prime");
}

}  // namespace

SearchReport exhaustive_search(std::uint64_t p, int h, int threads) {
    validate_prime(p);
    if (p > kExhaustivePrimeCap)
        throw CapError("exhaustive search is capped at p <= " + std::to_string(kExhaustivePrimeCap));
    if (h < 1) throw SpecError("h must be positive");
    auto start = std::chrono::steady_clock::now();

    const std::uint64_t space = std::uint64_t{1} << (p - 1);
    ExhaustivePartial merged;
    if (threads <= 1 || space < 1024) {
        merged = exhaustive_range(p, h, 0, space);
    } else {
        std::uint64_t workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), 64);
        std::vector<ExhaustivePartial> partials(workers);
        std::vector<std::thread> pool;
        std::uint64_t chunk = (space + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            std::uint64_t begin = w * chunk, end = std::min(space, begin + chunk);
            pool.emplace_back([&, w, begin, end] { partials[w] = exhaustive_range(p, h, begin, end); });
        }
        for (auto& t : pool) t.join();
        for (const auto& partial : partials) merged.merge(partial);
    }

    SearchReport report;
    report.p = p;
    report.h = h;
    report.strategy.kind = SearchStrategy::Kind::Exhaustive;
    report.sets_examined = merged.classes;
    report.found = merged.found;
    if (merged.found) finalize_report(report, merged.witness);
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::uint64_t count_translation_classes(std::uint64_t p) {
    validate_prime(p);
    if (p > kExhaustivePrimeCap)
        throw CapError("class counting is capped at p <= " + std::to_string(kExhaustivePrimeCap));
    std::uint64_t classes = 0;
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << (p - 1)); ++t)
        if (is_canonical(static_cast<std::uint32_t>((t << 1) | 1), p)) ++classes;
    return classes;
}

namespace {

struct HillObjective {
    std::uint64_t uncovered;
    std::uint64_t h_size;

    bool operator<(const HillObjective& other) const {
        return std::tie(uncovered, h_size) < std::tie(other.uncovered, other.h_size);
    }
};

}  // namespace

SearchReport randomized_search(std::uint64_t p, int h, const Rational& epsilon,
                               std::uint64_t seed, std::uint64_t iterations) {
    validate_prime(p);
    if (h < 1) throw SpecError("h must be positive");
    if (p > kGroupSizeCap) throw CapError("p exceeds the group-size cap");
    auto start = std::chrono::steady_clock::now();

    GroupSpecPtr spec = make_group_spec({cyclic_module(p)}, 1);
    std::mt19937_64 rng(seed);

    auto random_subset = [&] {
        std::vector<bool> member(p, false);
        bool any = false;
        for (std::uint64_t i = 0; i < p; ++i) {
            member[i] = rng() & 1;
            any = any || member[i];
        }
        if (!any) member[rng() % p] = true;
        return member;
    };

    auto evaluate = [&](const std::vector<bool>& member) -> HillObjective {
        GroupSet A(spec);
        for (std::uint64_t i = 0; i < p; ++i)
            if (member[i]) A.insert(i);
        if (A.empty()) return HillObjective{p + 1, 0};
        std::uint64_t covered = difference_set(A).cardinality();
        return HillObjective{p - covered, h_fold_sumset(A, h).cardinality()};
    };

    std::vector<bool> current = random_subset();
    HillObjective current_obj = evaluate(current);
    std::uint64_t evals = 1;

    bool found = false;
    std::uint64_t best_h_size = 0;
    IntSet best_set;

    auto offer = [&](const std::vector<bool>& member, const HillObjective& obj) {
        if (obj.uncovered != 0) return;
        IntSet as_set;
        for (std::uint64_t i = 0; i < p; ++i)
            if (member[i]) as_set.push_back(static_cast<std::int64_t>(i));
        if (!found || obj.h_size < best_h_size ||
            (obj.h_size == best_h_size && as_set < best_set)) {
            found = true;
            best_h_size = obj.h_size;
            best_set = as_set;
        }
    };

    bool budget_left = evals < iterations;
    while (budget_left) {
        // Steepest single-toggle descent; ties resolve to the lowest index.
        bool improved = false;
        std::size_t best_idx = 0;
        HillObjective best_obj = current_obj;
        for (std::uint64_t i = 0; i < p && budget_left; ++i) {
            current[i] = !current[i];
            HillObjective obj = evaluate(current);
            current[i] = !current[i];
            if (++evals >= iterations) budget_left = false;
            if (obj < best_obj) {
                best_obj = obj;
                best_idx = i;
                improved = true;
            }
        }
        if (improved) {
            current[best_idx] = !current[best_idx];
            current_obj = best_obj;
            offer(current, current_obj);
        } else {
            offer(current, current_obj);  // local optimum
            if (budget_left) {
                current = random_subset();
                current_obj = evaluate(current);
                ++evals;
            }
        }
        if (found && epsilon > 0 && Rational(BigInt(best_h_size), BigInt(p)) < epsilon) break;
    }
    offer(current, current_obj);

    SearchReport report;
    report.p = p;
    report.h = h;
    report.strategy.kind = SearchStrategy::Kind::Randomized;
    report.strategy.seed = seed;
    report.strategy.iterations = iterations;
    report.sets_examined = evals;
    report.found = found;
    if (found) {
        std::uint32_t witness = 0;
        for (std::int64_t r : best_set) witness |= 1u << r;
        if (p <= 32) {
            finalize_report(report, witness);
        } else {
            GroupSet A(spec);
            for (std::int64_t r : best_set) A.insert(static_cast<std::uint64_t>(r));
            if (!is_subtractive_basis(A)) throw Error("search produced a non-basis witness");
            report.best_set = best_set;
            report.best_density = density(h_fold_sumset(A, h));
        }
    }
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace mdms
