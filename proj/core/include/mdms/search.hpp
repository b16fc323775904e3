#pragma once

#include <cstdint>
#include <string>

#include "mdms/rational.hpp"
#include "mdms/setops.hpp"

namespace mdms {

/// Exhaustive search walks all 2^p subsets (deduplicated by translation),
/// so p is capped.
inline constexpr std::uint64_t kExhaustivePrimeCap = 24;

struct SearchStrategy {
    enum class Kind { Exhaustive, Randomized };
    Kind kind = Kind::Exhaustive;
    std::uint64_t seed = 0;        // Randomized only
    std::uint64_t iterations = 0;  // Randomized only
};

/// Outcome of a search for subtractive bases A of Z/pZ with small |hA|/p.
/// best_set and best_density are recomputed through the set engine before
/// reporting; wall_time_ms never enters JSON artifacts.
struct SearchReport {
    std::uint64_t p = 0;
    int h = 1;
    SearchStrategy strategy;
    bool found = false;
    IntSet best_set;        // residues, sorted
    Rational best_density;  // |h*best_set| / p
    std::uint64_t sets_examined = 0;  // translation classes (exhaustive) or move evaluations
    double wall_time_ms = 0.0;
};

/// Global minimum of |hA|/p over all subtractive bases A of Z/pZ.
/// Each translation class is visited exactly once via its canonical
/// (lexicographically smallest) representative; classes that cannot cover
/// all differences (|A|^2-|A|+1 < p) are pruned after being counted.
/// Ties break to the lexicographically smallest residue set. p must be a
/// prime <= kExhaustivePrimeCap. Workers split the subset space into
/// contiguous ranges; the merge is order-independent.
SearchReport exhaustive_search(std::uint64_t p, int h, int threads = 1);

/// Seeded hill climbing over single-element toggles, minimizing
/// (uncovered differences, |hA|) lexicographically, with random restarts
/// at local optima. Deterministic for a fixed seed. Stops early when a
/// basis with density strictly below epsilon is found (epsilon <= 0
/// disables the early stop). Never claims optimality.
SearchReport randomized_search(std::uint64_t p, int h, const Rational& epsilon,
                               std::uint64_t seed, std::uint64_t iterations);

/// Number of translation classes of nonempty subsets of Z/pZ, by direct
/// canonical-representative enumeration.
std::uint64_t count_translation_classes(std::uint64_t p);

}  // namespace mdms
