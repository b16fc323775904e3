#pragma once

// Brute-force oracles, deliberately dumb and independent of the bitset
// engine: everything here walks explicit element tuples.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "mdms/construction.hpp"
#include "mdms/modarith.hpp"
#include "mdms/setops.hpp"

namespace mdms::test {

inline GroupSet naive_difference(const GroupSet& A) {
    const GroupSpec& spec = *A.spec();
    GroupSet out(A.spec());
    auto elements = A.elements();
    for (std::uint64_t a : elements)
        for (std::uint64_t b : elements) out.insert(spec.sub(a, b));
    return out;
}

/// All h-tuples over A, by odometer. Keep |A|^h small.
inline GroupSet naive_h_fold(const GroupSet& A, int h) {
    const GroupSpec& spec = *A.spec();
    GroupSet out(A.spec());
    auto elements = A.elements();
    std::vector<std::size_t> idx(static_cast<std::size_t>(h), 0);
    while (true) {
        std::uint64_t sum = 0;
        for (std::size_t i : idx) sum = spec.add(sum, elements[i]);
        out.insert(sum);
        std::size_t j = idx.size();
        bool carry = true;
        while (j-- > 0) {
            if (++idx[j] < elements.size()) {
                carry = false;
                break;
            }
            idx[j] = 0;
        }
        if (carry) return out;
    }
}

inline GroupSet naive_linear_form(const LinearForm& F, const GroupSet& A) {
    const GroupSpec& spec = *A.spec();
    GroupSet out(A.spec());
    auto elements = A.elements();
    std::vector<std::size_t> idx(F.coefficients.size(), 0);
    while (true) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            sum = spec.add(sum, spec.scalar_mul(F.coefficients[i], elements[idx[i]]));
        out.insert(sum);
        std::size_t j = idx.size();
        bool carry = true;
        while (j-- > 0) {
            if (++idx[j] < elements.size()) {
                carry = false;
                break;
            }
            idx[j] = 0;
        }
        if (carry) return out;
    }
}

/// Expands an admissible pair into its h-term sum of elements of A(W,f):
/// alpha(w) copies of w+f(w) plus beta(w) copies of f(w).
inline std::uint64_t naive_represent(const AdmissiblePair& pair, const ConstructionState& state) {
    const GroupSpec& spec = *state.spec;
    std::uint64_t sum = 0;
    for (const PairEntry& e : pair.support) {
        std::uint64_t fw = state.f(e.element);
        std::uint64_t w_plus_fw = spec.add(e.element, fw);
        for (int i = 0; i < e.alpha; ++i) sum = spec.add(sum, w_plus_fw);
        for (int i = 0; i < e.beta; ++i) sum = spec.add(sum, fw);
    }
    return sum;
}

/// Random subset with the given element count (clamped to the group size).
inline GroupSet random_set(GroupSpecPtr spec, std::size_t count, std::mt19937_64& rng) {
    GroupSet out(std::move(spec));
    count = std::min<std::size_t>(count, out.group_size());
    std::uniform_int_distribution<std::uint64_t> pick(0, out.group_size() - 1);
    while (out.cardinality() < count) out.insert(pick(rng));
    return out;
}

/// A handful of R_h-compatible specs with total size below the limit.
inline std::vector<GroupSpecPtr> sample_specs(int h, std::uint64_t max_size) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = static_cast<std::uint64_t>(h) + 1; primes.size() < 4; ++p)
        if (is_prime(p)) primes.push_back(p);
    std::vector<GroupSpecPtr> out;
    auto keep = [&](std::vector<ModuleSpec> modules) {
        std::uint64_t total = 1;
        for (const ModuleSpec& m : modules) total *= m.size();
        if (total <= max_size) out.push_back(make_group_spec(std::move(modules), h));
    };
    keep({cyclic_module(primes[0])});
    keep({cyclic_module(primes[0]), cyclic_module(primes[1])});
    keep({cyclic_module(primes[2]), cyclic_module(primes[0])});
    keep({vector_space_module(primes[0], 2)});
    keep({cyclic_module(primes[1]), vector_space_module(primes[0], 2)});
    keep({cyclic_module(primes[0]), cyclic_module(primes[1]), cyclic_module(primes[2])});
    return out;
}

}  // namespace mdms::test
