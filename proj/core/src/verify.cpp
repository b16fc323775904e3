#include "mdms/verify.hpp"

#include <algorithm>
#include <string>

#include "mdms/errors.hpp"

namespace mdms {

const char* to_string(Claim claim) {
    switch (claim) {
        case Claim::SubtractiveBasis: return "SubtractiveBasis";
        case Claim::LevelBound: return "LevelBound";
        case Claim::Lemma1: return "Lemma1";
        case Claim::StructuralLemma: return "StructuralLemma";
        case Claim::ProjectionA: return "ProjectionA";
        case Claim::PiJZero: return "PiJZero";
        case Claim::FinalBound: return "FinalBound";
    }
    return "?";
}

namespace {

void put(FieldList& fields, std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
}

void put(FieldList& fields, std::string key, std::uint64_t value) {
    put(fields, std::move(key), std::to_string(value));
}

void put(FieldList& fields, std::string key, const BigInt& value) {
    put(fields, std::move(key), value.str());
}

void put(FieldList& fields, std::string key, const Rational& value) {
    put(fields, std::move(key), rational_to_string(value));
}

std::string bracket_list(const std::vector<std::uint64_t>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(values[i]);
    }
    return out + "]";
}

}  // namespace

bool strictly_below(const Rational& measured, const Rational& bound,
                    std::vector<std::string>& notes) {
    if (measured < bound) return true;
    if (measured == bound) notes.push_back("equality-boundary");
    return false;
}

Certificate check_subtractive_basis(const GroupSet& A, const std::vector<std::string>& taints) {
    GroupSet D = difference_set(A);
    Certificate cert;
    cert.claim = Claim::SubtractiveBasis;
    put(cert.parameters, "group_size", A.group_size());
    put(cert.parameters, "set_size", A.cardinality());
    put(cert.measured, "difference_set_size", D.cardinality());
    cert.bound = Rational(BigInt(A.group_size()));
    cert.pass = D.is_full();
    cert.taints = taints;
    return cert;
}

Certificate check_subtractive_basis(const ConstructionState& state) {
    Certificate cert = check_subtractive_basis(build_A(state), state.taints);
    put(cert.parameters, "stage", static_cast<std::uint64_t>(state.k));
    return cert;
}

Certificate lemma1_certificate(const BigInt& measured_s, const std::vector<std::uint64_t>& sizes,
                               const std::vector<std::uint64_t>& target,
                               const std::optional<Rational>& epsilon) {
    BigInt total = 1;
    for (std::uint64_t m : sizes) total *= m;
    Rational sum_bound = 0;
    for (std::uint64_t m : sizes) sum_bound += Rational(total, BigInt(m));

    Certificate cert;
    cert.claim = Claim::Lemma1;
    put(cert.parameters, "sizes", bracket_list(sizes));
    put(cert.parameters, "target", bracket_list(target));
    if (epsilon) put(cert.parameters, "epsilon", *epsilon);
    put(cert.measured, "s_count", measured_s);
    put(cert.measured, "product_size", total);
    cert.bound = sum_bound;

    // The counting bound of the lemma is non-strict.
    cert.pass = Rational(measured_s) <= sum_bound;
    if (Rational(measured_s) == sum_bound) cert.notes.push_back("equality-boundary");

    if (epsilon) {
        bool hypothesis = true;
        Rational threshold = Rational(BigInt(sizes.size())) / *epsilon;  // (n+1)/eps
        for (std::uint64_t m : sizes)
            if (!(Rational(m) > threshold)) hypothesis = false;
        put(cert.measured, "epsilon_hypothesis_holds", hypothesis ? "true" : "false");
        if (hypothesis) {
            Rational eps_bound = *epsilon * Rational(total);
            put(cert.measured, "epsilon_bound", eps_bound);
            cert.pass = cert.pass && strictly_below(Rational(measured_s), eps_bound, cert.notes);
        }
    }
    return cert;
}

Certificate check_lemma1(const std::vector<std::uint64_t>& sizes,
                         const std::vector<std::uint64_t>& target,
                         const std::optional<Rational>& epsilon) {
    if (sizes.empty()) throw SpecError("lemma 1 needs at least one set");
    if (target.size() != sizes.size())
        throw SpecError("target must have one coordinate per set");
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (sizes[j] == 0) throw SpecError("lemma 1 sets must be nonempty");
        if (target[j] >= sizes[j]) throw SpecError("lemma 1 target coordinate out of range");
        if (__builtin_mul_overflow(total, sizes[j], &total) || total > kGroupSizeCap)
            throw CapError("lemma 1 product exceeds the enumeration cap of " +
                           std::to_string(kGroupSizeCap));
    }

    // Brute force: walk the product set with an odometer and count the
    // tuples matching the target somewhere.
    std::vector<std::uint64_t> tuple(sizes.size(), 0);
    BigInt s_count = 0;
    for (std::uint64_t step = 0; step < total; ++step) {
        for (std::size_t j = 0; j < tuple.size(); ++j) {
            if (tuple[j] == target[j]) {
                ++s_count;
                break;
            }
        }
        std::size_t j = tuple.size();
        while (j-- > 0) {
            if (++tuple[j] < sizes[j]) break;
            tuple[j] = 0;
        }
    }
    return lemma1_certificate(s_count, sizes, target, epsilon);
}

Certificate check_level_bound(const ConstructionState& state, int level) {
    GroupSet L = level_set(state, level);
    const std::uint64_t group_size = state.spec->total_size();
    const Rational eps_level = state.schedule.level(level);

    Certificate cert;
    cert.claim = Claim::LevelBound;
    put(cert.parameters, "stage", static_cast<std::uint64_t>(state.k));
    put(cert.parameters, "level", static_cast<std::uint64_t>(level));
    put(cert.parameters, "epsilon_level", eps_level);
    put(cert.measured, "level_set_size", L.cardinality());
    put(cert.measured, "group_size", group_size);
    cert.bound = eps_level * Rational(BigInt(group_size));
    cert.pass = strictly_below(Rational(BigInt(L.cardinality())), cert.bound, cert.notes);

    if (level == 1) {
        // The intermediate combinatorial bound |W| * sum 1/|M_i| of the
        // initial step.
        Rational lemma_bound = 0;
        for (const ModuleSpec& m : state.spec->modules())
            lemma_bound += Rational(BigInt(group_size), BigInt(m.size()));
        put(cert.measured, "lemma1_bound", lemma_bound);
        put(cert.measured, "lemma1_holds",
            Rational(BigInt(L.cardinality())) <= lemma_bound ? "true" : "false");
    }
    cert.taints = state.taints;
    return cert;
}

namespace {

struct LayerView {
    ConstructionState prev;
    const std::vector<AdmissiblePair>* pairs;
    std::uint64_t stride;  // product of the appended module sizes
};

LayerView layer_view(const ConstructionState& state_next) {
    if (!has_previous_stage(state_next))
        throw SpecError("check requires a state with at least one inductive layer");
    LayerView view{previous_state(state_next), &state_next.history.back().pairs, 0};
    view.stride = state_next.spec->total_size() / view.prev.spec->total_size();
    return view;
}

/// Digit value of z in the j-th appended module (0-based over P).
std::uint64_t appended_digit(const GroupSpec& spec_next, std::size_t base_modules, std::size_t j,
                             std::uint64_t z) {
    std::size_t digit = spec_next.module_first_digit(base_modules + j);
    return (z / spec_next.digit_stride(digit)) % spec_next.digit_radix(digit);
}

}  // namespace

Certificate check_structural_lemma(const ConstructionState& state_next,
                                   const GroupSet& level_k_set) {
    LayerView view = layer_view(state_next);
    if (!level_k_set.spec()->same_group(*view.prev.spec))
        throw SpecError("L_k lives in the wrong group");

    const int k_next = state_next.k;
    const std::uint64_t n = state_next.spec->total_size();
    BigInt total = 0;
    for (int l = 1; l <= k_next; ++l) total += count_admissible_pairs(n, state_next.h, l);
    if (total > BigInt(kPairBudget))
        throw BudgetError("structural lemma sweep needs " + total.str() +
                          " admissible pairs, over the budget of " + std::to_string(kPairBudget));

    const std::size_t base_modules = view.prev.spec->modules().size();
    std::uint64_t enumerated = 0, low_hat = 0, matched = 0, skipped = 0, violations = 0;

    AdmissiblePair pair;
    for (int l = 1; l <= k_next; ++l) {
        PairEnumerator it(n, state_next.h, l);
        while (it.next(pair)) {
            ++enumerated;
            std::uint64_t z = represent(pair, state_next);
            AdmissiblePair hat = hat_projection(pair, *state_next.spec, *view.prev.spec);
            if (hat.level() <= k_next - 1) {
                ++low_hat;
                if (!level_k_set.contains(z / view.stride)) ++violations;
                continue;
            }
            auto match = std::find(view.pairs->begin(), view.pairs->end(), hat);
            if (match == view.pairs->end()) {
                ++skipped;  // hat has no matched module in a restricted state
                continue;
            }
            ++matched;
            std::size_t j = static_cast<std::size_t>(match - view.pairs->begin());
            if (appended_digit(*state_next.spec, base_modules, j, z) != 0) ++violations;
        }
    }

    Certificate cert;
    cert.claim = Claim::StructuralLemma;
    put(cert.parameters, "stage", static_cast<std::uint64_t>(state_next.k));
    put(cert.parameters, "group_size", n);
    put(cert.parameters, "pair_subset_size", static_cast<std::uint64_t>(view.pairs->size()));
    put(cert.measured, "pairs_enumerated", enumerated);
    put(cert.measured, "low_level_hat_checked", low_hat);
    put(cert.measured, "matched_hat_checked", matched);
    put(cert.measured, "unmatched_hat_skipped", skipped);
    put(cert.measured, "violations", violations);
    cert.bound = 0;
    cert.pass = violations == 0;
    cert.taints = state_next.taints;
    return cert;
}

Certificate check_pi_j_zero(const ConstructionState& state_next) {
    LayerView view = layer_view(state_next);
    const std::size_t base_modules = view.prev.spec->modules().size();
    const std::uint64_t fiber = view.stride;

    BigInt total = 0;
    for (const AdmissiblePair& p : *view.pairs) {
        BigInt combos = 1;
        for (int i = 0; i < p.level(); ++i) combos *= fiber;
        total += combos;
    }
    if (total > BigInt(kPairBudget))
        throw BudgetError("pi_j sweep needs " + total.str() + " admissible pairs, over the budget of " +
                          std::to_string(kPairBudget));

    std::uint64_t checked = 0, violations = 0;
    for (std::size_t j = 0; j < view.pairs->size(); ++j) {
        const AdmissiblePair& hat = (*view.pairs)[j];
        const std::size_t points = hat.support.size();
        std::vector<std::uint64_t> offsets(points, 0);
        AdmissiblePair lifted;
        lifted.support.resize(points);
        while (true) {
            for (std::size_t i = 0; i < points; ++i) {
                const PairEntry& e = hat.support[i];
                lifted.support[i] = PairEntry{e.element * fiber + offsets[i], e.alpha, e.beta};
            }
            ++checked;
            std::uint64_t z = represent(lifted, state_next);
            if (appended_digit(*state_next.spec, base_modules, j, z) != 0) ++violations;

            std::size_t i = points;
            bool carry = true;
            while (i-- > 0) {
                if (++offsets[i] < fiber) {
                    carry = false;
                    break;
                }
                offsets[i] = 0;
            }
            if (carry) break;
        }
    }

    Certificate cert;
    cert.claim = Claim::PiJZero;
    put(cert.parameters, "stage", static_cast<std::uint64_t>(state_next.k));
    put(cert.parameters, "pair_subset_size", static_cast<std::uint64_t>(view.pairs->size()));
    put(cert.parameters, "fiber_size", fiber);
    put(cert.measured, "pairs_checked", checked);
    put(cert.measured, "violations", violations);
    cert.bound = 0;
    cert.pass = violations == 0;
    cert.taints = state_next.taints;
    return cert;
}

Certificate check_projection_A(const ConstructionState& state_prev,
                               const ConstructionState& state_next) {
    if (!has_previous_stage(state_next) ||
        !previous_state(state_next).spec->same_group(*state_prev.spec))
        throw SpecError("state_prev is not the stage the extended state was built from");
    std::uint64_t stride = state_next.spec->total_size() / state_prev.spec->total_size();

    GroupSet A_prev = build_A(state_prev);
    GroupSet A_next = build_A(state_next);
    GroupSet projected(state_prev.spec);
    A_next.bits().for_each_set([&](std::uint64_t a) { projected.insert(a / stride); });

    Bitset mismatch = projected.bits();
    mismatch ^= A_prev.bits();
    std::uint64_t mismatches = mismatch.count();

    Certificate cert;
    cert.claim = Claim::ProjectionA;
    put(cert.parameters, "stage", static_cast<std::uint64_t>(state_next.k));
    put(cert.parameters, "group_size", state_next.spec->total_size());
    put(cert.measured, "a_next_size", A_next.cardinality());
    put(cert.measured, "projected_size", projected.cardinality());
    put(cert.measured, "a_prev_size", A_prev.cardinality());
    put(cert.measured, "mismatches", mismatches);
    cert.bound = 0;
    cert.pass = mismatches == 0;
    cert.taints = state_next.taints;
    return cert;
}

Certificate check_final(const ConstructionState& state) {
    if (state.k != state.h)
        throw SpecError("final bound requires the final stage k = h = " + std::to_string(state.h) +
                        ", state is at k = " + std::to_string(state.k));
    GroupSet A = build_A(state);
    GroupSet S = h_fold_sumset(A, state.h);
    const std::uint64_t group_size = state.spec->total_size();

    Certificate cert;
    cert.claim = Claim::FinalBound;
    put(cert.parameters, "h", static_cast<std::uint64_t>(state.h));
    put(cert.parameters, "epsilon", state.schedule.epsilon);
    put(cert.measured, "a_size", A.cardinality());
    put(cert.measured, "h_fold_sumset_size", S.cardinality());
    put(cert.measured, "group_size", group_size);
    cert.bound = state.schedule.epsilon * Rational(BigInt(group_size));
    cert.pass = strictly_below(Rational(BigInt(S.cardinality())), cert.bound, cert.notes);
    cert.taints = state.taints;
    return cert;
}

std::vector<Certificate> check_all(const ConstructionState& state) {
    std::vector<ConstructionState> stages{state};
    while (has_previous_stage(stages.back())) stages.push_back(previous_state(stages.back()));
    std::reverse(stages.begin(), stages.end());

    std::vector<Certificate> out;

    // Lemma 1 over the stage-1 module sizes (the count is independent of
    // the target, so 0 is used).
    const ConstructionState& first = stages.front();
    std::vector<std::uint64_t> sizes;
    for (const ModuleSpec& m : first.spec->modules()) sizes.push_back(m.size());
    out.push_back(check_lemma1(sizes, std::vector<std::uint64_t>(sizes.size(), 0),
                               first.schedule.level(1)));

    for (std::size_t i = 0; i < stages.size(); ++i) {
        const ConstructionState& stage = stages[i];
        out.push_back(check_subtractive_basis(stage));
        out.push_back(check_level_bound(stage, stage.k));
        if (i > 0) {
            GroupSet L_prev = level_set(stages[i - 1], stages[i - 1].k);
            out.push_back(check_structural_lemma(stage, L_prev));
            out.push_back(check_pi_j_zero(stage));
            out.push_back(check_projection_A(stages[i - 1], stage));
        }
    }

    if (state.k == state.h) out.push_back(check_final(state));
    return out;
}

bool any_untainted_failure(const std::vector<Certificate>& certificates) {
    for (const Certificate& cert : certificates)
        if (!cert.pass && !cert.tainted()) return true;
    return false;
}

}  // namespace mdms
