#include "mdms/construction.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "mdms/errors.hpp"

namespace mdms {

// ---------------------------------------------------------------- schedule

const Rational& EpsilonSchedule::level(int k) const {
    if (k < 1 || k > h()) throw SpecError("schedule level index " + std::to_string(k) + " out of range");
    return levels[static_cast<std::size_t>(k - 1)];
}

void EpsilonSchedule::validate() const {
    if (levels.empty()) throw SpecError("epsilon schedule has no levels");
    if (!(levels.front() > 0)) throw SpecError("epsilon schedule must start above 0");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (!(levels[i - 1] < levels[i]))
            throw SpecError("epsilon schedule must be strictly increasing");
    if (!(levels.back() < epsilon))
        throw SpecError("epsilon schedule must stay strictly below epsilon");
}

EpsilonSchedule default_schedule(int h, const Rational& epsilon) {
    if (h < 1) throw SpecError("h must be positive");
    if (!(epsilon > 0)) throw SpecError("epsilon must be positive");
    EpsilonSchedule schedule;
    schedule.epsilon = epsilon;
    schedule.levels.reserve(static_cast<std::size_t>(h));
    for (int k = 1; k <= h; ++k)
        schedule.levels.push_back(Rational(k) * epsilon / (h + 1));
    schedule.validate();
    return schedule;
}

// ------------------------------------------------------------------- pairs

int AdmissiblePair::weight() const {
    int w = 0;
    for (const PairEntry& e : support) w += e.alpha + e.beta;
    return w;
}

void AdmissiblePair::validate(std::uint64_t group_size, int h) const {
    if (support.empty()) throw SpecError("admissible pair has empty support");
    int total = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const PairEntry& e = support[i];
        if (e.element >= group_size)
            throw SpecError("pair support element " + std::to_string(e.element) + " out of range");
        if (i > 0 && support[i - 1].element >= e.element)
            throw SpecError("pair support must be strictly sorted by element");
        if (e.alpha < 0 || e.beta < 0 || e.alpha > h || e.beta > h)
            throw SpecError("pair values must lie in 0..h");
        if (e.alpha + e.beta < 1) throw SpecError("pair support entry with alpha+beta = 0");
        total += e.alpha + e.beta;
    }
    if (total != h)
        throw SpecError("pair weight " + std::to_string(total) + " differs from h = " + std::to_string(h));
}

// ---------------------------------------------------------------- FnTable

struct FnTable::Impl {
    Kind kind = Kind::Explicit;
    GroupSpecPtr domain;

    // InitialClosedForm: digit j of f(w) is digit_scale[j] * w_j.
    std::vector<std::uint64_t> digit_scale;

    // InductiveLayer.
    std::shared_ptr<const Impl> base;
    std::vector<AdmissiblePair> pairs;
    std::uint64_t appended_stride = 1;  // product of appended module sizes

    // Explicit.
    std::vector<std::uint64_t> table;

    std::uint64_t eval(std::uint64_t w) const;
};

std::uint64_t FnTable::Impl::eval(std::uint64_t w) const {
    switch (kind) {
        case Kind::InitialClosedForm: {
            std::uint64_t out = 0;
            for (std::size_t j = 0; j < domain->digit_count(); ++j) {
                std::uint64_t m = domain->digit_radix(j), s = domain->digit_stride(j);
                std::uint64_t d = (w / s) % m;
                out += ((static_cast<unsigned __int128>(digit_scale[j]) * d) % m) * s;
            }
            return out;
        }
        case Kind::Explicit:
            return table[w];
        case Kind::InductiveLayer: {
            const GroupSpec& spec = *domain;
            std::uint64_t wk = w / appended_stride;
            std::uint64_t out = base->eval(wk) * appended_stride;
            std::size_t first_appended = base->domain->modules().size();
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto& support = pairs[i].support;
                auto it = std::lower_bound(
                    support.begin(), support.end(), wk,
                    [](const PairEntry& e, std::uint64_t v) { return e.element < v; });
                if (it == support.end() || it->element != wk) continue;
                int denom = it->alpha + it->beta;
                if (denom == 0 || it->alpha == 0) continue;
                std::size_t module = first_appended + i;
                std::size_t digit = spec.module_first_digit(module);
                std::uint64_t m = spec.digit_radix(digit), s = spec.digit_stride(digit);
                std::uint64_t x = (w / s) % m;
                // g_i = -alpha * x / (alpha + beta) in M_i.
                std::uint64_t t = (static_cast<std::uint64_t>(it->alpha) % m) * x % m;
                t = (m - t) % m;
                t = static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(t) * spec.unit_inverse_digit(denom, digit)) % m);
                out += t * s;
            }
            return out;
        }
    }
    return 0;
}

FnTable FnTable::initial_closed_form(GroupSpecPtr spec) {
    if (!spec) throw SpecError("null spec for closed-form table");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::InitialClosedForm;
    impl->domain = spec;
    impl->digit_scale.reserve(spec->digit_count());
    int h = spec->h();
    for (std::size_t j = 0; j < spec->digit_count(); ++j) {
        std::uint64_t m = spec->digit_radix(j);
        std::uint64_t i = static_cast<std::uint64_t>(spec->module_of_digit(j)) % m;
        std::uint64_t inv_h = spec->unit_inverse_digit(h, j);
        std::uint64_t scale = (m - (static_cast<unsigned __int128>(i) * inv_h) % m) % m;
        impl->digit_scale.push_back(scale);
    }
    return FnTable(std::move(impl));
}

FnTable FnTable::inductive_layer(GroupSpecPtr extended_spec, FnTable base,
                                 std::vector<AdmissiblePair> pairs) {
    if (!extended_spec) throw SpecError("null spec for inductive layer");
    const GroupSpecPtr& base_domain = base.domain();
    std::size_t base_modules = base_domain->modules().size();
    if (extended_spec->modules().size() != base_modules + pairs.size())
        throw SpecError("extended spec must append exactly one module per pair");
    for (std::size_t i = 0; i < base_modules; ++i)
        if (!(extended_spec->modules()[i] == base_domain->modules()[i]))
            throw SpecError("extended spec does not extend the base domain as a prefix");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::InductiveLayer;
    impl->domain = extended_spec;
    impl->base = base.impl_;
    impl->pairs = std::move(pairs);
    impl->appended_stride = extended_spec->total_size() / base_domain->total_size();
    return FnTable(std::move(impl));
}

FnTable FnTable::explicit_table(GroupSpecPtr spec, std::vector<std::uint64_t> table) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Explicit;
    impl->domain = std::move(spec);
    impl->table = std::move(table);
    return FnTable(std::move(impl));
}

std::uint64_t FnTable::operator()(std::uint64_t w) const { return impl_->eval(w); }

FnTable::Kind FnTable::kind() const { return impl_->kind; }

const GroupSpecPtr& FnTable::domain() const { return impl_->domain; }

FnTable FnTable::base() const {
    if (impl_->kind != Kind::InductiveLayer) throw SpecError("table has no base layer");
    return FnTable(impl_->base);
}

const std::vector<AdmissiblePair>& FnTable::pairs() const { return impl_->pairs; }

const std::vector<std::uint64_t>& FnTable::table() const {
    if (impl_->kind != Kind::Explicit) throw SpecError("table is not explicit");
    return impl_->table;
}

FnTable FnTable::materialize() const {
    const GroupSpecPtr& spec = impl_->domain;
    if (spec->total_size() > kGroupSizeCap)
        throw CapError("cannot materialize a function table over " +
                       std::to_string(spec->total_size()) + " elements (cap " +
                       std::to_string(kGroupSizeCap) + ")");
    std::vector<std::uint64_t> table(spec->total_size());
    for (std::uint64_t w = 0; w < spec->total_size(); ++w) table[w] = impl_->eval(w);
    return explicit_table(spec, std::move(table));
}

// ------------------------------------------------------ counting / enumeration

namespace {

BigInt binomial(const BigInt& n, std::uint64_t k) {
    if (n < 0 || BigInt(k) > n) return 0;
    BigInt out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        out *= n - BigInt(i - 1);
        out /= i;
    }
    return out;
}

/// Sum over compositions of h into `parts` positive parts of prod(s_i + 1).
BigInt composition_weight(int h, int parts) {
    if (parts < 1 || parts > h) return 0;
    std::vector<BigInt> dp(static_cast<std::size_t>(h) + 1, 0);
    dp[0] = 1;
    for (int pos = 0; pos < parts; ++pos) {
        std::vector<BigInt> next(static_cast<std::size_t>(h) + 1, 0);
        for (int t = 0; t <= h; ++t) {
            if (dp[static_cast<std::size_t>(t)] == 0) continue;
            for (int s = 1; t + s <= h; ++s)
                next[static_cast<std::size_t>(t + s)] += dp[static_cast<std::size_t>(t)] * (s + 1);
        }
        dp = std::move(next);
    }
    return dp[static_cast<std::size_t>(h)];
}

}  // namespace

BigInt count_admissible_pairs(std::uint64_t group_size, int h, std::optional<int> level) {
    if (h < 1) throw SpecError("h must be positive");
    if (group_size < 1) throw SpecError("group size must be positive");
    if (!level) return binomial(2 * BigInt(group_size) + h - 1, static_cast<std::uint64_t>(h));
    int l = *level;
    if (l < 1 || l > h || BigInt(l) > BigInt(group_size)) return 0;
    return binomial(BigInt(group_size), static_cast<std::uint64_t>(l)) * composition_weight(h, l);
}

PairEnumerator::PairEnumerator(std::uint64_t group_size, int h, int level)
    : group_size_(group_size), h_(h), level_(level) {
    if (h_ < 1) throw SpecError("h must be positive");
    if (level_ < 1 || level_ > h_ || BigInt(level_) > BigInt(group_size_)) done_ = true;
}

bool PairEnumerator::first_composition() {
    comp_.assign(static_cast<std::size_t>(level_), 1);
    comp_.back() = h_ - level_ + 1;
    val_.assign(static_cast<std::size_t>(level_), 0);
    return true;
}

bool PairEnumerator::next_composition() {
    // Lexicographic successor among compositions of h into level_ positive parts.
    int n = level_;
    for (int j = n - 2; j >= 0; --j) {
        int suffix = 0;
        for (int i = j + 1; i < n; ++i) suffix += comp_[static_cast<std::size_t>(i)];
        if (suffix >= (n - 1 - j) + 1) {
            comp_[static_cast<std::size_t>(j)] += 1;
            int remaining = suffix - 1;
            for (int i = j + 1; i < n - 1; ++i) {
                comp_[static_cast<std::size_t>(i)] = 1;
                remaining -= 1;
            }
            comp_[static_cast<std::size_t>(n - 1)] = remaining;
            val_.assign(static_cast<std::size_t>(n), 0);
            return true;
        }
    }
    return false;
}

bool PairEnumerator::next_support() {
    // Next lexicographic combination of size level_ from [0, group_size).
    int n = level_;
    for (int i = n - 1; i >= 0; --i) {
        std::uint64_t limit = group_size_ - static_cast<std::uint64_t>(n - i);
        if (support_[static_cast<std::size_t>(i)] < limit) {
            std::uint64_t v = ++support_[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n; ++j) support_[static_cast<std::size_t>(j)] = ++v;
            return true;
        }
    }
    return false;
}

bool PairEnumerator::next(AdmissiblePair& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        support_.resize(static_cast<std::size_t>(level_));
        for (int i = 0; i < level_; ++i) support_[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
        first_composition();
    } else {
        // Advance: values (rightmost fastest), then composition, then support.
        int i = level_ - 1;
        while (i >= 0 && val_[static_cast<std::size_t>(i)] == comp_[static_cast<std::size_t>(i)]) {
            val_[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i >= 0) {
            val_[static_cast<std::size_t>(i)] += 1;
        } else if (!next_composition()) {
            if (!next_support()) {
                done_ = true;
                return false;
            }
            first_composition();
        }
    }
    out.support.resize(static_cast<std::size_t>(level_));
    for (int i = 0; i < level_; ++i) {
        int s = comp_[static_cast<std::size_t>(i)], v = val_[static_cast<std::size_t>(i)];
        out.support[static_cast<std::size_t>(i)] =
            PairEntry{support_[static_cast<std::size_t>(i)], s - v, v};
    }
    return true;
}

std::vector<AdmissiblePair> enumerate_admissible_pairs(std::uint64_t group_size, int h, int level,
                                                       std::uint64_t budget) {
    BigInt count = count_admissible_pairs(group_size, h, level);
    if (count > BigInt(budget))
        throw BudgetError("enumerating " + count.str() + " admissible pairs of level " +
                          std::to_string(level) + " exceeds the budget of " + std::to_string(budget));
    std::vector<AdmissiblePair> out;
    out.reserve(static_cast<std::size_t>(count));
    PairEnumerator it(group_size, h, level);
    AdmissiblePair pair;
    while (it.next(pair)) out.push_back(pair);
    return out;
}

std::vector<AdmissiblePair> first_admissible_pairs(std::uint64_t group_size, int h, int level,
                                                   std::uint64_t take) {
    std::vector<AdmissiblePair> out;
    PairEnumerator it(group_size, h, level);
    AdmissiblePair pair;
    while (out.size() < take && it.next(pair)) out.push_back(pair);
    return out;
}

// ------------------------------------------------------------- construction

std::uint64_t choose_module_size(const Rational& lower_bound, int h) {
    BigInt min_exclusive = lower_bound > 0 ? rational_floor(lower_bound) : BigInt(0);
    BigInt candidate = min_exclusive + 1;
    if (candidate < h + 1) candidate = h + 1;
    std::uint64_t c = static_cast<std::uint64_t>(candidate);
    while (!is_prime(c)) ++c;
    return c;
}

namespace {

std::vector<std::string> merge_taints(std::vector<std::string> base,
                                      const std::vector<std::string>& extra) {
    for (const auto& t : extra)
        if (std::find(base.begin(), base.end(), t) == base.end()) base.push_back(t);
    return base;
}

std::vector<std::string> taints_from_history(const std::vector<StageRecord>& history) {
    std::vector<std::string> out;
    for (const auto& record : history) out = merge_taints(std::move(out), record.taints);
    return out;
}

bool restricted_from_history(const std::vector<StageRecord>& history) {
    for (const auto& record : history)
        if (record.restricted) return true;
    return false;
}

}  // namespace

ConstructionState build_initial(int h, const EpsilonSchedule& schedule,
                                const std::optional<std::vector<ModuleSpec>>& size_override,
                                bool force) {
    if (h < 1) throw SpecError("h must be positive");
    schedule.validate();
    if (schedule.h() != h)
        throw SpecError("schedule has " + std::to_string(schedule.h()) + " levels, expected " +
                        std::to_string(h));

    const Rational bound = Rational(h + 1) / schedule.level(1);

    std::vector<ModuleSpec> modules;
    std::vector<std::string> taints;
    if (size_override) {
        modules = *size_override;
        bool waived = modules.size() != static_cast<std::size_t>(h) + 1;
        for (const ModuleSpec& m : modules)
            if (!(Rational(m.size()) > bound)) waived = true;
        if (waived) {
            if (!force)
                throw SpecError("overridden modules violate the initial-step bound |M_i| > " +
                                rational_to_string(bound) + " with h+1 = " + std::to_string(h + 1) +
                                " modules; pass force to waive it");
            taints.push_back(kTaintBoundWaived);
        }
    } else {
        std::uint64_t p = choose_module_size(bound, h);
        modules.assign(static_cast<std::size_t>(h) + 1, cyclic_module(p));
    }

    ConstructionState state;
    state.h = h;
    state.k = 1;
    state.schedule = schedule;
    state.spec = make_group_spec(modules, h);  // validates R_h
    state.f = FnTable::initial_closed_form(state.spec);

    StageRecord record;
    record.stage = 1;
    record.required_bound = bound;
    for (const ModuleSpec& m : state.spec->modules()) record.module_sizes.push_back(m.size());
    record.taints = taints;
    state.history.push_back(std::move(record));
    state.restricted = false;
    state.taints = taints;
    return state;
}

GroupSet build_A(const GroupSpecPtr& spec, const FnTable& f) {
    GroupSet A(spec);
    for (std::uint64_t w = 0; w < spec->total_size(); ++w) {
        std::uint64_t fw = f(w);
        A.insert(spec->add(w, fw));
        A.insert(fw);
    }
    return A;
}

GroupSet build_A(const ConstructionState& state) { return build_A(state.spec, state.f); }

std::uint64_t represent(const AdmissiblePair& pair, const ConstructionState& state) {
    const GroupSpec& spec = *state.spec;
    pair.validate(spec.total_size(), state.h);
    std::uint64_t z = 0;
    for (const PairEntry& e : pair.support) {
        std::uint64_t fw = state.f(e.element);
        std::uint64_t term = spec.add(spec.scalar_mul(e.alpha, e.element),
                                      spec.scalar_mul(e.alpha + e.beta, fw));
        z = spec.add(z, term);
    }
    return z;
}

GroupSet level_set(const ConstructionState& state, int level) {
    if (level < 1 || level > state.h)
        throw SpecError("level must lie in 1..h = 1.." + std::to_string(state.h));
    const std::uint64_t n = state.spec->total_size();

    BigInt total = 0;
    for (int l = 1; l <= level; ++l) total += count_admissible_pairs(n, state.h, l);
    if (total > BigInt(kPairBudget))
        throw BudgetError("level set needs " + total.str() + " admissible pairs, over the budget of " +
                          std::to_string(kPairBudget));

    GroupSet L(state.spec);
    AdmissiblePair pair;
    for (int l = 1; l <= level; ++l) {
        PairEnumerator it(n, state.h, l);
        while (it.next(pair)) L.insert(represent(pair, state));
    }
    return L;
}

Rational required_module_bound(const BigInt& pair_count, const EpsilonSchedule& schedule, int k) {
    if (k < 1 || k >= schedule.h())
        throw SpecError("stage k must lie in 1..h-1 for the module bound");
    return Rational(pair_count) / (schedule.level(k + 1) - schedule.level(k));
}

ConstructionState inductive_step(const ConstructionState& state,
                                 std::vector<AdmissiblePair> pairs,
                                 std::vector<std::uint64_t> sizes) {
    if (state.k >= state.h)
        throw SpecError("state is already at the final stage k = h = " + std::to_string(state.h));
    if (pairs.empty()) throw SpecError("inductive step needs a nonempty pair set");
    if (sizes.size() != pairs.size())
        throw SpecError("need exactly one module size per pair (" + std::to_string(pairs.size()) +
                        " pairs, " + std::to_string(sizes.size()) + " sizes)");

    const int next_level = state.k + 1;
    const std::uint64_t n_prev = state.spec->total_size();
    for (const AdmissiblePair& pair : pairs) {
        pair.validate(n_prev, state.h);
        if (pair.level() != next_level)
            throw SpecError("inductive step pairs must have level exactly " +
                            std::to_string(next_level) + ", got level " +
                            std::to_string(pair.level()));
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j)
            if (pairs[i] == pairs[j]) throw SpecError("duplicate pair in inductive step");
    for (std::uint64_t size : sizes)
        if (!satisfies_rh(cyclic_module(size), state.h))
            throw SpecError("module size " + std::to_string(size) +
                            " violates the R_h condition for h = " + std::to_string(state.h));

    const BigInt full_count = count_admissible_pairs(n_prev, state.h, next_level);
    const Rational bound = required_module_bound(full_count, state.schedule, state.k);

    bool full_pair_set = BigInt(pairs.size()) == full_count;
    bool sizes_ok = true;
    for (std::uint64_t size : sizes)
        if (!(Rational(size) > bound)) sizes_ok = false;
    const bool restricted_step = !(full_pair_set && sizes_ok);

    std::vector<ModuleSpec> modules = state.spec->modules();
    for (std::uint64_t size : sizes) modules.push_back(cyclic_module(size));
    GroupSpecPtr next_spec = make_group_spec(std::move(modules), state.h);

    ConstructionState next;
    next.h = state.h;
    next.k = next_level;
    next.schedule = state.schedule;
    next.spec = next_spec;
    next.f = FnTable::inductive_layer(next_spec, state.f, pairs);

    StageRecord record;
    record.stage = next_level;
    record.full_pair_count = full_count;
    record.required_bound = bound;
    record.module_sizes = std::move(sizes);
    record.pairs = std::move(pairs);
    record.restricted = restricted_step;
    if (restricted_step) record.taints.push_back(kTaintRestricted);

    next.history = state.history;
    next.history.push_back(std::move(record));
    next.restricted = restricted_from_history(next.history);
    next.taints = taints_from_history(next.history);
    return next;
}

namespace {

std::uint64_t prefix_stride(const GroupSpec& spec_next, const GroupSpec& spec_prev) {
    const auto& next_modules = spec_next.modules();
    const auto& prev_modules = spec_prev.modules();
    bool prefix = prev_modules.size() <= next_modules.size() &&
                  std::equal(prev_modules.begin(), prev_modules.end(), next_modules.begin());
    if (!prefix || spec_next.h() != spec_prev.h())
        throw SpecError("the previous-stage spec is not a prefix of the extended spec");
    return spec_next.total_size() / spec_prev.total_size();
}

}  // namespace

std::uint64_t project_to_prev(std::uint64_t index, const GroupSpec& spec_next,
                              const GroupSpec& spec_prev) {
    return index / prefix_stride(spec_next, spec_prev);
}

AdmissiblePair hat_projection(const AdmissiblePair& pair, const GroupSpec& spec_next,
                              const GroupSpec& spec_prev) {
    pair.validate(spec_next.total_size(), spec_next.h());
    const std::uint64_t stride = prefix_stride(spec_next, spec_prev);
    std::map<std::uint64_t, std::pair<int, int>> sums;
    for (const PairEntry& e : pair.support) {
        auto& acc = sums[e.element / stride];
        acc.first += e.alpha;
        acc.second += e.beta;
    }
    AdmissiblePair hat;
    hat.support.reserve(sums.size());
    for (const auto& [element, values] : sums)
        hat.support.push_back(PairEntry{element, values.first, values.second});
    return hat;
}

bool has_previous_stage(const ConstructionState& state) {
    return state.k >= 2 && state.history.size() >= 2;
}

namespace {

/// The f table implied by the first `stages` history records. Lets states
/// whose live f was replaced (explicit tables, mutation tests) still
/// reconstruct their honest ancestry.
FnTable fn_from_history(const ConstructionState& state, std::size_t stages) {
    const auto& all = state.spec->modules();
    std::size_t count = state.history.front().module_sizes.size();
    if (count > all.size()) throw SpecError("history does not match the state's spec");
    GroupSpecPtr spec =
        make_group_spec({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count)}, state.h);
    FnTable f = FnTable::initial_closed_form(spec);
    for (std::size_t i = 1; i < stages; ++i) {
        count += state.history[i].pairs.size();
        if (count > all.size()) throw SpecError("history does not match the state's spec");
        spec = make_group_spec({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count)},
                               state.h);
        f = FnTable::inductive_layer(spec, f, state.history[i].pairs);
    }
    return f;
}

}  // namespace

ConstructionState previous_state(const ConstructionState& state) {
    if (!has_previous_stage(state))
        throw SpecError("state at stage " + std::to_string(state.k) + " has no previous stage");
    ConstructionState prev;
    prev.h = state.h;
    prev.k = state.k - 1;
    prev.schedule = state.schedule;
    prev.f = state.f.kind() == FnTable::Kind::InductiveLayer
                 ? state.f.base()
                 : fn_from_history(state, state.history.size() - 1);
    prev.spec = prev.f.domain();
    prev.history.assign(state.history.begin(), state.history.end() - 1);
    prev.restricted = restricted_from_history(prev.history);
    prev.taints = taints_from_history(prev.history);
    return prev;
}

}  // namespace mdms
