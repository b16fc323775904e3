#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdms/modarith.hpp"
#include "mdms/rational.hpp"
#include "mdms/setops.hpp"

namespace mdms {

/// Refuse admissible-pair enumerations above this many pairs. The exact
/// count is always computed first, so the refusal is cheap.
inline constexpr std::uint64_t kPairBudget = 10'000'000;

/// Taint labels carried by states and propagated into certificates.
inline constexpr const char* kTaintBoundWaived = "bound-waived";
inline constexpr const char* kTaintRestricted = "restricted";

/// The stage thresholds 0 < e_1 < e_2 < ... < e_h < epsilon.
struct EpsilonSchedule {
    Rational epsilon;
    std::vector<Rational> levels;

    int h() const { return static_cast<int>(levels.size()); }
    /// e_k, 1-based.
    const Rational& level(int k) const;
    /// Throws SpecError unless the strict chain holds.
    void validate() const;
};

/// The uniform grid e_k = k*epsilon/(h+1).
EpsilonSchedule default_schedule(int h, const Rational& epsilon);

/// One support entry of an admissible pair: the group element (by index)
/// together with its (alpha, beta) values.
struct PairEntry {
    std::uint64_t element = 0;
    int alpha = 0;
    int beta = 0;

    bool operator==(const PairEntry& other) const = default;
};

/// A pair of functions (alpha, beta): W -> {0..h} with total weight
/// sum(alpha+beta) = h, stored sparsely on its support. The level is the
/// support size.
struct AdmissiblePair {
    std::vector<PairEntry> support;  // sorted by element, alpha+beta >= 1 each

    int level() const { return static_cast<int>(support.size()); }
    int weight() const;
    /// Support sorted, entries in range, weights valid, total weight == h.
    void validate(std::uint64_t group_size, int h) const;

    bool operator==(const AdmissiblePair& other) const = default;
};

/// A function f: W -> W. Three representations:
///   - the closed-form f_1 of the initial step,
///   - an inductive layer (f_k(w_k), g_1, ..., g_n) over a base table,
///   - an explicit index-to-index table.
/// Copies are cheap (immutable shared representation).
class FnTable {
public:
    enum class Kind { InitialClosedForm, InductiveLayer, Explicit };

    /// f(x_0,...,x_t) = (0, -(1/h)x_1, ..., -(i/h)x_i, ...), one coefficient
    /// per module. With the canonical t = h+1 modules this is the initial
    /// step's f_1; smaller forced module counts reuse the same formula.
    static FnTable initial_closed_form(GroupSpecPtr spec);

    /// f_{k+1}(w_k, x_1..x_n) = (f_k(w_k), g_1, ..., g_n) where
    /// g_i = -alpha_i(w_k) x_i / (alpha_i(w_k)+beta_i(w_k)), or 0 when the
    /// pair does not touch w_k. One appended module per pair.
    static FnTable inductive_layer(GroupSpecPtr extended_spec, FnTable base,
                                   std::vector<AdmissiblePair> pairs);

    static FnTable explicit_table(GroupSpecPtr spec, std::vector<std::uint64_t> table);

    std::uint64_t operator()(std::uint64_t w) const;

    Kind kind() const;
    const GroupSpecPtr& domain() const;
    /// InductiveLayer only. Copies are cheap.
    FnTable base() const;
    const std::vector<AdmissiblePair>& pairs() const;
    /// Explicit only.
    const std::vector<std::uint64_t>& table() const;

    /// Evaluates everywhere and returns an Explicit table (cap-gated).
    FnTable materialize() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit FnTable(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

/// Where each stage's spec came from: the full level-k pair count on the
/// previous group, the module-size bound, and the pairs actually used.
struct StageRecord {
    int stage = 1;                     // the k this record produced
    BigInt full_pair_count = 0;        // all level-k pairs on W_{k-1} (0 for stage 1)
    Rational required_bound;           // module-size lower bound for this stage
    std::vector<std::uint64_t> module_sizes;
    std::vector<AdmissiblePair> pairs; // chosen P, on W_{k-1} (empty for stage 1)
    bool restricted = false;
    std::vector<std::string> taints;
};

/// The pair (W_k, f_k) with its schedule and build history.
struct ConstructionState {
    int h = 1;
    int k = 1;
    EpsilonSchedule schedule;
    GroupSpecPtr spec;
    FnTable f = FnTable::explicit_table(nullptr, {});
    std::vector<StageRecord> history;
    bool restricted = false;
    std::vector<std::string> taints;
};

/// Smallest prime p with p > h and p > lower_bound.
std::uint64_t choose_module_size(const Rational& lower_bound, int h);

/// The stage-1 state: by default h+1 cyclic modules of the smallest prime
/// exceeding max(h, (h+1)/e_1), with the closed-form f_1. Overridden
/// modules must satisfy R_h; size or shape violations of the paper bound
/// are errors unless force is set, in which case the state is tainted
/// "bound-waived".
ConstructionState build_initial(int h, const EpsilonSchedule& schedule,
                                const std::optional<std::vector<ModuleSpec>>& size_override = {},
                                bool force = false);

/// A(W,f) = {w + f(w)} cup {f(w)}.
GroupSet build_A(const GroupSpecPtr& spec, const FnTable& f);
GroupSet build_A(const ConstructionState& state);

/// Exact number of admissible pairs on a group of size N: with a level,
/// C(N, level) * (compositions of h into `level` positive parts, each part
/// s contributing a factor s+1); without, C(2N+h-1, h).
BigInt count_admissible_pairs(std::uint64_t group_size, int h,
                              std::optional<int> level = {});

/// Deterministic enumeration of the admissible pairs of one exact level:
/// supports in lexicographic order; per support, compositions of h in
/// lexicographic order; per composition, (alpha, beta) values with alpha
/// descending, rightmost support position varying fastest.
class PairEnumerator {
public:
    PairEnumerator(std::uint64_t group_size, int h, int level);
    /// False once exhausted. Levels outside 1..min(h, N) yield nothing.
    bool next(AdmissiblePair& out);

private:
    std::uint64_t group_size_;
    int h_, level_;
    bool started_ = false, done_ = false;
    std::vector<std::uint64_t> support_;
    std::vector<int> comp_;  // composition of h into level positive parts
    std::vector<int> val_;   // val[i] = comp[i] - alpha[i]

    bool first_composition();
    bool next_composition();
    bool next_support();
};

/// All pairs of the exact level, budget-gated: throws BudgetError naming
/// the exact count when it exceeds the budget.
std::vector<AdmissiblePair> enumerate_admissible_pairs(std::uint64_t group_size, int h, int level,
                                                       std::uint64_t budget = kPairBudget);

/// The first `take` pairs of the exact level in enumeration order (no
/// budget gate; used to pick restricted pair subsets).
std::vector<AdmissiblePair> first_admissible_pairs(std::uint64_t group_size, int h, int level,
                                                   std::uint64_t take);

/// z = sum over support of alpha(w)(w + f(w)) + beta(w) f(w).
std::uint64_t represent(const AdmissiblePair& pair, const ConstructionState& state);

/// L_level = { represent(p) : level(p) <= level }, budget-gated over the
/// total pair count of levels 1..level.
GroupSet level_set(const ConstructionState& state, int level);

/// n / (e_{k+1} - e_k), the module-size bound of the step k -> k+1.
Rational required_module_bound(const BigInt& pair_count, const EpsilonSchedule& schedule, int k);

/// One inductive step k -> k+1: appends one cyclic module per pair in P
/// and wraps f_k in an inductive layer. P must be nonempty, of level
/// exactly k+1; sizes (one per pair) must satisfy R_h. The result keeps
/// the paper's epsilon guarantee only when P is the full level-(k+1) pair
/// set and every size exceeds required_module_bound; anything else flags
/// the state (and its later certificates) "restricted".
ConstructionState inductive_step(const ConstructionState& state,
                                 std::vector<AdmissiblePair> pairs,
                                 std::vector<std::uint64_t> sizes);

/// (gamma_hat, delta_hat): fiberwise sums of a pair on W_{k+1}, an
/// admissible pair on W_k of level <= the input's.
AdmissiblePair hat_projection(const AdmissiblePair& pair, const GroupSpec& spec_next,
                              const GroupSpec& spec_prev);

/// True when the state has at least one inductive layer.
bool has_previous_stage(const ConstructionState& state);

/// The stage-k state a stage-(k+1) state was built from (spec prefix,
/// base f, history minus the last record).
ConstructionState previous_state(const ConstructionState& state);

/// pi_0: index in W_{k+1} -> index in W_k (both specs known).
std::uint64_t project_to_prev(std::uint64_t index, const GroupSpec& spec_next,
                              const GroupSpec& spec_prev);

}  // namespace mdms
