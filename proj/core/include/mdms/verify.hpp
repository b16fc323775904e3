#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdms/construction.hpp"
#include "mdms/rational.hpp"
#include "mdms/setops.hpp"

namespace mdms {

enum class Claim {
    SubtractiveBasis,
    LevelBound,
    Lemma1,
    StructuralLemma,
    ProjectionA,
    PiJZero,
    FinalBound,
};

const char* to_string(Claim claim);

/// Ordered key/value record; values are exact decimal or "p/q" strings,
/// lists in bracket form. Deterministic field order keeps certificate
/// JSON byte-stable.
using FieldList = std::vector<std::pair<std::string, std::string>>;

/// Machine-checkable record of one verified identity or inequality.
/// All comparisons behind `pass` are exact rational comparisons; rerunning
/// the named check on `parameters` reproduces `measured` exactly.
struct Certificate {
    Claim claim = Claim::SubtractiveBasis;
    FieldList parameters;
    FieldList measured;
    Rational bound;     // claim-specific: a size bound, or 0 for identity claims
    bool pass = false;
    std::vector<std::string> taints;
    std::vector<std::string> notes;

    bool tainted() const { return !taints.empty(); }
};

/// Strict comparison used by the paper's < bounds: equality fails and is
/// recorded as an "equality-boundary" note.
bool strictly_below(const Rational& measured, const Rational& bound,
                    std::vector<std::string>& notes);

/// difference_set(A) == W.
Certificate check_subtractive_basis(const GroupSet& A,
                                    const std::vector<std::string>& taints = {});
Certificate check_subtractive_basis(const ConstructionState& state);

/// Verdict core of the combinatorial lemma, separated so tests can probe
/// it with corrupted counts.
Certificate lemma1_certificate(const BigInt& measured_s, const std::vector<std::uint64_t>& sizes,
                               const std::vector<std::uint64_t>& target,
                               const std::optional<Rational>& epsilon);

/// Brute-force count of S = { x : x_j = target_j for some j } over the
/// product of plain finite sets of the given sizes; pass iff
/// |S| <= |W| * sum(1/|M_j|), plus the strict epsilon form whenever its
/// hypothesis |M_j| > (n+1)/epsilon holds for all j.
Certificate check_lemma1(const std::vector<std::uint64_t>& sizes,
                         const std::vector<std::uint64_t>& target,
                         const std::optional<Rational>& epsilon = {});

/// |L_level(W_k, f_k)| < e_level * |W_k| (strict). At level 1 the
/// intermediate bound |W| * sum(1/|M_i|) is recorded alongside.
Certificate check_level_bound(const ConstructionState& state, int level);

/// The step lemma on W_{k+1}: every z represented by an admissible pair of
/// level <= k+1 whose hat is in P or of level <= k satisfies
/// pi_0(z) in L_k or pi_j(z) = 0 for the module j matched to its hat.
/// Exhaustive over all pairs of level <= k+1 (budget-gated); pairs whose
/// hat is an unmatched level-(k+1) pair are counted and skipped.
Certificate check_structural_lemma(const ConstructionState& state_next, const GroupSet& level_k_set);

/// The pi_j(z) = 0 telescoping identity alone: all pairs with one fiber
/// point per support element of some pair j in P.
Certificate check_pi_j_zero(const ConstructionState& state_next);

/// pi_0(A_{k+1}) == A_k.
Certificate check_projection_A(const ConstructionState& state_prev,
                               const ConstructionState& state_next);

/// |hA(W_h, f_h)| < epsilon * |W_h| at the final stage k == h.
Certificate check_final(const ConstructionState& state);

/// Every check applicable to the state (and its reconstructed ancestors):
/// Lemma 1 on the stage-1 sizes, subtractive basis and level bound per
/// stage, structural/projection/pi_j checks per inductive layer, and the
/// final bound at k == h.
std::vector<Certificate> check_all(const ConstructionState& state);

/// True when some certificate failed without taints (the CLI's exit-1 rule).
bool any_untainted_failure(const std::vector<Certificate>& certificates);

}  // namespace mdms
