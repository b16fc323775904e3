#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mdms/bitset.hpp"
#include "mdms/modarith.hpp"
#include "mdms/rational.hpp"

namespace mdms {

/// Hard bound on materialized groups: one bitset is then at most 8 MiB.
inline constexpr std::uint64_t kGroupSizeCap = std::uint64_t{1} << 26;

/// A subset of a finite group as a membership bitset over element indices.
/// Immutable value semantics; every operation preserves spec identity.
class GroupSet {
public:
    /// Throws CapError when spec->total_size() > kGroupSizeCap.
    explicit GroupSet(GroupSpecPtr spec);
    static GroupSet full_set(GroupSpecPtr spec);

    const GroupSpecPtr& spec() const { return spec_; }
    const Bitset& bits() const { return bits_; }
    Bitset& bits() { return bits_; }

    void insert(std::uint64_t index) { bits_.set(index); }
    bool contains(std::uint64_t index) const { return bits_.test(index); }

    std::uint64_t cardinality() const { return bits_.count(); }
    std::uint64_t group_size() const { return spec_->total_size(); }
    bool empty() const { return bits_.none(); }
    bool is_full() const { return bits_.full(); }

    std::vector<std::uint64_t> elements() const;

    bool operator==(const GroupSet& other) const;

private:
    GroupSpecPtr spec_;
    Bitset bits_;
};

/// Translation engine: out = { b + a : b in B } computed with per-digit
/// masked shifts, O(|W|/64) words per digit. Reusable scratch buffers
/// make repeated translations over the same spec cheap.
class GroupTranslator {
public:
    explicit GroupTranslator(GroupSpecPtr spec);
    void translate(const Bitset& in, std::uint64_t a, Bitset& out);

private:
    GroupSpecPtr spec_;
    Bitset mask_, tmp_, cur_;
    void rotate_digit(Bitset& bits, std::size_t digit, std::uint64_t r);
};

/// A - A. Output always contains 0 and is closed under negation; both are
/// asserted before returning. Throws SpecError on an empty input.
GroupSet difference_set(const GroupSet& A);

/// A + B; inputs must share one spec.
GroupSet sumset(const GroupSet& A, const GroupSet& B);

/// hA computed by h-1 pairwise folds.
GroupSet h_fold_sumset(const GroupSet& A, int h);

/// { -a : a in A }.
GroupSet negated_set(const GroupSet& A);

/// { r*a : a in A }.
GroupSet scaled_set(const GroupSet& A, std::int64_t r);

/// A linear form r_1 x_1 + ... + r_h x_h with integer coefficients.
struct LinearForm {
    std::vector<std::int64_t> coefficients;
};

/// F(A) = { sum r_i a_i : a_i in A }.
GroupSet linear_form_image(const LinearForm& F, const GroupSet& A);

/// A - A = W?
bool is_subtractive_basis(const GroupSet& A);

/// |A| / |W| as an exact rational.
Rational density(const GroupSet& A);

// ---- integer sets (kept over Z, never embedded into a finite group) ----

/// Strictly increasing list of integers.
using IntSet = std::vector<std::int64_t>;

/// Sorts and deduplicates; rejects an empty result.
IntSet make_int_set(std::vector<std::int64_t> values);

IntSet int_sumset(const IntSet& A);
IntSet int_difference(const IntSet& A);

enum class MstdClass { Mstd, Balanced, Mdts };

MstdClass mstd_classify(const IntSet& A);
const char* to_string(MstdClass c);

}  // namespace mdms
