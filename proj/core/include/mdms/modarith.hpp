#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mdms/errors.hpp"
#include "mdms/rational.hpp"

namespace mdms {

/// One summand of a direct sum: Z/mZ, or a dim-dimensional vector space
/// over the prime field F_p. An R_h context requires every prime divisor
/// of a cyclic modulus (and the field characteristic p) to exceed h, so
/// that 1..h are units.
struct ModuleSpec {
    enum class Kind { Cyclic, VectorSpace };

    Kind kind = Kind::Cyclic;
    std::uint64_t modulus = 0;  // m for Cyclic, p for VectorSpace
    std::uint32_t dim = 1;      // 1 for Cyclic

    std::uint64_t size() const;

    bool operator==(const ModuleSpec& other) const = default;
};

ModuleSpec cyclic_module(std::uint64_t m);
ModuleSpec vector_space_module(std::uint64_t p, std::uint32_t dim);

/// True iff every integer in 1..h is a unit in the module's ring;
/// checked by trial division of the modulus up to h.
bool satisfies_rh(const ModuleSpec& module, int h);

bool is_prime(std::uint64_t n);

/// An element of a direct sum, as reduced flattened digits plus its
/// canonical index. Digits follow module order; a vector-space module
/// of dimension d contributes d consecutive digits.
struct Element {
    std::vector<std::uint64_t> digits;
    std::uint64_t index = 0;
};

/// A finite abelian group realized as an ordered direct sum of R_h-modules,
/// with mixed-radix element indexing (module 0 is the most significant
/// digit). Immutable after construction; all operations are pure.
class GroupSpec {
public:
    /// Validates the R_h condition for every module and precomputes
    /// strides and unit inverses. Throws SpecError on an invalid module
    /// and CapError if the total size overflows 64 bits.
    GroupSpec(std::vector<ModuleSpec> modules, int h);

    int h() const { return h_; }
    const std::vector<ModuleSpec>& modules() const { return modules_; }
    std::uint64_t total_size() const { return total_size_; }

    std::size_t digit_count() const { return radix_.size(); }
    std::uint64_t digit_radix(std::size_t j) const { return radix_[j]; }
    std::uint64_t digit_stride(std::size_t j) const { return stride_[j]; }
    std::size_t module_of_digit(std::size_t j) const { return digit_module_[j]; }

    std::size_t module_first_digit(std::size_t i) const { return module_first_digit_[i]; }
    std::size_t module_digit_count(std::size_t i) const;
    /// Stride of the whole module block (stride of its least significant digit).
    std::uint64_t module_stride(std::size_t i) const;

    // Group law on canonical indices.
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const;
    std::uint64_t scalar_mul(std::int64_t r, std::uint64_t a) const;
    /// Unique b with r*b == a; r must lie in 1..h.
    std::uint64_t unit_div(std::uint64_t a, int r) const;

    std::uint64_t encode(const std::vector<std::uint64_t>& digits) const;
    std::vector<std::uint64_t> decode(std::uint64_t index) const;

    Element element(std::uint64_t index) const;
    Element element_from_digits(const std::vector<std::uint64_t>& digits) const;

    /// h^{-1} and general r^{-1} per digit, r in 1..h (cached at construction).
    std::uint64_t unit_inverse_digit(int r, std::size_t j) const;

    /// Structural equality (same modules, same h).
    bool same_group(const GroupSpec& other) const;

private:
    std::vector<ModuleSpec> modules_;
    int h_;
    std::uint64_t total_size_;
    std::vector<std::uint64_t> radix_;    // flattened digit radices
    std::vector<std::uint64_t> stride_;   // mixed-radix strides, module 0 most significant
    std::vector<std::size_t> digit_module_;
    std::vector<std::size_t> module_first_digit_;
    std::vector<std::vector<std::uint64_t>> unit_inverse_;  // [r-1][digit]
};

using GroupSpecPtr = std::shared_ptr<const GroupSpec>;

GroupSpecPtr make_group_spec(std::vector<ModuleSpec> modules, int h);

// Element-level wrappers.
Element add(const Element& a, const Element& b, const GroupSpec& spec);
Element sub(const Element& a, const Element& b, const GroupSpec& spec);
Element neg(const Element& a, const GroupSpec& spec);
Element scalar_mul(std::int64_t r, const Element& a, const GroupSpec& spec);
Element unit_div(const Element& a, int r, const GroupSpec& spec);

/// The isomorphism of a direct sum of pairwise-coprime cyclic groups with
/// Z/m*Z, m* the product of the moduli. forward is additive and bijective;
/// inverse is its two-sided inverse.
class CrtIsomorphism {
public:
    /// Requires: every module cyclic, moduli pairwise coprime.
    explicit CrtIsomorphism(GroupSpecPtr spec);

    std::uint64_t modulus() const { return m_star_; }
    std::uint64_t forward(std::uint64_t index) const;
    std::uint64_t inverse(std::uint64_t residue) const;

private:
    GroupSpecPtr spec_;
    std::uint64_t m_star_;
    std::vector<std::uint64_t> basis_;  // basis_[i] = (m*/m_i) * ((m*/m_i)^-1 mod m_i)
};

}  // namespace mdms
