#include "mdms/modarith.hpp"

#include <numeric>
#include <string>
#include <utility>

namespace mdms {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw CapError(std::string(what) + " overflows 64 bits");
    return out;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

/// Inverse of a mod m; requires gcd(a, m) == 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
    if (m == 1) return 0;
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw SpecError("non-invertible residue " + std::to_string(a) + " mod " + std::to_string(m));
    return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(m) : t);
}

}  // namespace

std::uint64_t ModuleSpec::size() const {
    if (kind == Kind::Cyclic) return modulus;
    std::uint64_t s = 1;
    for (std::uint32_t i = 0; i < dim; ++i) s = checked_mul(s, modulus, "module size");
    return s;
}

ModuleSpec cyclic_module(std::uint64_t m) { return ModuleSpec{ModuleSpec::Kind::Cyclic, m, 1}; }

ModuleSpec vector_space_module(std::uint64_t p, std::uint32_t dim) {
    return ModuleSpec{ModuleSpec::Kind::VectorSpace, p, dim};
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

bool satisfies_rh(const ModuleSpec& module, int h) {
    if (h < 1) return false;
    if (module.modulus == 0) return false;
    if (module.kind == ModuleSpec::Kind::Cyclic) {
        // Every prime divisor of m exceeds h iff nothing in 2..h divides m.
        for (std::uint64_t d = 2; d <= static_cast<std::uint64_t>(h); ++d)
            if (module.modulus % d == 0) return false;
        return true;
    }
    if (module.dim < 1) return false;
    return is_prime(module.modulus) && module.modulus > static_cast<std::uint64_t>(h);
}

GroupSpec::GroupSpec(std::vector<ModuleSpec> modules, int h)
    : modules_(std::move(modules)), h_(h) {
    if (h_ < 1) throw SpecError("h must be positive");
    if (modules_.empty()) throw SpecError("a group spec needs at least one module");

    for (std::size_t i = 0; i < modules_.size(); ++i) {
        const ModuleSpec& m = modules_[i];
        if (!satisfies_rh(m, h_)) {
            throw SpecError("module " + std::to_string(i) +
                            " violates the R_h condition for h = " + std::to_string(h_) +
                            (m.kind == ModuleSpec::Kind::Cyclic
                                 ? " (cyclic modulus " + std::to_string(m.modulus) +
                                       " has a prime divisor <= h)"
                                 : " (field characteristic " + std::to_string(m.modulus) +
                                       " must be a prime > h)"));
        }
        module_first_digit_.push_back(radix_.size());
        std::uint32_t digits = m.kind == ModuleSpec::Kind::Cyclic ? 1 : m.dim;
        for (std::uint32_t d = 0; d < digits; ++d) {
            radix_.push_back(m.modulus);
            digit_module_.push_back(i);
        }
    }

    total_size_ = 1;
    for (std::uint64_t r : radix_) total_size_ = checked_mul(total_size_, r, "group size");

    // Module 0 is the most significant digit.
    stride_.assign(radix_.size(), 1);
    for (std::size_t j = radix_.size() - 1; j-- > 0;)
        stride_[j] = checked_mul(stride_[j + 1], radix_[j + 1], "stride");

    unit_inverse_.resize(static_cast<std::size_t>(h_));
    for (int r = 1; r <= h_; ++r) {
        auto& row = unit_inverse_[static_cast<std::size_t>(r - 1)];
        row.reserve(radix_.size());
        for (std::uint64_t m : radix_) row.push_back(inverse_mod(static_cast<std::uint64_t>(r) % m, m));
    }
}

std::size_t GroupSpec::module_digit_count(std::size_t i) const {
    std::size_t end = i + 1 < modules_.size() ? module_first_digit_[i + 1] : radix_.size();
    return end - module_first_digit_[i];
}

std::uint64_t GroupSpec::module_stride(std::size_t i) const {
    std::size_t end = i + 1 < modules_.size() ? module_first_digit_[i + 1] : radix_.size();
    return stride_[end - 1];
}

std::uint64_t GroupSpec::add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        std::uint64_t m = radix_[j], s = stride_[j];
        std::uint64_t da = (a / s) % m, db = (b / s) % m;
        std::uint64_t d = da + db;
        if (d >= m) d -= m;
        out += d * s;
    }
    return out;
}

std::uint64_t GroupSpec::sub(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        std::uint64_t m = radix_[j], s = stride_[j];
        std::uint64_t da = (a / s) % m, db = (b / s) % m;
        out += (da >= db ? da - db : da + m - db) * s;
    }
    return out;
}

std::uint64_t GroupSpec::neg(std::uint64_t a) const { return sub(0, a); }

std::uint64_t GroupSpec::scalar_mul(std::int64_t r, std::uint64_t a) const {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        std::uint64_t m = radix_[j], s = stride_[j];
        std::uint64_t da = (a / s) % m;
        std::int64_t rm = r % static_cast<std::int64_t>(m);
        std::uint64_t rr = static_cast<std::uint64_t>(rm < 0 ? rm + static_cast<std::int64_t>(m) : rm);
        out += mul_mod(rr, da, m) * s;
    }
    return out;
}

std::uint64_t GroupSpec::unit_div(std::uint64_t a, int r) const {
    if (r < 1 || r > h_)
        throw SpecError("unit_div requires r in 1.." + std::to_string(h_) + ", got " +
                        std::to_string(r));
    const auto& inv = unit_inverse_[static_cast<std::size_t>(r - 1)];
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        std::uint64_t m = radix_[j], s = stride_[j];
        std::uint64_t da = (a / s) % m;
        out += mul_mod(inv[j], da, m) * s;
    }
    return out;
}

std::uint64_t GroupSpec::encode(const std::vector<std::uint64_t>& digits) const {
    if (digits.size() != radix_.size())
        throw SpecError("coordinate count " + std::to_string(digits.size()) +
                        " does not match the spec's " + std::to_string(radix_.size()) + " digits");
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        if (digits[j] >= radix_[j])
            throw SpecError("coordinate " + std::to_string(digits[j]) + " out of range for radix " +
                            std::to_string(radix_[j]));
        out += digits[j] * stride_[j];
    }
    return out;
}

std::vector<std::uint64_t> GroupSpec::decode(std::uint64_t index) const {
    if (index >= total_size_)
        throw SpecError("index " + std::to_string(index) + " out of range for group of size " +
                        std::to_string(total_size_));
    std::vector<std::uint64_t> digits(radix_.size());
    for (std::size_t j = 0; j < radix_.size(); ++j) digits[j] = (index / stride_[j]) % radix_[j];
    return digits;
}

Element GroupSpec::element(std::uint64_t index) const { return Element{decode(index), index}; }

Element GroupSpec::element_from_digits(const std::vector<std::uint64_t>& digits) const {
    return Element{digits, encode(digits)};
}

std::uint64_t GroupSpec::unit_inverse_digit(int r, std::size_t j) const {
    return unit_inverse_[static_cast<std::size_t>(r - 1)][j];
}

bool GroupSpec::same_group(const GroupSpec& other) const {
    return h_ == other.h_ && modules_ == other.modules_;
}

GroupSpecPtr make_group_spec(std::vector<ModuleSpec> modules, int h) {
    return std::make_shared<const GroupSpec>(std::move(modules), h);
}

namespace {

std::uint64_t checked_index(const Element& e, const GroupSpec& spec) {
    std::uint64_t index = spec.encode(e.digits);
    if (index != e.index)
        throw SpecError("element index " + std::to_string(e.index) +
                        " does not match its coordinates under this spec");
    return index;
}

}  // namespace

Element add(const Element& a, const Element& b, const GroupSpec& spec) {
    return spec.element(spec.add(checked_index(a, spec), checked_index(b, spec)));
}

Element sub(const Element& a, const Element& b, const GroupSpec& spec) {
    return spec.element(spec.sub(checked_index(a, spec), checked_index(b, spec)));
}

Element neg(const Element& a, const GroupSpec& spec) {
    return spec.element(spec.neg(checked_index(a, spec)));
}

Element scalar_mul(std::int64_t r, const Element& a, const GroupSpec& spec) {
    return spec.element(spec.scalar_mul(r, checked_index(a, spec)));
}

Element unit_div(const Element& a, int r, const GroupSpec& spec) {
    return spec.element(spec.unit_div(checked_index(a, spec), r));
}

CrtIsomorphism::CrtIsomorphism(GroupSpecPtr spec) : spec_(std::move(spec)) {
    const auto& modules = spec_->modules();
    for (const ModuleSpec& m : modules)
        if (m.kind != ModuleSpec::Kind::Cyclic)
            throw SpecError("CRT isomorphism requires cyclic modules only");
    for (std::size_t i = 0; i < modules.size(); ++i)
        for (std::size_t j = i + 1; j < modules.size(); ++j)
            if (std::gcd(modules[i].modulus, modules[j].modulus) != 1)
                throw SpecError("CRT isomorphism requires pairwise coprime moduli; gcd(" +
                                std::to_string(modules[i].modulus) + ", " +
                                std::to_string(modules[j].modulus) + ") > 1");
    m_star_ = spec_->total_size();
    basis_.reserve(modules.size());
    for (const ModuleSpec& m : modules) {
        std::uint64_t rest = m_star_ / m.modulus;
        std::uint64_t inv = m.modulus == 1 ? 0 : inverse_mod(rest % m.modulus, m.modulus);
        basis_.push_back(mul_mod(rest % m_star_, inv, m_star_));
    }
}

std::uint64_t CrtIsomorphism::forward(std::uint64_t index) const {
    auto digits = spec_->decode(index);
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        out = (out + mul_mod(digits[i] % m_star_, basis_[i] % m_star_, m_star_)) % m_star_;
    }
    return out;
}

std::uint64_t CrtIsomorphism::inverse(std::uint64_t residue) const {
    if (residue >= m_star_)
        throw SpecError("residue " + std::to_string(residue) + " out of range mod " +
                        std::to_string(m_star_));
    std::vector<std::uint64_t> digits;
    digits.reserve(spec_->digit_count());
    for (const ModuleSpec& m : spec_->modules()) digits.push_back(residue % m.modulus);
    return spec_->encode(digits);
}

}  // namespace mdms
