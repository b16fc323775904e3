#include "mdms/setops.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "mdms/errors.hpp"

namespace mdms {

namespace {

void require_same_spec(const GroupSet& a, const GroupSet& b, const char* op) {
    if (a.spec() != b.spec() && !a.spec()->same_group(*b.spec()))
        throw SpecError(std::string(op) + ": operands live in different groups");
}

void require_nonempty(const GroupSet& a, const char* op) {
    if (a.empty()) throw SpecError(std::string(op) + ": input set is empty");
}

}  // namespace

GroupSet::GroupSet(GroupSpecPtr spec) : spec_(std::move(spec)) {
    if (!spec_) throw SpecError("null group spec");
    if (spec_->total_size() > kGroupSizeCap)
        throw CapError("group size " + std::to_string(spec_->total_size()) +
                       " exceeds the enumeration cap 2^26 = " + std::to_string(kGroupSizeCap));
    bits_ = Bitset(spec_->total_size());
}

GroupSet GroupSet::full_set(GroupSpecPtr spec) {
    GroupSet s(std::move(spec));
    s.bits_.set_all();
    return s;
}

std::vector<std::uint64_t> GroupSet::elements() const {
    std::vector<std::uint64_t> out;
    out.reserve(cardinality());
    bits_.for_each_set([&](std::uint64_t i) { out.push_back(i); });
    return out;
}

bool GroupSet::operator==(const GroupSet& other) const {
    return spec_->same_group(*other.spec_) && bits_ == other.bits_;
}

GroupTranslator::GroupTranslator(GroupSpecPtr spec)
    : spec_(std::move(spec)),
      mask_(spec_->total_size()),
      tmp_(spec_->total_size()),
      cur_(spec_->total_size()) {}

void GroupTranslator::rotate_digit(Bitset& bits, std::size_t digit, std::uint64_t r) {
    const std::uint64_t m = spec_->digit_radix(digit);
    const std::uint64_t s = spec_->digit_stride(digit);
    const std::uint64_t period = m * s;
    const std::uint64_t keep = (m - r) * s;  // width of the part that shifts up

    mask_.clear();
    for (std::uint64_t start = 0; start < bits.size(); start += period)
        mask_.set_range(start, start + keep);

    tmp_ = bits;
    tmp_ &= mask_;
    Bitset::shl_into(tmp_, r * s, cur_);
    bits.and_not(mask_);
    Bitset::shr_into(bits, keep, tmp_);
    cur_ |= tmp_;
    std::swap(bits.words(), cur_.words());
}

void GroupTranslator::translate(const Bitset& in, std::uint64_t a, Bitset& out) {
    out = in;
    if (a == 0) return;
    for (std::size_t j = 0; j < spec_->digit_count(); ++j) {
        std::uint64_t r = (a / spec_->digit_stride(j)) % spec_->digit_radix(j);
        if (r != 0) rotate_digit(out, j, r);
    }
}

GroupSet sumset(const GroupSet& A, const GroupSet& B) {
    require_same_spec(A, B, "sumset");
    require_nonempty(A, "sumset");
    require_nonempty(B, "sumset");
    const GroupSet& small = A.cardinality() <= B.cardinality() ? A : B;
    const GroupSet& large = A.cardinality() <= B.cardinality() ? B : A;

    GroupSet result(A.spec());
    GroupTranslator translator(A.spec());
    Bitset scratch(A.spec()->total_size());
    small.bits().for_each_set([&](std::uint64_t a) {
        translator.translate(large.bits(), a, scratch);
        result.bits() |= scratch;
    });
    return result;
}

GroupSet h_fold_sumset(const GroupSet& A, int h) {
    require_nonempty(A, "h_fold_sumset");
    if (h < 1) throw SpecError("h_fold_sumset: h must be at least 1");
    GroupSet result = A;
    for (int k = 2; k <= h && !result.is_full(); ++k) result = sumset(result, A);
    return result;
}

GroupSet negated_set(const GroupSet& A) { return scaled_set(A, -1); }

GroupSet scaled_set(const GroupSet& A, std::int64_t r) {
    GroupSet result(A.spec());
    const GroupSpec& spec = *A.spec();
    A.bits().for_each_set([&](std::uint64_t a) { result.insert(spec.scalar_mul(r, a)); });
    return result;
}

GroupSet difference_set(const GroupSet& A) {
    require_nonempty(A, "difference_set");
    GroupSet result(A.spec());
    GroupTranslator translator(A.spec());
    Bitset scratch(A.spec()->total_size());
    const GroupSpec& spec = *A.spec();

    std::uint64_t steps = 0;
    for (std::uint64_t a = A.bits().next_set_bit(0); a != Bitset::npos;
         a = A.bits().next_set_bit(a + 1)) {
        translator.translate(A.bits(), spec.neg(a), scratch);
        result.bits() |= scratch;
        // Subtractive bases cover quickly; probe occasionally.
        if ((++steps & 31) == 0 && result.is_full()) break;
    }

    if (!result.contains(0) || !(negated_set(result) == result))
        throw Error("difference_set postcondition violated (not symmetric around 0)");
    return result;
}

GroupSet linear_form_image(const LinearForm& F, const GroupSet& A) {
    if (F.coefficients.empty()) throw SpecError("linear form needs at least one coefficient");
    require_nonempty(A, "linear_form_image");
    GroupSet result = scaled_set(A, F.coefficients[0]);
    for (std::size_t i = 1; i < F.coefficients.size(); ++i)
        result = sumset(result, scaled_set(A, F.coefficients[i]));
    return result;
}

bool is_subtractive_basis(const GroupSet& A) { return difference_set(A).is_full(); }

Rational density(const GroupSet& A) {
    return Rational(BigInt(A.cardinality()), BigInt(A.group_size()));
}

IntSet make_int_set(std::vector<std::int64_t> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) throw SpecError("integer set is empty");
    return values;
}

IntSet int_sumset(const IntSet& A) {
    if (A.empty()) throw SpecError("int_sumset: input set is empty");
    std::vector<std::int64_t> sums;
    sums.reserve(A.size() * (A.size() + 1) / 2);
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i; j < A.size(); ++j) sums.push_back(A[i] + A[j]);
    return make_int_set(std::move(sums));
}

IntSet int_difference(const IntSet& A) {
    if (A.empty()) throw SpecError("int_difference: input set is empty");
    std::vector<std::int64_t> diffs;
    diffs.reserve(A.size() * A.size());
    for (std::int64_t a : A)
        for (std::int64_t b : A) diffs.push_back(a - b);
    return make_int_set(std::move(diffs));
}

MstdClass mstd_classify(const IntSet& A) {
    std::size_t sums = int_sumset(A).size();
    std::size_t diffs = int_difference(A).size();
    if (sums > diffs) return MstdClass::Mstd;
    if (sums < diffs) return MstdClass::Mdts;
    return MstdClass::Balanced;
}

const char* to_string(MstdClass c) {
    switch (c) {
        case MstdClass::Mstd: return "MSTD";
        case MstdClass::Balanced: return "balanced";
        case MstdClass::Mdts: return "MDTS";
    }
    return "?";
}

}  // namespace mdms
