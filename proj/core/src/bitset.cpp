#include "mdms/bitset.hpp"

#include <algorithm>
#include <bit>

namespace mdms {

void Bitset::trim() {
    if (nbits_ & 63) words_.back() &= (std::uint64_t{1} << (nbits_ & 63)) - 1;
}

void Bitset::clear() { std::fill(words_.begin(), words_.end(), 0); }

void Bitset::set_all() {
    std::fill(words_.begin(), words_.end(), ~std::uint64_t{0});
    trim();
}

void Bitset::set_range(std::uint64_t from, std::uint64_t to) {
    if (from >= to) return;
    std::uint64_t first_word = from >> 6, last_word = (to - 1) >> 6;
    std::uint64_t head = ~std::uint64_t{0} << (from & 63);
    std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((to - 1) & 63));
    if (first_word == last_word) {
        words_[first_word] |= head & tail;
        return;
    }
    words_[first_word] |= head;
    for (std::uint64_t w = first_word + 1; w < last_word; ++w) words_[w] = ~std::uint64_t{0};
    words_[last_word] |= tail;
}

std::uint64_t Bitset::count() const {
    std::uint64_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

bool Bitset::any() const {
    for (std::uint64_t w : words_)
        if (w) return true;
    return false;
}

Bitset& Bitset::operator|=(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

Bitset& Bitset::operator&=(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
}

Bitset& Bitset::operator^=(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

Bitset& Bitset::and_not(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
}

bool Bitset::is_subset_of(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~other.words_[i]) return false;
    return true;
}

std::uint64_t Bitset::next_set_bit(std::uint64_t from) const {
    if (from >= nbits_) return npos;
    std::uint64_t w = from >> 6;
    std::uint64_t chunk = words_[w] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (chunk) return (w << 6) + static_cast<std::uint64_t>(std::countr_zero(chunk));
        if (++w == words_.size()) return npos;
        chunk = words_[w];
    }
}

void Bitset::shl_into(const Bitset& src, std::uint64_t k, Bitset& dst) {
    const std::uint64_t word_shift = k >> 6, bit_shift = k & 63;
    const std::size_t n = src.words_.size();
    if (word_shift >= n) {
        dst.clear();
        return;
    }
    if (bit_shift == 0) {
        for (std::size_t i = n; i-- > word_shift;) dst.words_[i] = src.words_[i - word_shift];
    } else {
        for (std::size_t i = n; i-- > word_shift;) {
            std::uint64_t v = src.words_[i - word_shift] << bit_shift;
            if (i > word_shift) v |= src.words_[i - word_shift - 1] >> (64 - bit_shift);
            dst.words_[i] = v;
        }
    }
    std::fill(dst.words_.begin(), dst.words_.begin() + static_cast<std::ptrdiff_t>(word_shift), 0);
    dst.trim();
}

void Bitset::shr_into(const Bitset& src, std::uint64_t k, Bitset& dst) {
    const std::uint64_t word_shift = k >> 6, bit_shift = k & 63;
    const std::size_t n = src.words_.size();
    if (word_shift >= n) {
        dst.clear();
        return;
    }
    if (bit_shift == 0) {
        for (std::size_t i = 0; i + word_shift < n; ++i) dst.words_[i] = src.words_[i + word_shift];
    } else {
        for (std::size_t i = 0; i + word_shift < n; ++i) {
            std::uint64_t v = src.words_[i + word_shift] >> bit_shift;
            if (i + word_shift + 1 < n) v |= src.words_[i + word_shift + 1] << (64 - bit_shift);
            dst.words_[i] = v;
        }
    }
    std::fill(dst.words_.end() - static_cast<std::ptrdiff_t>(word_shift), dst.words_.end(), 0);
}

}  // namespace mdms
