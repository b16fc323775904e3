#pragma once

#include <cstdint>
#include <vector>

namespace mdms {

/// Dynamic bitset over 64-bit words. Bits above size() are kept zero.
class Bitset {
public:
    static constexpr std::uint64_t npos = ~std::uint64_t{0};

    Bitset() = default;
    explicit Bitset(std::uint64_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::uint64_t size() const { return nbits_; }

    bool test(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::uint64_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    void clear();
    void set_all();
    /// Sets bits in [from, to).
    void set_range(std::uint64_t from, std::uint64_t to);

    std::uint64_t count() const;
    bool any() const;
    bool none() const { return !any(); }
    bool full() const { return count() == nbits_; }

    Bitset& operator|=(const Bitset& other);
    Bitset& operator&=(const Bitset& other);
    Bitset& operator^=(const Bitset& other);
    Bitset& and_not(const Bitset& other);  // this &= ~other

    bool operator==(const Bitset& other) const = default;

    bool is_subset_of(const Bitset& other) const;

    /// First set bit at position >= from, or npos.
    std::uint64_t next_set_bit(std::uint64_t from) const;

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::uint64_t i = next_set_bit(0); i != npos; i = next_set_bit(i + 1)) fn(i);
    }

    /// dst = src << k (bits shifted past size() are dropped). dst must have
    /// the same size as src; aliasing dst == &src is not allowed.
    static void shl_into(const Bitset& src, std::uint64_t k, Bitset& dst);
    static void shr_into(const Bitset& src, std::uint64_t k, Bitset& dst);

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

private:
    std::uint64_t nbits_ = 0;
    std::vector<std::uint64_t> words_;

    void trim();
};

}  // namespace mdms
