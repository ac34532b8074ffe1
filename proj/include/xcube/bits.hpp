#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xcube {

/// Fixed-length bit vector packed into 64-bit words. Used for the x/z rows
/// of Pauli strings and for GF(2) matrix rows, so XOR and popcount run
/// word-at-a-time.
class BitRow {
  public:
    BitRow() = default;
    explicit BitRow(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        assert(i < n_);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::size_t i, bool v) {
        assert(i < n_);
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(std::size_t i) {
        assert(i < n_);
        words_[i >> 6] ^= uint64_t(1) << (i & 63);
    }
    void clear() {
        for (auto &w : words_) {
            w = 0;
        }
    }

    BitRow &operator^=(const BitRow &o) {
        assert(n_ == o.n_);
        for (std::size_t k = 0; k < words_.size(); k++) {
            words_[k] ^= o.words_[k];
        }
        return *this;
    }

    bool operator==(const BitRow &o) const = default;

    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t w : words_) {
            c += std::popcount(w);
        }
        return c;
    }

    bool any() const {
        for (uint64_t w : words_) {
            if (w) {
                return true;
            }
        }
        return false;
    }

    /// popcount(a & b) & 1 — the workhorse of symplectic products.
    bool parity_and(const BitRow &o) const {
        assert(n_ == o.n_);
        uint64_t acc = 0;
        for (std::size_t k = 0; k < words_.size(); k++) {
            acc ^= words_[k] & o.words_[k];
        }
        return std::popcount(acc) & 1;
    }

    std::span<const uint64_t> words() const { return words_; }
    std::span<uint64_t> words() { return words_; }

    template <typename F> void for_each_set(F &&f) const {
        for (std::size_t k = 0; k < words_.size(); k++) {
            uint64_t w = words_[k];
            while (w) {
                f(k * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    std::vector<uint32_t> set_bits() const {
        std::vector<uint32_t> out;
        for_each_set([&](std::size_t i) { out.push_back(uint32_t(i)); });
        return out;
    }

  private:
    std::size_t n_ = 0;
    std::vector<uint64_t> words_;
};

} // namespace xcube
