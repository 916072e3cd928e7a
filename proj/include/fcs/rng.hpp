#pragma once

// Counter-mode randomness: every draw is a pure function of
// (seed, stream, index), so chunked or out-of-order evaluation reproduces a
// sequential run exactly. The mixer is the SplitMix64 finalizer.

#include <cstdint>
#include <vector>

namespace fcs {

struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t word(std::uint64_t stream, std::uint64_t index) const {
        return mix(mix(mix(seed) ^ stream) ^ index);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform(std::uint64_t stream, std::uint64_t index) const {
        return static_cast<double>(word(stream, index) >> 11) * 0x1.0p-53;
    }

    int bit(std::uint64_t stream, std::uint64_t index) const {
        return static_cast<int>(word(stream, index) & 1u);
    }
};

// Append-only packed bit array.
class PackedBits {
public:
    void push_back(int bit) {
        std::size_t word_idx = size_ / 64;
        if (word_idx == words_.size()) words_.push_back(0);
        if (bit) words_[word_idx] |= (1ULL << (size_ % 64));
        ++size_;
    }

    int operator[](std::size_t i) const {
        return static_cast<int>((words_[i / 64] >> (i % 64)) & 1u);
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    void append(const PackedBits& other) {
        for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
    }

    friend bool operator==(const PackedBits& a, const PackedBits& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

} // namespace fcs
