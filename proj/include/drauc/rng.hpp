#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace drauc {

/// Seeded random generator used for every data split in this project.
///
/// The engine is std::mt19937_64, whose output sequence is fully specified
/// by the C++ standard and therefore identical on every platform. The
/// standard *distributions* are implementation-defined, so bounded draws
/// and shuffles are implemented here directly:
///   - below(n): rejection sampling on the top of the 64-bit range, then
///     modulo; unbiased and portable.
///   - shuffle: Fisher-Yates driven by below().
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform draw from {0, 1, ..., n-1}. n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Reject draws from the final partial block so each residue is
        // equally likely.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
        std::uint64_t v = engine_();
        while (v > limit) v = engine_();
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        if (values.size() < 2) return;
        for (std::size_t i = values.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(values[i], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace drauc
