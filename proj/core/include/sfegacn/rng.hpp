#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sfegacn {

/// Derives an independent stream seed from a master seed and a purpose tag.
/// Everything random in the pipeline draws from a stream obtained this way,
/// so one --seed flag pins a whole run. The derivation is
/// splitmix64(seed ^ fnv1a64(tag)) and is part of the tool's reproducibility
/// contract: manifests record only the master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// Deterministic random stream. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); all value transforms are implemented
/// here rather than with std:: distributions so that generated numbers are
/// identical across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random bits.
    double u01();

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller; pairs are cached.
    double normal();

    /// Uniform index in [0, n), unbiased. n must be positive.
    std::size_t uniform_index(std::size_t n);

    /// k distinct indices drawn from [0, n), returned in ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sfegacn
