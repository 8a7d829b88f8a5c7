#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cgnn {

/// Seeded generator with portable draw mappings. std::mt19937_64 output is
/// pinned by the standard, but the std distributions are not, so uniform
/// draws are mapped by hand to keep runs byte-reproducible across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-bound, bound).
    double uniform_symmetric(double bound) { return (uniform() * 2.0 - 1.0) * bound; }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<uint64_t>(n)); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = engine_() % i;
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a, used wherever a stable content hash is needed (OOV embedding
/// seeds, manifest input digests).
inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace cgnn
