#ifndef SEMGUIDE_RNG_HPP
#define SEMGUIDE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace semguide {

// 64-bit FNV-1a. Used for named-stream seed derivation and content hashes.
inline uint64_t fnv1a64(const void* bytes, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(std::string_view s) {
    return fnv1a64(s.data(), s.size());
}

std::string hash_hex(uint64_t h);

// Derives an independent stream seed from a base seed and a stream name.
// Adding a new named stream never perturbs the draws of existing ones.
inline uint64_t derive_seed(uint64_t base, std::string_view stream) {
    uint64_t h = fnv1a64(stream);
    h = fnv1a64(&base, sizeof(base), h);
    // splitmix64 finalizer to spread low-entropy bases
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

// Deterministic standard-normal stream: mt19937_64 + explicit Box-Muller.
// std::normal_distribution is implementation-defined, so it is not used here;
// this sequence is identical on every platform.
class GaussianStream {
public:
    explicit GaussianStream(uint64_t seed) : engine_(seed) {}

    float next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = static_cast<float>(r * std::sin(theta));
        have_spare_ = true;
        return static_cast<float>(r * std::cos(theta));
    }

    void fill(float* dst, size_t n, float scale = 1.0f) {
        for (size_t i = 0; i < n; ++i) dst[i] = next() * scale;
    }

private:
    // uniform in (0,1]; never 0 so log() stays finite
    double uniform_open() {
        uint64_t v = engine_();
        return (static_cast<double>(v >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    }

    std::mt19937_64 engine_;
    float spare_ = 0.0f;
    bool have_spare_ = false;
};

} // namespace semguide

#endif
