#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace qintcart {

// Counted splitmix64 stream. All randomness in the project flows from a single
// seed through derive() so that reports are reproducible byte for byte.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), platform-independent.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Complex sample from the annulus 0.5 <= |v| <= 2 (keeps magnitudes away
    // from underflow so zero verdicts are trustworthy).
    std::complex<double> annulus() {
        double r = uniform(0.5, 2.0);
        double th = uniform(0.0, 6.283185307179586476925287);
        return {r * std::cos(th), r * std::sin(th)};
    }

    // Positive real from [0.5, 2]; used for hbar.
    double positive_real() { return uniform(0.5, 2.0); }

    // Child seed for an independent subtask.
    uint64_t derive(uint64_t salt) {
        uint64_t z = state_ ^ (salt + 0x9E3779B97F4A7C15ull + (state_ << 6) + (state_ >> 2));
        Rng child(z);
        return child.next();
    }

    static uint64_t hash_string(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull) {
        uint64_t h = seed;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

private:
    uint64_t state_;
};

inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t index = 0) {
    Rng r(seed ^ Rng::hash_string(tag) ^ (index * 0xA24BAED4963EE407ull));
    return r.next();
}

} // namespace qintcart
