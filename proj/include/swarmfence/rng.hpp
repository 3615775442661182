#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace swarmfence {

// splitmix64 finalizer (Steele/Lea/Flood). Used both as the stream generator
// and as the mixing function that derives sub-stream seeds, so the whole
// randomness lineage is a handful of shifts and multiplies that behave
// identically on every platform.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a list of index words
// (repetition index, robot index, channel tag, ...). Adding new words never
// changes the seed derived from a shorter prefix, so adding robots to a run
// does not perturb existing robots' streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
    std::uint64_t s = base;
    (void)splitmix64_next(s);
    for (std::uint64_t w : words) {
        s ^= w + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        (void)splitmix64_next(s);
    }
    return s;
}

// Deterministic pseudorandom stream. Backed by splitmix64; uniform doubles
// take the top 53 bits, normals come from the basic Box-Muller transform
// with the spare variate cached. Same seed gives the same sequence of
// uniform() / normal() calls everywhere.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; consumes two uniforms per pair of draws
    double standard_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // N(mean, std); std == 0 returns mean exactly and consumes no draws
    double normal(double mean, double std_dev) {
        if (std_dev == 0.0) return mean;
        return mean + std_dev * standard_normal();
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace swarmfence
