#ifndef MMF_RNG_HPP
#define MMF_RNG_HPP

#include <cstdint>
#include <string_view>

namespace mmf {

// splitmix64 step; the generator underneath every random draw in the
// simulator. Chosen for trivially portable bit-exact output.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic substream derivation. Children depend only on (seed, tag),
// so one engine's draw count never shifts another engine's stream.
uint64_t derive_stream(uint64_t seed, std::string_view tag);
uint64_t derive_stream(uint64_t seed, uint64_t index);

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64_next(state_); }

    // [0, 1) with 53 bits of mantissa
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // [0, n), n > 0
    uint64_t uniform_index(uint64_t n) {
        // modulo bias is < 2^-50 for the n used here (tiny scene/template counts)
        return next_u64() % n;
    }

    Rng substream(std::string_view tag) const { return Rng(derive_stream(state_, tag)); }
    Rng substream(uint64_t index) const { return Rng(derive_stream(state_, index)); }

private:
    uint64_t state_;
};

} // namespace mmf

#endif
