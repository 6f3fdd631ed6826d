#include "mmf/rng.hpp"

namespace mmf {

namespace {

// FNV-1a, then a splitmix finalize so short tags spread over the word.
uint64_t hash_tag(std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t state = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    // two steps so near-identical inputs decorrelate
    splitmix64_next(state);
    return splitmix64_next(state);
}

} // namespace

uint64_t derive_stream(uint64_t seed, std::string_view tag) {
    return mix(seed, hash_tag(tag));
}

uint64_t derive_stream(uint64_t seed, uint64_t index) {
    return mix(seed, index * 0xd1342543de82ef95ull + 1);
}

} // namespace mmf
