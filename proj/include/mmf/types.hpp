#ifndef MMF_TYPES_HPP
#define MMF_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmf {

// All simulated time is in milliseconds on a virtual clock.
using Millis = double;
using Seed = uint64_t;

enum class Tier { H, L };

// H outranks L; escalation only ever moves L -> H.
inline int tier_rank(Tier t) { return t == Tier::H ? 1 : 0; }
inline char tier_char(Tier t) { return t == Tier::H ? 'H' : 'L'; }
std::optional<Tier> tier_from(std::string_view s);

enum class Multiplicity { singular, plural };
inline char multiplicity_char(Multiplicity m) { return m == Multiplicity::singular ? 's' : 'p'; }

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double clamp01(double v);
double dist2(const Point& a, const Point& b);

enum class Errc {
    invalid_arg,
    parse,
    validation,
    io,
    state,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace mmf

#endif
