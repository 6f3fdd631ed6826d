#include "mmf/types.hpp"

#include <algorithm>

namespace mmf {

std::optional<Tier> tier_from(std::string_view s) {
    if (s == "H" || s == "h") return Tier::H;
    if (s == "L" || s == "l") return Tier::L;
    return std::nullopt;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double dist2(const Point& a, const Point& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace mmf
