#include "immunotrack/affinity.hpp"

#include "immunotrack/error.hpp"

#include <cmath>
#include <string>

namespace immunotrack {

double distance(std::span<const double> a, std::span<const double> b, double scale) {
    if (a.size() != b.size() || a.empty()) {
        throw Error("affinity", "LengthMismatch",
                    "vectors of length " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error("affinity", "BadScale", "scale must be finite and > 0");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(a.size())) / scale;
}

double suffix_affinity(std::span<const double> movements,
                       std::span<const double> window, double scale) {
    if (movements.size() > window.size()) {
        throw Error("affinity", "LengthMismatch",
                    "tracker of length " + std::to_string(movements.size()) +
                        " exceeds antigen window " + std::to_string(window.size()));
    }
    return std::exp(-distance(movements, window.last(movements.size()), scale));
}

double bind_affinity(const Tracker& tracker, const Antigen& antigen, double scale) {
    return suffix_affinity(tracker.movements, antigen.movements, scale);
}

}  // namespace immunotrack
