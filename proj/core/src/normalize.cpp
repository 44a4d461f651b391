#include "cdrb/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace cdrb {

Normalizer Normalizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ConfigError("Normalizer::fit: no rows");
    const std::size_t d = rows.front().size();
    if (d == 0) throw ConfigError("Normalizer::fit: zero-dimensional rows");

    Normalizer n;
    n.lo.assign(d, std::numeric_limits<double>::infinity());
    n.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& row : rows) {
        if (row.size() != d) throw ConfigError("Normalizer::fit: ragged rows");
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(row[i])) throw ConfigError("Normalizer::fit: non-finite value");
            n.lo[i] = std::min(n.lo[i], row[i]);
            n.hi[i] = std::max(n.hi[i], row[i]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        if (n.hi[i] - n.lo[i] < 1e-9) {  // constant dimension, widen around it
            n.lo[i] -= 0.5;
            n.hi[i] += 0.5;
        }
    }
    return n;
}

}  // namespace cdrb
