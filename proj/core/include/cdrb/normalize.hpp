#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdrb/errors.hpp"

namespace cdrb {

/// Per-dimension affine map between data units and [-1, 1].
struct Normalizer {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }

    double to_unit(double v, std::size_t i) const {
        return 2.0 * (v - lo[i]) / (hi[i] - lo[i]) - 1.0;
    }
    double from_unit(double u, std::size_t i) const {
        return lo[i] + (u + 1.0) * 0.5 * (hi[i] - lo[i]);
    }

    void apply(std::span<const double> in, std::span<double> out) const {
        if (in.size() != dim() || out.size() != dim())
            throw ConfigError("Normalizer: dimension mismatch");
        for (std::size_t i = 0; i < dim(); ++i) out[i] = to_unit(in[i], i);
    }
    void invert(std::span<const double> in, std::span<double> out) const {
        if (in.size() != dim() || out.size() != dim())
            throw ConfigError("Normalizer: dimension mismatch");
        for (std::size_t i = 0; i < dim(); ++i) out[i] = from_unit(in[i], i);
    }

    /// Bounds from the per-dimension min/max of `rows`; degenerate dimensions
    /// are widened so lo < hi always holds.
    static Normalizer fit(const std::vector<std::vector<double>>& rows);
};

}  // namespace cdrb
