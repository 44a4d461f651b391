#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdrb/rng.hpp"

namespace cdrb {

/// Static exact k-d tree over n points in R^dim.
///
/// Construction is a deterministic function of the input array: splits use a
/// (coordinate, original index) total order and leaf ranges are sorted by
/// original index, so query and sampling behaviour is identical across
/// platforms and standard libraries.
///
/// All balls are closed (distance <= radius counts as inside).
class KdTree {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    KdTree() = default;

    /// `points` is row-major, n*dim values. Throws ConfigError on empty
    /// input, dim == 0, or a size that is not a multiple of dim.
    KdTree(std::vector<double> points, std::size_t dim, int leaf_size = 16);

    std::size_t size() const { return orig_.size(); }
    std::size_t dim() const { return dim_; }
    bool empty() const { return orig_.empty(); }

    struct NearestResult {
        std::size_t index = npos;  // original index
        double dist2 = 0.0;
    };

    /// Closest point; ties on distance resolve to the lowest original index.
    NearestResult nearest(std::span<const double> q) const;

    /// Original indices of all points within the ball, ascending.
    std::vector<std::size_t> radius_indices(std::span<const double> q, double radius) const;

    std::size_t count_within(std::span<const double> q, double radius) const;

    /// Exactly uniform draw over the points inside the ball, using a single
    /// rng draw. Subtrees fully inside the ball contribute as whole ranges,
    /// so large balls cost O(log n), not O(members). Returns npos when the
    /// ball is empty.
    std::size_t sample_within(std::span<const double> q, double radius, Rng& rng) const;

private:
    struct Node {
        std::uint32_t lo = 0, hi = 0;  // tree-order point range [lo, hi)
        std::int32_t left = -1, right = -1;  // children; leaf iff left < 0
    };

    int build(const std::vector<double>& input, std::vector<std::size_t>& idx,
              std::size_t lo, std::size_t hi, int leaf_size);
    double min_dist2(int node, std::span<const double> q) const;
    double max_dist2(int node, std::span<const double> q) const;
    double point_dist2(std::size_t tree_pos, std::span<const double> q) const;

    std::size_t dim_ = 0;
    std::vector<Node> nodes_;            // nodes_[0] is the root
    std::vector<double> box_min_, box_max_;  // per node, dim_ values each
    std::vector<double> pts_;            // tree order, n*dim_
    std::vector<std::size_t> orig_;      // tree position -> original index
};

}  // namespace cdrb
