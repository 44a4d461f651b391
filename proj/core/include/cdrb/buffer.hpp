#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "cdrb/kdtree.hpp"
#include "cdrb/rng.hpp"

namespace cdrb {

/// One demonstrated entry in normalized coordinates. `action` is empty in
/// state-only buffers.
struct BufferPoint {
    std::vector<double> state;
    std::vector<double> action;
};

enum class IndexKind { kdtree, brute };

/// Immutable point set of demonstrated states (optionally state-action
/// pairs) with exact spatial queries. Queries dispatch on the query vector's
/// size: state_dim() searches in state space, entry_dim() in concatenated
/// state-action space (unit weights on both parts).
///
/// All distances are Euclidean in normalized coordinates. Nearest ties break
/// to the lowest point index; ball membership uses closed balls.
class ReplayBuffer {
public:
    ReplayBuffer() = default;

    /// `states[i]` pairs with `actions[i]` when actions are given. d_max
    /// defaults to half the bounding-box diagonal of the stored entries;
    /// pass d_max_override > 0 to set it explicitly. Duplicates retained.
    static ReplayBuffer build(const std::vector<std::vector<double>>& states,
                              const std::vector<std::vector<double>>& actions = {},
                              IndexKind index = IndexKind::kdtree,
                              double d_max_override = 0.0);

    std::size_t size() const { return count_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_dim() const { return action_dim_; }
    std::size_t entry_dim() const { return state_dim_ + action_dim_; }
    bool has_actions() const { return action_dim_ > 0; }
    double d_max() const { return d_max_; }
    IndexKind index_kind() const { return kind_; }

    std::span<const double> state(std::size_t i) const {
        return {states_.data() + i * state_dim_, state_dim_};
    }
    /// The full stored row: state, or state followed by action.
    std::span<const double> entry(std::size_t i) const {
        const std::vector<double>& src = has_actions() ? entries_ : states_;
        return {src.data() + i * entry_dim(), entry_dim()};
    }
    BufferPoint point(std::size_t i) const;

    struct NearestResult {
        std::size_t index = KdTree::npos;
        double dist2 = 0.0;
    };
    NearestResult nearest(std::span<const double> q) const;

    /// Ascending indices of points with distance <= radius from q.
    std::vector<std::size_t> radius_indices(std::span<const double> q, double radius) const;
    std::size_t count_within(std::span<const double> q, double radius) const;

    /// Uniform draw over the closed eps-ball around q; falls back to the
    /// nearest point when the ball contains nothing. Always a buffer member.
    std::size_t ball_sample_index(std::span<const double> q, double eps, Rng& rng) const;
    BufferPoint ball_sample(std::span<const double> q, double eps, Rng& rng) const {
        return point(ball_sample_index(q, eps, rng));
    }

    /// Lloyd's algorithm (k-means++ seeding) in entry space, centroids
    /// snapped to their nearest original point, deduplicated, kept in
    /// original index order. Keeps this buffer's d_max and index kind.
    ReplayBuffer kmeans_compress(std::size_t k, int iters, Rng& rng) const;

    void save(const std::filesystem::path& path) const;
    static ReplayBuffer load(const std::filesystem::path& path,
                             IndexKind index = IndexKind::kdtree);

private:
    // Linear-scan twins of the tree queries; reference backend for tests.
    NearestResult brute_nearest(std::span<const double> q) const;
    std::vector<std::size_t> brute_radius(std::span<const double> q, double radius) const;

    std::span<const double> space_row(bool full, std::size_t i) const {
        const std::vector<double>& src = (full && has_actions()) ? entries_ : states_;
        const std::size_t d = full ? entry_dim() : state_dim_;
        return {src.data() + i * d, d};
    }
    bool pick_space(std::size_t qsize) const;  // true = entry space

    std::size_t count_ = 0;
    std::size_t state_dim_ = 0;
    std::size_t action_dim_ = 0;
    double d_max_ = 0.0;
    IndexKind kind_ = IndexKind::kdtree;
    std::vector<double> states_;   // count x state_dim
    std::vector<double> actions_;  // count x action_dim
    std::vector<double> entries_;  // count x entry_dim, only when has_actions()
    KdTree state_tree_;
    KdTree entry_tree_;  // only when has_actions()
};

}  // namespace cdrb
