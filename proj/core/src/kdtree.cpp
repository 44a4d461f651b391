#include "cdrb/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdrb/errors.hpp"

namespace cdrb {

KdTree::KdTree(std::vector<double> points, std::size_t dim, int leaf_size) {
    if (dim == 0) throw ConfigError("KdTree: dim must be positive");
    if (points.empty()) throw ConfigError("KdTree: no points");
    if (points.size() % dim != 0) throw ConfigError("KdTree: size not a multiple of dim");
    if (leaf_size < 1) throw ConfigError("KdTree: leaf_size must be positive");

    dim_ = dim;
    const std::size_t n = points.size() / dim;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;

    nodes_.reserve(2 * n / leaf_size + 2);
    build(points, idx, 0, n, leaf_size);

    orig_ = std::move(idx);
    pts_.resize(n * dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dim; ++k) pts_[i * dim + k] = points[orig_[i] * dim + k];
}

int KdTree::build(const std::vector<double>& input, std::vector<std::size_t>& idx,
                  std::size_t lo, std::size_t hi, int leaf_size) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi), -1, -1});
    box_min_.resize(box_min_.size() + dim_, std::numeric_limits<double>::infinity());
    box_max_.resize(box_max_.size() + dim_, -std::numeric_limits<double>::infinity());

    double* bmin = &box_min_[static_cast<std::size_t>(id) * dim_];
    double* bmax = &box_max_[static_cast<std::size_t>(id) * dim_];
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t k = 0; k < dim_; ++k) {
            const double v = input[idx[i] * dim_ + k];
            bmin[k] = std::min(bmin[k], v);
            bmax[k] = std::max(bmax[k], v);
        }

    std::size_t axis = 0;
    double extent = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        const double e = bmax[k] - bmin[k];
        if (e > extent) {
            extent = e;
            axis = k;
        }
    }

    if (hi - lo <= static_cast<std::size_t>(leaf_size) || extent == 0.0) {
        std::sort(idx.begin() + lo, idx.begin() + hi);  // canonical leaf order
        return id;
    }

    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                     [&](std::size_t a, std::size_t b) {
                         const double va = input[a * dim_ + axis];
                         const double vb = input[b * dim_ + axis];
                         if (va != vb) return va < vb;
                         return a < b;  // total order: deterministic partition
                     });

    const int left = build(input, idx, lo, mid, leaf_size);
    const int right = build(input, idx, mid, hi, leaf_size);
    nodes_[id].left = left;     // nodes_ may have reallocated; assign after
    nodes_[id].right = right;
    return id;
}

double KdTree::min_dist2(int node, std::span<const double> q) const {
    const double* bmin = &box_min_[static_cast<std::size_t>(node) * dim_];
    const double* bmax = &box_max_[static_cast<std::size_t>(node) * dim_];
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        double d = 0.0;
        if (q[k] < bmin[k]) d = bmin[k] - q[k];
        else if (q[k] > bmax[k]) d = q[k] - bmax[k];
        d2 += d * d;
    }
    return d2;
}

double KdTree::max_dist2(int node, std::span<const double> q) const {
    const double* bmin = &box_min_[static_cast<std::size_t>(node) * dim_];
    const double* bmax = &box_max_[static_cast<std::size_t>(node) * dim_];
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        const double d = std::max(std::abs(q[k] - bmin[k]), std::abs(q[k] - bmax[k]));
        d2 += d * d;
    }
    return d2;
}

double KdTree::point_dist2(std::size_t tree_pos, std::span<const double> q) const {
    const double* p = &pts_[tree_pos * dim_];
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        const double d = p[k] - q[k];
        d2 += d * d;
    }
    return d2;
}

KdTree::NearestResult KdTree::nearest(std::span<const double> q) const {
    if (empty()) throw ConfigError("KdTree::nearest: empty tree");
    if (q.size() != dim_) throw ConfigError("KdTree::nearest: query dim mismatch");

    NearestResult best;
    best.dist2 = std::numeric_limits<double>::infinity();

    // Equal min_dist2 must still descend: the subtree can hold an
    // equal-distance point with a lower original index.
    auto visit = [&](auto&& self, int id) -> void {
        const Node& n = nodes_[id];
        if (min_dist2(id, q) > best.dist2) return;
        if (n.left < 0) {
            for (std::size_t i = n.lo; i < n.hi; ++i) {
                const double d2 = point_dist2(i, q);
                if (d2 < best.dist2 || (d2 == best.dist2 && orig_[i] < best.index)) {
                    best.dist2 = d2;
                    best.index = orig_[i];
                }
            }
            return;
        }
        const double dl = min_dist2(n.left, q);
        const double dr = min_dist2(n.right, q);
        if (dl <= dr) {
            self(self, n.left);
            self(self, n.right);
        } else {
            self(self, n.right);
            self(self, n.left);
        }
    };
    visit(visit, 0);
    return best;
}

std::vector<std::size_t> KdTree::radius_indices(std::span<const double> q, double radius) const {
    if (empty()) return {};
    if (q.size() != dim_) throw ConfigError("KdTree::radius_indices: query dim mismatch");
    const double r2 = radius * radius;
    std::vector<std::size_t> out;

    auto visit = [&](auto&& self, int id) -> void {
        const Node& n = nodes_[id];
        if (min_dist2(id, q) > r2) return;
        if (max_dist2(id, q) <= r2) {
            for (std::size_t i = n.lo; i < n.hi; ++i) out.push_back(orig_[i]);
            return;
        }
        if (n.left < 0) {
            for (std::size_t i = n.lo; i < n.hi; ++i)
                if (point_dist2(i, q) <= r2) out.push_back(orig_[i]);
            return;
        }
        self(self, n.left);
        self(self, n.right);
    };
    visit(visit, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t KdTree::count_within(std::span<const double> q, double radius) const {
    if (empty()) return 0;
    if (q.size() != dim_) throw ConfigError("KdTree::count_within: query dim mismatch");
    const double r2 = radius * radius;
    std::size_t total = 0;

    auto visit = [&](auto&& self, int id) -> void {
        const Node& n = nodes_[id];
        if (min_dist2(id, q) > r2) return;
        if (max_dist2(id, q) <= r2) {
            total += n.hi - n.lo;
            return;
        }
        if (n.left < 0) {
            for (std::size_t i = n.lo; i < n.hi; ++i)
                if (point_dist2(i, q) <= r2) ++total;
            return;
        }
        self(self, n.left);
        self(self, n.right);
    };
    visit(visit, 0);
    return total;
}

std::size_t KdTree::sample_within(std::span<const double> q, double radius, Rng& rng) const {
    if (empty()) return npos;
    if (q.size() != dim_) throw ConfigError("KdTree::sample_within: query dim mismatch");
    const double r2 = radius * radius;

    // Tree-order ranges covering exactly the membership set, collected in a
    // fixed DFS order. One uniform draw then lands on one member, so the
    // distribution is exactly uniform over members.
    struct Seg {
        std::uint32_t lo, hi;
    };
    std::vector<Seg> segs;
    std::size_t total = 0;

    auto visit = [&](auto&& self, int id) -> void {
        const Node& n = nodes_[id];
        if (min_dist2(id, q) > r2) return;
        if (max_dist2(id, q) <= r2) {
            segs.push_back({n.lo, n.hi});
            total += n.hi - n.lo;
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t i = n.lo; i < n.hi; ++i)
                if (point_dist2(i, q) <= r2) {
                    segs.push_back({i, i + 1});
                    ++total;
                }
            return;
        }
        self(self, n.left);
        self(self, n.right);
    };
    visit(visit, 0);

    if (total == 0) return npos;
    std::size_t j = rng.uniform_index(total);
    for (const Seg& s : segs) {
        const std::size_t len = s.hi - s.lo;
        if (j < len) return orig_[s.lo + j];
        j -= len;
    }
    return npos;  // unreachable
}

}  // namespace cdrb
