#include "cdrb/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cdrb/errors.hpp"
#include "cdrb/textio.hpp"

namespace cdrb {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return d2;
}

}  // namespace

ReplayBuffer ReplayBuffer::build(const std::vector<std::vector<double>>& states,
                                 const std::vector<std::vector<double>>& actions,
                                 IndexKind index, double d_max_override) {
    if (states.empty()) throw ConfigError("ReplayBuffer: empty buffer");
    const std::size_t sd = states.front().size();
    if (sd == 0) throw ConfigError("ReplayBuffer: zero-dimensional states");
    const bool with_actions = !actions.empty();
    if (with_actions && actions.size() != states.size())
        throw ConfigError("ReplayBuffer: state/action count mismatch");
    const std::size_t ad = with_actions ? actions.front().size() : 0;
    if (with_actions && ad == 0) throw ConfigError("ReplayBuffer: zero-dimensional actions");

    ReplayBuffer buf;
    buf.count_ = states.size();
    buf.state_dim_ = sd;
    buf.action_dim_ = ad;
    buf.kind_ = index;

    buf.states_.reserve(buf.count_ * sd);
    for (const auto& s : states) {
        if (s.size() != sd) throw ConfigError("ReplayBuffer: ragged state dimensions");
        for (double v : s) {
            if (!std::isfinite(v)) throw ConfigError("ReplayBuffer: non-finite state");
            buf.states_.push_back(v);
        }
    }
    if (with_actions) {
        buf.actions_.reserve(buf.count_ * ad);
        buf.entries_.reserve(buf.count_ * (sd + ad));
        for (std::size_t i = 0; i < buf.count_; ++i) {
            if (actions[i].size() != ad)
                throw ConfigError("ReplayBuffer: ragged action dimensions");
            for (double v : actions[i]) {
                if (!std::isfinite(v)) throw ConfigError("ReplayBuffer: non-finite action");
                buf.actions_.push_back(v);
            }
            buf.entries_.insert(buf.entries_.end(), states[i].begin(), states[i].end());
            buf.entries_.insert(buf.entries_.end(), actions[i].begin(), actions[i].end());
        }
    }

    if (d_max_override > 0.0) {
        buf.d_max_ = d_max_override;
    } else {
        const std::size_t ed = buf.entry_dim();
        const std::vector<double>& rows = with_actions ? buf.entries_ : buf.states_;
        std::vector<double> lo(ed, std::numeric_limits<double>::infinity());
        std::vector<double> hi(ed, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < buf.count_; ++i)
            for (std::size_t k = 0; k < ed; ++k) {
                const double v = rows[i * ed + k];
                lo[k] = std::min(lo[k], v);
                hi[k] = std::max(hi[k], v);
            }
        double diag2 = 0.0;
        for (std::size_t k = 0; k < ed; ++k) diag2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
        buf.d_max_ = std::max(0.5 * std::sqrt(diag2), 1e-12);  // keep d_max positive
    }

    if (index == IndexKind::kdtree) {
        buf.state_tree_ = KdTree(buf.states_, sd);
        if (with_actions) buf.entry_tree_ = KdTree(buf.entries_, sd + ad);
    }
    return buf;
}

BufferPoint ReplayBuffer::point(std::size_t i) const {
    BufferPoint p;
    p.state.assign(states_.begin() + i * state_dim_, states_.begin() + (i + 1) * state_dim_);
    if (has_actions())
        p.action.assign(actions_.begin() + i * action_dim_,
                        actions_.begin() + (i + 1) * action_dim_);
    return p;
}

bool ReplayBuffer::pick_space(std::size_t qsize) const {
    if (qsize == state_dim_) return false;
    if (has_actions() && qsize == entry_dim()) return true;
    throw ConfigError("ReplayBuffer: query size matches neither state nor entry dimension");
}

ReplayBuffer::NearestResult ReplayBuffer::brute_nearest(std::span<const double> q) const {
    const bool full = pick_space(q.size());
    NearestResult best;
    best.dist2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count_; ++i) {
        const double d2 = dist2(space_row(full, i), q);
        if (d2 < best.dist2) {  // strict: first of equals wins, lowest index
            best.dist2 = d2;
            best.index = i;
        }
    }
    return best;
}

std::vector<std::size_t> ReplayBuffer::brute_radius(std::span<const double> q,
                                                    double radius) const {
    const bool full = pick_space(q.size());
    const double r2 = radius * radius;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < count_; ++i)
        if (dist2(space_row(full, i), q) <= r2) out.push_back(i);
    return out;
}

ReplayBuffer::NearestResult ReplayBuffer::nearest(std::span<const double> q) const {
    if (count_ == 0) throw ConfigError("ReplayBuffer: empty buffer");
    if (kind_ == IndexKind::brute) return brute_nearest(q);
    const bool full = pick_space(q.size());
    const KdTree::NearestResult r = (full ? entry_tree_ : state_tree_).nearest(q);
    return {r.index, r.dist2};
}

std::vector<std::size_t> ReplayBuffer::radius_indices(std::span<const double> q,
                                                      double radius) const {
    if (kind_ == IndexKind::brute) return brute_radius(q, radius);
    const bool full = pick_space(q.size());
    return (full ? entry_tree_ : state_tree_).radius_indices(q, radius);
}

std::size_t ReplayBuffer::count_within(std::span<const double> q, double radius) const {
    if (kind_ == IndexKind::brute) return brute_radius(q, radius).size();
    const bool full = pick_space(q.size());
    return (full ? entry_tree_ : state_tree_).count_within(q, radius);
}

std::size_t ReplayBuffer::ball_sample_index(std::span<const double> q, double eps,
                                            Rng& rng) const {
    if (eps < 0.0) throw ConfigError("ReplayBuffer: negative ball radius");
    if (kind_ == IndexKind::kdtree) {
        const bool full = pick_space(q.size());
        // Rejection proposals first: at the radii where the tree walk gets
        // boundary-heavy the ball holds a sizable fraction of the buffer, so
        // a uniform proposal lands inside within a few tries. An accepted
        // proposal and the tree draw are each uniform over the same closed
        // ball (identical distance predicate), so the mixture stays uniform.
        const double r2 = eps * eps;
        for (int trial = 0; trial < 24; ++trial) {
            const std::size_t i = rng.uniform_index(count_);
            if (dist2(space_row(full, i), q) <= r2) return i;
        }
        const KdTree& tree = full ? entry_tree_ : state_tree_;
        const std::size_t idx = tree.sample_within(q, eps, rng);
        if (idx != KdTree::npos) return idx;
        return tree.nearest(q).index;  // empty ball: project to nearest member
    }
    const std::vector<std::size_t> members = brute_radius(q, eps);
    if (!members.empty()) return members[rng.uniform_index(members.size())];
    return brute_nearest(q).index;
}

ReplayBuffer ReplayBuffer::kmeans_compress(std::size_t k, int iters, Rng& rng) const {
    if (k < 1 || k > count_)
        throw ConfigError("kmeans_compress: k must be in [1, buffer size]");
    if (iters < 0) throw ConfigError("kmeans_compress: negative iteration count");

    const std::size_t ed = entry_dim();
    const std::vector<double>& rows = has_actions() ? entries_ : states_;
    const auto row = [&](std::size_t i) {
        return std::span<const double>{rows.data() + i * ed, ed};
    };

    // k-means++ seeding: next center drawn with probability proportional to
    // squared distance from the chosen set.
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    std::vector<double> min_d2(count_, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = rng.uniform_index(count_);
        centers.emplace_back(row(first).begin(), row(first).end());
    }
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < count_; ++i) {
            const double d2 = dist2(row(i), centers.back());
            min_d2[i] = std::min(min_d2[i], d2);
            total += min_d2[i];
        }
        std::size_t chosen;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            chosen = count_ - 1;
            for (std::size_t i = 0; i < count_; ++i) {
                acc += min_d2[i];
                if (target < acc) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = rng.uniform_index(count_);  // all points already covered
        }
        centers.emplace_back(row(chosen).begin(), row(chosen).end());
    }

    // Lloyd iterations until fixpoint or the iteration budget runs out.
    std::vector<std::size_t> assign(count_, 0);
    const auto assign_all = [&]() {
        bool changed = false;
        for (std::size_t i = 0; i < count_; ++i) {
            std::size_t best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const double d2 = dist2(row(i), centers[c]);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        return changed;
    };

    assign_all();
    for (int it = 0; it < iters; ++it) {
        std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(ed, 0.0));
        std::vector<std::size_t> counts(centers.size(), 0);
        for (std::size_t i = 0; i < count_; ++i) {
            const auto r = row(i);
            for (std::size_t d = 0; d < ed; ++d) sums[assign[i]][d] += r[d];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t d = 0; d < ed; ++d) centers[c][d] = sums[c][d] / counts[c];
        }
        if (!assign_all()) break;
    }

    // Snap each centroid to its nearest original point, dedupe, keep
    // original order so the result is independent of centroid numbering.
    std::vector<std::size_t> snapped;
    snapped.reserve(centers.size());
    for (const auto& c : centers) snapped.push_back(nearest(c).index);
    std::sort(snapped.begin(), snapped.end());
    snapped.erase(std::unique(snapped.begin(), snapped.end()), snapped.end());

    std::vector<std::vector<double>> new_states;
    std::vector<std::vector<double>> new_actions;
    new_states.reserve(snapped.size());
    for (std::size_t i : snapped) {
        new_states.emplace_back(state(i).begin(), state(i).end());
        if (has_actions())
            new_actions.emplace_back(actions_.begin() + i * action_dim_,
                                     actions_.begin() + (i + 1) * action_dim_);
    }
    return build(new_states, new_actions, kind_, d_max_);
}

void ReplayBuffer::save(const std::filesystem::path& path) const {
    std::ostringstream out;
    out << "cdrb-buffer 1\n";
    out << "state_dim " << state_dim_ << "\n";
    out << "action_dim " << action_dim_ << "\n";
    out << "d_max " << fmt_g17(d_max_) << "\n";
    out << "count " << count_ << "\n";
    for (std::size_t i = 0; i < count_; ++i) {
        const auto e = entry(i);
        for (std::size_t k = 0; k < e.size(); ++k) out << (k ? " " : "") << fmt_g17(e[k]);
        out << "\n";
    }
    std::ofstream f(path);
    if (!f) throw IoError("ReplayBuffer::save: cannot open " + path.string());
    f << out.str();
    if (!f.good()) throw IoError("ReplayBuffer::save: write failed for " + path.string());
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path, IndexKind index) {
    std::ifstream f(path);
    if (!f) throw IoError("ReplayBuffer::load: cannot open " + path.string());
    TokenReader r(f, "buffer " + path.string());

    r.expect("cdrb-buffer");
    if (r.integer() != 1) throw IoError("ReplayBuffer::load: unsupported version");
    r.expect("state_dim");
    const long long sd = r.integer();
    r.expect("action_dim");
    const long long ad = r.integer();
    r.expect("d_max");
    const double d_max = r.real();
    r.expect("count");
    const long long n = r.integer();
    if (sd < 1 || ad < 0 || n < 1 || d_max <= 0.0)
        throw IoError("ReplayBuffer::load: invalid header");

    std::vector<std::vector<double>> states(n, std::vector<double>(sd));
    std::vector<std::vector<double>> actions;
    if (ad > 0) actions.assign(n, std::vector<double>(ad));
    for (long long i = 0; i < n; ++i) {
        for (auto& v : states[i]) v = r.real();
        if (ad > 0)
            for (auto& v : actions[i]) v = r.real();
    }
    return build(states, actions, index, d_max);
}

}  // namespace cdrb
