#include "cdrb/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cdrb/buffer.hpp"
#include "cdrb/model.hpp"
#include "cdrb/rng.hpp"
#include "cdrb/schedule.hpp"

namespace cdrb {

namespace {

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Reporter {
    std::ostream& out;
    bool all_ok = true;

    void check(bool ok, const std::string& name, const std::string& detail = "") {
        out << (ok ? "ok  " : "FAIL") << "  " << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << "\n";
        if (!ok) all_ok = false;
    }
};

// Central finite differences against loss_and_grad on a sample of coordinates.
double max_grad_rel_err(const NetConfig& cfg, std::uint64_t seed) {
    RestorationNet net = RestorationNet::init(cfg, seed);
    Rng rng(seed + 1);

    const std::size_t n = cfg.input_size();
    const int batch = 3;
    std::vector<double> noisy(n * batch), clean(n * batch);
    for (double& v : noisy) v = rng.uniform() * 2.0 - 1.0;
    for (double& v : clean) v = rng.uniform() * 2.0 - 1.0;
    std::vector<int> ks(batch);
    for (int b = 0; b < batch; ++b)
        ks[b] = 1 + static_cast<int>(rng.uniform_index(
                        static_cast<std::size_t>(cfg.diffusion_steps)));

    std::vector<double> grad;
    net.loss_and_grad(noisy, clean, ks, grad);

    const double h = 1e-5;
    double worst = 0.0;
    std::vector<double> scratch;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t i = rng.uniform_index(net.params.size());
        const double saved = net.params[i];
        net.params[i] = saved + h;
        const double lp = net.loss_and_grad(noisy, clean, ks, scratch);
        net.params[i] = saved - h;
        const double lm = net.loss_and_grad(noisy, clean, ks, scratch);
        net.params[i] = saved;
        const double fd = (lp - lm) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
        worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    }
    return worst;
}

bool kdtree_matches_linear_scan(int cases, std::uint64_t seed, std::string& detail) {
    Rng rng(seed);
    for (int c = 0; c < cases; ++c) {
        const std::size_t dim = 2 + rng.uniform_index(4);
        const std::size_t count = 1 + rng.uniform_index(60);
        std::vector<std::vector<double>> states(count, std::vector<double>(dim));
        for (auto& s : states)
            for (double& v : s) v = rng.uniform() * 4.0 - 2.0;
        // Duplicates exercise the lowest-index tie rule.
        if (count > 2 && rng.uniform() < 0.3) states[count - 1] = states[0];

        ReplayBuffer kd = ReplayBuffer::build(states, {}, IndexKind::kdtree);
        ReplayBuffer br = ReplayBuffer::build(states, {}, IndexKind::brute);

        std::vector<double> q(dim);
        for (double& v : q) v = rng.uniform() * 5.0 - 2.5;

        const auto nk = kd.nearest(q);
        const auto nb = br.nearest(q);
        if (nk.index != nb.index || nk.dist2 != nb.dist2) {
            detail = "nearest mismatch, case " + std::to_string(c);
            return false;
        }
        const double r = rng.uniform() * 2.0;
        if (kd.radius_indices(q, r) != br.radius_indices(q, r)) {
            detail = "radius mismatch, case " + std::to_string(c);
            return false;
        }
    }
    return true;
}

bool kmeans_subset_of_buffer(std::uint64_t seed, std::string& detail) {
    Rng rng(seed);
    const std::size_t count = 300, dim = 4;
    std::vector<std::vector<double>> states(count, std::vector<double>(dim));
    for (auto& s : states)
        for (double& v : s) v = rng.uniform() * 2.0 - 1.0;
    ReplayBuffer buf = ReplayBuffer::build(states, {}, IndexKind::kdtree);
    ReplayBuffer small = buf.kmeans_compress(30, 25, rng);
    if (small.size() == 0 || small.size() > 30) {
        detail = "size " + std::to_string(small.size());
        return false;
    }
    for (std::size_t i = 0; i < small.size(); ++i) {
        const auto e = small.entry(i);
        bool found = false;
        for (std::size_t j = 0; j < buf.size() && !found; ++j) {
            const auto o = buf.entry(j);
            found = std::equal(e.begin(), e.end(), o.begin());
        }
        if (!found) {
            detail = "entry " + std::to_string(i) + " not in parent";
            return false;
        }
    }
    return true;
}

bool schedule_invariants(std::string& detail) {
    for (const ScheduleKind kind : {ScheduleKind::linear, ScheduleKind::log}) {
        const DistanceSchedule s{kind, 3.5, 50};
        if (s.epsilon(0) != 0.0) {
            detail = "epsilon(0) != 0";
            return false;
        }
        if (s.epsilon(s.t) != s.d_max) {
            detail = "epsilon(t) != d_max";
            return false;
        }
        for (int k = 1; k <= s.t; ++k) {
            if (!(s.epsilon(k) > s.epsilon(k - 1))) {
                detail = "not strictly increasing at k=" + std::to_string(k);
                return false;
            }
        }
    }
    return true;
}

}  // namespace

bool run_selftest(std::ostream& out) {
    Reporter rep{out};

    {
        NetConfig cfg;
        cfg.backbone = Backbone::mlp;
        cfg.horizon = 6;
        cfg.entry_dim = 4;
        cfg.diffusion_steps = 10;
        cfg.hidden = 16;
        cfg.depth = 2;
        cfg.embed_dim = 8;
        const double err = max_grad_rel_err(cfg, 11);
        rep.check(err < 1e-4, "gradient check (mlp)", "max rel err " + fmt_short(err));
    }
    {
        NetConfig cfg;
        cfg.backbone = Backbone::tcn;
        cfg.horizon = 6;
        cfg.entry_dim = 4;
        cfg.diffusion_steps = 10;
        cfg.hidden = 16;
        cfg.depth = 2;
        cfg.embed_dim = 8;
        cfg.channels = 8;
        cfg.kernel = 3;
        const double err = max_grad_rel_err(cfg, 12);
        rep.check(err < 1e-4, "gradient check (tcn)", "max rel err " + fmt_short(err));
    }
    {
        std::string detail;
        const bool ok = kdtree_matches_linear_scan(1000, 21, detail);
        rep.check(ok, "kd-tree vs linear scan, 1000 cases", detail);
    }
    {
        std::string detail;
        const bool ok = kmeans_subset_of_buffer(31, detail);
        rep.check(ok, "kmeans compression stays inside buffer", detail);
    }
    {
        std::string detail;
        const bool ok = schedule_invariants(detail);
        rep.check(ok, "schedule endpoints and monotonicity", detail);
    }

    out << (rep.all_ok ? "selftest passed" : "selftest FAILED") << "\n";
    return rep.all_ok;
}

}  // namespace cdrb
