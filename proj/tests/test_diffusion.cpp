#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "cdrb/diffusion.hpp"
#include "cdrb/errors.hpp"
#include "cdrb/expert.hpp"
#include "cdrb/maze.hpp"
#include "cdrb/rng.hpp"

using namespace cdrb;

namespace {

struct Fixture {
    DemoDataset ds;
    LatentSpec spec;
    ReplayBuffer buf;
    std::vector<std::vector<double>> latents;

    static Fixture make(bool include_actions, int demos = 8, int horizon = 12) {
        Fixture f;
        const MazeSpec maze = MazeSpec::preset("empty");
        DatasetParams dp;
        dp.num_demos = demos;
        dp.horizon = horizon;
        dp.keep_actions = true;
        f.ds = generate_dataset(maze, 91, dp);
        f.spec = LatentSpec::from_dataset(f.ds, include_actions);
        f.buf = build_buffer(f.ds, include_actions);
        for (const Trajectory& t : f.ds.trajectories) f.latents.push_back(to_latent(t, f.spec));
        return f;
    }
};

std::set<std::vector<double>> entry_set(const ReplayBuffer& buf) {
    std::set<std::vector<double>> s;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const auto e = buf.entry(i);
        s.insert(std::vector<double>(e.begin(), e.end()));
    }
    return s;
}

// True iff every non-pinned entry of `latent` is an exact buffer member.
bool interior_in_buffer(std::span<const double> latent, const std::set<std::vector<double>>& members,
                        int entry_dim, int horizon) {
    for (int i = 1; i < horizon; ++i) {
        const std::vector<double> e(latent.begin() + i * entry_dim,
                                    latent.begin() + (i + 1) * entry_dim);
        if (!members.count(e)) return false;
    }
    return true;
}

NetConfig tiny_net(const LatentSpec& spec, int t) {
    NetConfig cfg;
    cfg.backbone = Backbone::mlp;
    cfg.horizon = spec.horizon;
    cfg.entry_dim = spec.entry_dim();
    cfg.diffusion_steps = t;
    cfg.hidden = 32;
    cfg.depth = 2;
    cfg.embed_dim = 8;
    return cfg;
}

}  // namespace

TEST_CASE("latent round-trip recovers states and actions") {
    const auto f = Fixture::make(true);
    CHECK(f.spec.state_dim == 4);
    CHECK(f.spec.action_dim == 2);
    CHECK(f.spec.size() == (f.ds.horizon + 1) * 6);

    for (const Trajectory& t : f.ds.trajectories) {
        const auto lat = to_latent(t, f.spec);
        REQUIRE(static_cast<int>(lat.size()) == f.spec.size());
        // Normalized coordinates live in [-1, 1] for in-bounds data.
        for (double v : lat) REQUIRE(std::abs(v) <= 1.0 + 1e-9);

        const Trajectory back = from_latent(lat, f.spec);
        REQUIRE(back.states.size() == t.states.size());
        REQUIRE(back.actions.size() == t.actions.size());
        for (std::size_t i = 0; i < t.states.size(); ++i) {
            CHECK(back.states[i].pos.x == doctest::Approx(t.states[i].pos.x).epsilon(1e-12));
            CHECK(back.states[i].pos.y == doctest::Approx(t.states[i].pos.y).epsilon(1e-12));
            CHECK(back.states[i].vel.x == doctest::Approx(t.states[i].vel.x).epsilon(1e-12));
            CHECK(back.states[i].vel.y == doctest::Approx(t.states[i].vel.y).epsilon(1e-12));
        }
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
            CHECK(back.actions[i].force.x ==
                  doctest::Approx(t.actions[i].force.x).epsilon(1e-12));
            CHECK(back.actions[i].force.y ==
                  doctest::Approx(t.actions[i].force.y).epsilon(1e-12));
        }
    }
}

TEST_CASE("state entries embed and recover through the spec") {
    const auto f = Fixture::make(true);
    MazeState s;
    s.pos = {3.25, 7.5};
    s.vel = {0.4, -0.9};
    const auto e = f.spec.state_entry(s);
    REQUIRE(static_cast<int>(e.size()) == f.spec.entry_dim());
    const MazeState back = f.spec.entry_state(e);
    CHECK(back.pos.x == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(back.pos.y == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(back.vel.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(back.vel.y == doctest::Approx(-0.9).epsilon(1e-12));
}

TEST_CASE("buffer holds every dataset entry") {
    const auto f = Fixture::make(true);
    CHECK(f.buf.size() == f.ds.size() * (f.ds.horizon + 1));
    CHECK(static_cast<int>(f.buf.entry_dim()) == f.spec.entry_dim());
    const auto members = entry_set(f.buf);
    for (const auto& lat : f.latents) {
        for (int i = 0; i <= f.spec.horizon; ++i) {
            const std::vector<double> e(lat.begin() + i * f.spec.entry_dim(),
                                        lat.begin() + (i + 1) * f.spec.entry_dim());
            REQUIRE(members.count(e) == 1);
        }
    }

    // State-only variant drops the action part.
    const auto fs = Fixture::make(false);
    CHECK(fs.spec.action_dim == 0);
    CHECK(fs.buf.entry_dim() == 4);
    CHECK_FALSE(fs.buf.has_actions());
}

TEST_CASE("degradation outputs exact buffer members and keeps the pins") {
    const auto f = Fixture::make(true);
    const int t = 10;
    const DistanceSchedule sched{ScheduleKind::linear, f.buf.d_max(), t};
    const auto members = entry_set(f.buf);
    Rng rng(4);

    const auto& lat = f.latents[2];
    for (int k : {1, 3, 7, 10}) {
        const auto noisy = degrade_cdrb(lat, k, f.buf, sched, rng);
        CHECK(noisy.step == k);
        CHECK(noisy.horizon == f.spec.horizon);
        CHECK(noisy.pinned);
        REQUIRE(noisy.data.size() == lat.size());
        // Pinned endpoints are bit-exact copies.
        const int ed = f.spec.entry_dim();
        REQUIRE(std::equal(noisy.data.begin(), noisy.data.begin() + ed, lat.begin()));
        REQUIRE(std::equal(noisy.data.end() - ed, noisy.data.end(), lat.end() - ed));
        REQUIRE(interior_in_buffer(noisy.data, members, ed, f.spec.horizon));
        // Ball radius bounds the displacement of every replaced entry.
        for (int i = 1; i < f.spec.horizon; ++i) {
            double d2 = 0.0;
            for (int c = 0; c < ed; ++c) {
                const double d = noisy.data[i * ed + c] - lat[i * ed + c];
                d2 += d * d;
            }
            CHECK(std::sqrt(d2) <= sched.epsilon(k) + 1e-12);
        }
    }

    // k = 0 on dataset latents is the identity: the ball radius is zero and
    // the entry itself is a member, so only exact duplicates can be drawn.
    const auto same = degrade_cdrb(lat, 0, f.buf, sched, rng);
    CHECK(same.data == lat);

    // Unpinned degradation replaces endpoints with members too.
    const auto unpinned = degrade_cdrb(lat, t, f.buf, sched, rng, false);
    const int ed = f.spec.entry_dim();
    const std::vector<double> first(unpinned.data.begin(), unpinned.data.begin() + ed);
    CHECK(members.count(first) == 1);
}

TEST_CASE("restoration training is deterministic and reduces the loss") {
    const auto f = Fixture::make(true);
    const int t = 8;
    const DistanceSchedule sched{ScheduleKind::linear, f.buf.d_max(), t};
    const NetConfig cfg = tiny_net(f.spec, t);

    TrainConfig tc;
    tc.steps = 60;
    tc.batch = 8;
    tc.seed = 5;

    auto net1 = RestorationNet::init(cfg, 5);
    auto opt1 = OptimizerState::init(net1.params.size(), 1e-3);
    const auto r1 = train_restoration(f.latents, f.buf, sched, net1, opt1, tc);

    auto net2 = RestorationNet::init(cfg, 5);
    auto opt2 = OptimizerState::init(net2.params.size(), 1e-3);
    const auto r2 = train_restoration(f.latents, f.buf, sched, net2, opt2, tc);

    REQUIRE(r1.loss.size() == 60);
    CHECK(r1.loss == r2.loss);
    CHECK(net1.params == net2.params);

    const auto mean = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    };
    CHECK(mean(std::span(r1.loss).last(10)) < mean(std::span(r1.loss).first(10)));
}

TEST_CASE("alg2 sampling keeps every intermediate inside the buffer and pins endpoints") {
    const auto f = Fixture::make(true);
    const int t = 8;
    const NetConfig cfg = tiny_net(f.spec, t);
    const auto net = RestorationNet::init(cfg, 17);  // identity net suffices

    SamplerConfig sc{DistanceSchedule{ScheduleKind::linear, f.buf.d_max(), t},
                     SamplerKind::alg2, true};

    const int ed = f.spec.entry_dim();
    const std::vector<double> s0(f.latents[0].begin(), f.latents[0].begin() + ed);
    const std::vector<double> sT(f.latents[0].end() - ed, f.latents[0].end());
    const auto members = entry_set(f.buf);

    Rng rng(77);
    SampleTrace trace;
    const auto plan = sample_cdrb(net, f.buf, sc, s0, sT, rng, &trace);

    REQUIRE(static_cast<int>(plan.size()) == f.spec.size());
    REQUIRE(trace.steps.size() == static_cast<std::size_t>(t));  // tau(t) .. tau(1)
    for (const auto& tau : trace.steps) {
        REQUIRE(std::equal(tau.begin(), tau.begin() + ed, s0.begin()));
        REQUIRE(std::equal(tau.end() - ed, tau.end(), sT.begin()));
        REQUIRE(interior_in_buffer(tau, members, ed, f.spec.horizon));
    }
    // Final plan endpoints are bit-exact.
    CHECK(std::equal(plan.begin(), plan.begin() + ed, s0.begin()));
    CHECK(std::equal(plan.end() - ed, plan.end(), sT.begin()));

    // Identity net, last restoration of tau(1): the plan equals tau(1).
    CHECK(plan == trace.steps.back());

    // Deterministic in the rng stream.
    Rng rng2(77);
    CHECK(sample_cdrb(net, f.buf, sc, s0, sT, rng2) == plan);
}

TEST_CASE("eq5 sampling runs, pins endpoints, and may leave the buffer") {
    const auto f = Fixture::make(true);
    const int t = 8;
    const NetConfig cfg = tiny_net(f.spec, t);
    const auto net = RestorationNet::init(cfg, 18);

    SamplerConfig sc{DistanceSchedule{ScheduleKind::linear, f.buf.d_max(), t},
                     SamplerKind::eq5, true};
    const int ed = f.spec.entry_dim();
    const std::vector<double> s0(f.latents[1].begin(), f.latents[1].begin() + ed);
    const std::vector<double> sT(f.latents[1].end() - ed, f.latents[1].end());

    Rng rng(3);
    const auto plan = sample_cdrb(net, f.buf, sc, s0, sT, rng);
    REQUIRE(static_cast<int>(plan.size()) == f.spec.size());
    CHECK(std::equal(plan.begin(), plan.begin() + ed, s0.begin()));
    CHECK(std::equal(plan.end() - ed, plan.end(), sT.begin()));
    for (double v : plan) CHECK(std::isfinite(v));
}

TEST_CASE("projection replaces every entry with its nearest buffer member") {
    const auto f = Fixture::make(true);
    const auto members = entry_set(f.buf);
    const int ed = f.spec.entry_dim();

    std::vector<double> lat = f.latents[3];
    Rng rng(6);
    for (double& v : lat) v += rng.normal() * 0.1;  // push off the buffer

    const auto proj = project_trajectory(lat, f.buf);
    REQUIRE(proj.size() == lat.size());
    for (int i = 0; i <= f.spec.horizon; ++i) {
        const std::vector<double> e(proj.begin() + i * ed, proj.begin() + (i + 1) * ed);
        REQUIRE(members.count(e) == 1);
        // Nearest: no other member is strictly closer.
        const std::vector<double> q(lat.begin() + i * ed, lat.begin() + (i + 1) * ed);
        const auto nr = f.buf.nearest(q);
        double d2 = 0.0;
        for (int c = 0; c < ed; ++c) d2 += (e[c] - q[c]) * (e[c] - q[c]);
        CHECK(d2 == doctest::Approx(nr.dist2).epsilon(1e-12));
    }
}

TEST_CASE("cosine noise schedule matches its closed form") {
    const int t = 50;
    const double s = 0.008;
    const auto ns = NoiseSchedule::cosine(t, s);
    REQUIRE(ns.alpha_bar.size() == static_cast<std::size_t>(t + 1));
    CHECK(ns.alpha_bar[0] == 1.0);

    const auto fcos = [&](double k) {
        const double x = (k / t + s) / (1.0 + s) * (3.14159265358979323846 / 2.0);
        return std::cos(x) * std::cos(x);
    };
    for (int k = 0; k <= t; ++k) {
        CHECK(ns.alpha_bar[k] == doctest::Approx(fcos(k) / fcos(0)).epsilon(1e-12));
        if (k > 0) CHECK(ns.alpha_bar[k] < ns.alpha_bar[k - 1]);
        CHECK(ns.alpha(k) * ns.alpha(k) + ns.sigma(k) * ns.sigma(k) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(ns.alpha_bar[t] > 0.0);
    CHECK(ns.alpha_bar[t] < 0.01);  // end of the schedule is near-pure noise
}

TEST_CASE("gaussian forward pins endpoints and is the identity at k=0") {
    const auto f = Fixture::make(false);
    const auto ns = NoiseSchedule::cosine(10);
    Rng rng(12);
    const auto& lat = f.latents[0];
    const int ed = f.spec.entry_dim();

    const auto noisy = gaussian_forward(lat, ed, 7, ns, rng);
    REQUIRE(noisy.data.size() == lat.size());
    CHECK(std::equal(noisy.data.begin(), noisy.data.begin() + ed, lat.begin()));
    CHECK(std::equal(noisy.data.end() - ed, noisy.data.end(), lat.end() - ed));
    // Interior entries do change under real noise.
    bool changed = false;
    for (std::size_t i = ed; i < lat.size() - ed; ++i) changed |= noisy.data[i] != lat[i];
    CHECK(changed);

    const auto same = gaussian_forward(lat, ed, 0, ns, rng);
    CHECK(same.data == lat);
}

TEST_CASE("gaussian training is deterministic and learns the noise on a tiny set") {
    const auto f = Fixture::make(false, 4, 8);
    const int t = 6;
    const auto ns = NoiseSchedule::cosine(t);
    const NetConfig cfg = tiny_net(f.spec, t);

    TrainConfig tc;
    tc.steps = 60;
    tc.batch = 8;
    tc.seed = 2;

    auto net1 = RestorationNet::init(cfg, 3);
    auto opt1 = OptimizerState::init(net1.params.size(), 1e-3);
    const auto r1 = train_gaussian(f.latents, ns, net1, opt1, tc);

    auto net2 = RestorationNet::init(cfg, 3);
    auto opt2 = OptimizerState::init(net2.params.size(), 1e-3);
    const auto r2 = train_gaussian(f.latents, ns, net2, opt2, tc);

    CHECK(r1.loss == r2.loss);
    CHECK(net1.params == net2.params);
    REQUIRE(r1.loss.size() == 60);
}

TEST_CASE("zero-noise fixture makes gaussian sampling a pass-through of its init") {
    const auto f = Fixture::make(false, 4, 8);
    const int t = 6;
    const auto ns = NoiseSchedule::zero(t);
    const NetConfig cfg = tiny_net(f.spec, t);
    const auto net = RestorationNet::init(cfg, 9);

    const int ed = f.spec.entry_dim();
    const auto& lat = f.latents[0];
    const std::vector<double> s0(lat.begin(), lat.begin() + ed);
    const std::vector<double> sT(lat.end() - ed, lat.end());

    Rng rng(55);
    const auto out = sample_gaussian(net, ns, s0, sT, f.spec.horizon, ed, rng);

    // Reproduce the expected init: pinned endpoints, N(0,1) interior drawn in
    // entry order from the identical stream.
    Rng twin(55);
    std::vector<double> want(lat.size());
    std::copy(s0.begin(), s0.end(), want.begin());
    for (int i = 1; i < f.spec.horizon; ++i)
        for (int c = 0; c < ed; ++c) want[i * ed + c] = twin.normal();
    std::copy(sT.begin(), sT.end(), want.end() - ed);
    CHECK(out == want);
}

TEST_CASE("gaussian sampling pins endpoints bit-exactly through real noise") {
    const auto f = Fixture::make(false, 4, 8);
    const int t = 6;
    const auto ns = NoiseSchedule::cosine(t);
    const NetConfig cfg = tiny_net(f.spec, t);
    const auto net = RestorationNet::init(cfg, 10);

    const int ed = f.spec.entry_dim();
    const auto& lat = f.latents[1];
    const std::vector<double> s0(lat.begin(), lat.begin() + ed);
    const std::vector<double> sT(lat.end() - ed, lat.end());

    Rng rng(66);
    SampleTrace trace;
    const auto out = sample_gaussian(net, ns, s0, sT, f.spec.horizon, ed, rng, true, &trace);
    CHECK(std::equal(out.begin(), out.begin() + ed, s0.begin()));
    CHECK(std::equal(out.end() - ed, out.end(), sT.begin()));
    for (const auto& tau : trace.steps) {
        REQUIRE(std::equal(tau.begin(), tau.begin() + ed, s0.begin()));
        REQUIRE(std::equal(tau.end() - ed, tau.end(), sT.begin()));
    }
    for (double v : out) CHECK(std::isfinite(v));
}

TEST_CASE("checkpoints round-trip byte-exactly") {
    namespace fs = std::filesystem;
    const auto f = Fixture::make(true, 4, 8);
    const int t = 6;
    const NetConfig cfg = tiny_net(f.spec, t);
    const auto net = RestorationNet::init(cfg, 21);

    Checkpoint ck;
    ck.method = "cdrb";
    ck.maze_id = f.ds.maze_id;
    ck.latent = f.spec;
    ck.sched_kind = ScheduleKind::log;
    ck.d_max = f.buf.d_max();
    ck.net_cfg = cfg;
    ck.params = net.params;

    const fs::path p = fs::temp_directory_path() / "cdrb_ck_rt.txt";
    save_checkpoint(ck, p);
    const Checkpoint back = load_checkpoint(p);
    CHECK(back.method == ck.method);
    CHECK(back.maze_id == ck.maze_id);
    CHECK(back.sched_kind == ck.sched_kind);
    CHECK(back.d_max == ck.d_max);
    CHECK(back.latent.horizon == ck.latent.horizon);
    CHECK(back.latent.action_dim == ck.latent.action_dim);
    CHECK(back.latent.state_norm.lo == ck.latent.state_norm.lo);
    CHECK(back.latent.state_norm.hi == ck.latent.state_norm.hi);
    CHECK(back.net_cfg.hidden == cfg.hidden);
    CHECK(back.params == ck.params);

    // The loaded checkpoint drives a working net.
    const auto net2 = back.net();
    std::vector<double> x(cfg.input_size(), 0.25);
    CHECK(net2.forward(x, 3) == net.forward(x, 3));

    // Re-save is byte-identical.
    const fs::path p2 = fs::temp_directory_path() / "cdrb_ck_rt2.txt";
    save_checkpoint(back, p2);
    std::ifstream f1(p, std::ios::binary), f2(p2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);

    // A truncated parameter array must not load.
    Checkpoint bad = ck;
    bad.params.pop_back();
    const fs::path p3 = fs::temp_directory_path() / "cdrb_ck_bad.txt";
    save_checkpoint(bad, p3);
    CHECK_THROWS_AS(load_checkpoint(p3), IoError);

    fs::remove(p);
    fs::remove(p2);
    fs::remove(p3);
    CHECK_THROWS_AS(load_checkpoint(fs::temp_directory_path() / "cdrb_ck_missing.txt"), IoError);
}

TEST_CASE("steps_to_half_loss hand cases") {
    // window 1: initial 4, final 0, target 2; first value <= 2 is step 3.
    CHECK(steps_to_half_loss({4.0, 4.0, 2.0, 0.0}, 1) == 3);
    // window 2: trailing averages 4, 4, 2 -> crossing at step 4.
    CHECK(steps_to_half_loss({4.0, 4.0, 4.0, 0.0, 0.0, 0.0}, 2) == 4);
    // No reduction: returns the curve length.
    CHECK(steps_to_half_loss({1.0, 1.0, 1.0}, 1) == 3);
    CHECK(steps_to_half_loss({1.0, 2.0, 3.0}, 1) == 3);
    CHECK(steps_to_half_loss({}, 5) == 0);
    // Window larger than the curve degrades to the full mean.
    CHECK(steps_to_half_loss({2.0, 1.0}, 10) == 2);
}
