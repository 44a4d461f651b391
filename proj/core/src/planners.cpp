#include "cdrb/planners.hpp"

namespace cdrb {

namespace {

std::vector<double> goal_entry(const LatentSpec& spec, const Vec2& goal) {
    return spec.state_entry(MazeState{goal, {0.0, 0.0}});  // goal velocity pinned to zero
}

// Pinning promises the returned endpoints equal the request exactly; the
// normalize/denormalize round trip is not bit-exact, so restore them.
Trajectory pinned_plan(std::span<const double> latent, const LatentSpec& spec,
                       const MazeState& start, const Vec2& goal) {
    Trajectory traj = from_latent(latent, spec);
    traj.states.front() = start;
    traj.states.back() = MazeState{goal, {0.0, 0.0}};
    return traj;
}

}  // namespace

Planner make_cdrb_planner(std::string name, RestorationNet net, ReplayBuffer buf,
                          SamplerConfig cfg, LatentSpec spec) {
    Planner p;
    p.name = std::move(name);
    p.plan = [net = std::move(net), buf = std::move(buf), cfg, spec = std::move(spec)](
                 const MazeState& start, const Vec2& goal, Rng& rng) {
        const std::vector<double> s0 = spec.state_entry(start);
        const std::vector<double> sT = goal_entry(spec, goal);
        const std::vector<double> latent = sample_cdrb(net, buf, cfg, s0, sT, rng);
        return pinned_plan(latent, spec, start, goal);
    };
    return p;
}

Planner make_gaussian_planner(std::string name, RestorationNet net, LatentSpec spec,
                              bool pin) {
    Planner p;
    p.name = std::move(name);
    const NoiseSchedule ns = NoiseSchedule::cosine(net.cfg.diffusion_steps);
    p.plan = [net = std::move(net), ns, spec = std::move(spec), pin](
                 const MazeState& start, const Vec2& goal, Rng& rng) {
        const std::vector<double> s0 = spec.state_entry(start);
        const std::vector<double> sT = goal_entry(spec, goal);
        const std::vector<double> latent = sample_gaussian(
            net, ns, s0, sT, spec.horizon, spec.entry_dim(), rng, pin);
        if (pin) return pinned_plan(latent, spec, start, goal);
        return from_latent(latent, spec);
    };
    return p;
}

Planner make_projection_planner(std::string name, ReplayBuffer buf, LatentSpec spec) {
    Planner p;
    p.name = std::move(name);
    p.plan = [buf = std::move(buf), spec = std::move(spec)](const MazeState& start,
                                                            const Vec2& goal, Rng&) {
        const std::vector<double> s0 = spec.state_entry(start);
        const std::vector<double> sT = goal_entry(spec, goal);
        const int H = spec.horizon;
        const std::size_t ed = spec.entry_dim();
        std::vector<double> latent(static_cast<std::size_t>(H + 1) * ed);
        for (int i = 0; i <= H; ++i) {
            const double w = static_cast<double>(i) / H;
            for (std::size_t c = 0; c < ed; ++c)
                latent[static_cast<std::size_t>(i) * ed + c] =
                    (1.0 - w) * s0[c] + w * sT[c];
        }
        latent = project_trajectory(latent, buf);
        std::copy(s0.begin(), s0.end(), latent.begin());
        std::copy(sT.begin(), sT.end(), latent.end() - ed);
        return pinned_plan(latent, spec, start, goal);
    };
    return p;
}

Planner make_oracle_planner(std::string name, MazeSpec maze, ExpertParams params) {
    Planner p;
    p.name = std::move(name);
    p.plan = [maze = std::move(maze), params](const MazeState& start, const Vec2& goal,
                                              Rng&) {
        GoalRegion region{goal, 0.5};
        for (const GoalRegion& g : maze.goals)
            if (g.center.x == goal.x && g.center.y == goal.y) region = g;
        Trajectory traj = expert_demo_for(maze, start, region, params).traj;
        if (traj.states.size() < 2) traj.states.resize(2, start);  // degenerate rollout
        return traj;
    };
    return p;
}

Planner make_blind_planner(std::string name, int horizon) {
    Planner p;
    p.name = std::move(name);
    p.plan = [horizon](const MazeState& start, const Vec2&, Rng&) {
        Trajectory traj;
        traj.states.assign(horizon + 1, start);
        return traj;
    };
    return p;
}

}  // namespace cdrb
