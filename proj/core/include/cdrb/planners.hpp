#pragma once

#include <functional>
#include <string>

#include "cdrb/diffusion.hpp"

namespace cdrb {

/// A planning method under evaluation: maps an episode's endpoints to a
/// candidate trajectory in maze units. plan() must be deterministic given
/// (start, goal, rng) and must return a trajectory whose first state is the
/// true start.
struct Planner {
    std::string name;
    std::function<Trajectory(const MazeState& start, const Vec2& goal, Rng& rng)> plan;
};

/// Reverse-diffusion planner through the replay buffer. Goal is pinned as a
/// zero-velocity state at the goal position. Captures copies of net/buffer.
Planner make_cdrb_planner(std::string name, RestorationNet net, ReplayBuffer buf,
                          SamplerConfig cfg, LatentSpec spec);

/// Gaussian-diffusion baseline planner (cosine schedule, ancestral sampling,
/// endpoints pinned).
Planner make_gaussian_planner(std::string name, RestorationNet net, LatentSpec spec,
                              bool pin = true);

/// Strawman: straight-line latent interpolation start->goal, every entry
/// projected to its nearest buffer member, endpoints re-pinned.
Planner make_projection_planner(std::string name, ReplayBuffer buf, LatentSpec spec);

/// Upper reference: plans with a fresh expert rollout for the episode.
Planner make_oracle_planner(std::string name, MazeSpec maze, ExpertParams params = {});

/// Lower reference: emits the start state repeated horizon+1 times.
Planner make_blind_planner(std::string name, int horizon);

}  // namespace cdrb
