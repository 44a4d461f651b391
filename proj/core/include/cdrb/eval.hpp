#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdrb/control.hpp"
#include "cdrb/expert.hpp"
#include "cdrb/planners.hpp"

namespace cdrb {

/// Fractions of plan states with feasible positions and of consecutive-state
/// segments passing the exact segment test. A single-state plan has segment
/// feasibility 1.
struct Feasibility {
    double point_frac = 0.0;
    double segment_frac = 0.0;
};
Feasibility plan_feasibility(const Trajectory& plan, const MazeSpec& maze);

/// Plan path length divided by a reference (expert) path length.
double normalized_path_length(const Trajectory& plan, double reference_length);

/// One start/goal pair shared by every method, with the expert's path length
/// as the normalization reference (<= 0 when the expert rollout failed).
struct Episode {
    MazeState start;
    GoalRegion goal;
    double reference_length = -1.0;
};

struct EvalParams {
    int episodes = 200;  // per seed
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    ControllerGains gains{};
    TrackingParams tracking{};
    ExpertParams expert{};
    bool compute_reference = true;
};

/// Episodes for one seed: draws depend only on (maze, seed), never on the
/// method under test.
std::vector<Episode> make_episodes(const MazeSpec& maze, std::uint64_t seed, int n,
                                   const EvalParams& params);

struct EpisodeRecord {
    std::uint64_t seed = 0;
    int index = 0;
    MazeState start;
    Vec2 goal;
    double goal_radius = 0.0;
    bool planner_error = false;  // plan() threw; counted as failure
    bool success = false;
    bool reached_any = false;
    int collisions = 0;
    int steps_used = 0;
    double point_feasibility = 0.0;
    double segment_feasibility = 0.0;
    double plan_length = 0.0;
    double reference_length = -1.0;
    double normalized_length = -1.0;  // < 0 when no reference
};

struct EvalReport {
    std::string method;
    int n_episodes = 0;
    double success_rate = 0.0;
    double success_std = 0.0;  // across per-seed means
    double reached_any_rate = 0.0;
    double point_feasibility = 0.0;
    double segment_feasibility = 0.0;
    double normalized_length_mean = 0.0;  // successful episodes with a reference
    int normalized_length_count = 0;
    double collisions_mean = 0.0;
    std::vector<EpisodeRecord> episodes;
};

/// Plan and execute every episode with one method. Episode lists must come
/// from make_episodes so methods stay paired.
EvalReport evaluate_method(const MazeSpec& maze, const Planner& planner,
                           const std::vector<std::vector<Episode>>& per_seed,
                           const EvalParams& params);

/// Shared episodes, one report per method.
std::vector<EvalReport> run_benchmark(const MazeSpec& maze,
                                      const std::vector<Planner>& methods,
                                      const EvalParams& params);

/// Fixed-width comparison table (one row per report).
std::string comparison_table(const std::vector<EvalReport>& reports);

/// Machine-readable report (JSON: aggregates plus per-episode records).
void save_report_json(const EvalReport& report, const std::filesystem::path& path);

}  // namespace cdrb
