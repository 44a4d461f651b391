#include "cdrb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cdrb {

Feasibility plan_feasibility(const Trajectory& plan, const MazeSpec& maze) {
    if (plan.states.empty()) throw ConfigError("plan_feasibility: empty plan");
    Feasibility f;
    std::size_t pts = 0;
    for (const MazeState& s : plan.states)
        if (point_feasible(s.pos, maze)) ++pts;
    f.point_frac = static_cast<double>(pts) / static_cast<double>(plan.states.size());
    if (plan.states.size() < 2) {
        f.segment_frac = 1.0;
        return f;
    }
    std::size_t segs = 0;
    for (std::size_t i = 0; i + 1 < plan.states.size(); ++i)
        if (segment_feasible(plan.states[i].pos, plan.states[i + 1].pos, maze)) ++segs;
    f.segment_frac = static_cast<double>(segs) / static_cast<double>(plan.states.size() - 1);
    return f;
}

double normalized_path_length(const Trajectory& plan, double reference_length) {
    if (reference_length <= 0.0)
        throw ConfigError("normalized_path_length: reference must be positive");
    return path_length(plan) / reference_length;
}

std::vector<Episode> make_episodes(const MazeSpec& maze, std::uint64_t seed, int n,
                                   const EvalParams& params) {
    const Rng root(seed);
    std::vector<Episode> out;
    out.reserve(n);
    for (int e = 0; e < n; ++e) {
        Rng er = root.stream("episode", static_cast<std::uint64_t>(e));
        Episode ep;
        ep.start = sample_start(maze, er);
        ep.goal = maze.goals[er.uniform_index(maze.goals.size())];
        if (params.compute_reference) {
            const DemoResult ref = expert_demo_for(maze, ep.start, ep.goal, params.expert);
            if (ref.success) ep.reference_length = path_length(ref.traj);
        }
        out.push_back(ep);
    }
    return out;
}

EvalReport evaluate_method(const MazeSpec& maze, const Planner& planner,
                           const std::vector<std::vector<Episode>>& per_seed,
                           const EvalParams& params) {
    if (per_seed.size() != params.seeds.size())
        throw ConfigError("evaluate_method: episode lists do not match seeds");

    EvalReport rep;
    rep.method = planner.name;
    std::vector<double> seed_success;
    double sum_success = 0, sum_any = 0, sum_pt = 0, sum_seg = 0, sum_coll = 0;
    double sum_norm = 0;
    int norm_count = 0;

    for (std::size_t si = 0; si < params.seeds.size(); ++si) {
        const std::uint64_t seed = params.seeds[si];
        const Rng root(seed);
        const std::string plan_stream = "plan/" + planner.name;
        int seed_hits = 0;

        for (std::size_t e = 0; e < per_seed[si].size(); ++e) {
            const Episode& ep = per_seed[si][e];
            EpisodeRecord rec;
            rec.seed = seed;
            rec.index = static_cast<int>(e);
            rec.start = ep.start;
            rec.goal = ep.goal.center;
            rec.goal_radius = ep.goal.radius;
            rec.reference_length = ep.reference_length;

            Rng pr = root.stream(plan_stream, static_cast<std::uint64_t>(e));
            Trajectory plan;
            try {
                plan = planner.plan(ep.start, ep.goal.center, pr);
                if (plan.states.size() < 2)
                    throw PlanningError("planner returned fewer than 2 states");
            } catch (const std::exception&) {
                rec.planner_error = true;  // recorded as a failed episode
                rep.episodes.push_back(rec);
                continue;
            }

            const Feasibility f = plan_feasibility(plan, maze);
            rec.point_feasibility = f.point_frac;
            rec.segment_feasibility = f.segment_frac;
            rec.plan_length = path_length(plan);

            const ExecutionResult run = execute_plan(maze, plan, params.gains,
                                                     ep.goal.center, ep.goal.radius,
                                                     params.tracking);
            rec.success = run.success;
            rec.reached_any = run.reached_goal_any;
            rec.collisions = run.collisions;
            rec.steps_used = run.steps_used;
            if (ep.reference_length > 0.0)
                rec.normalized_length = rec.plan_length / ep.reference_length;

            if (rec.success) {
                ++seed_hits;
                if (rec.normalized_length >= 0.0) {
                    sum_norm += rec.normalized_length;
                    ++norm_count;
                }
            }
            sum_success += rec.success ? 1.0 : 0.0;
            sum_any += rec.reached_any ? 1.0 : 0.0;
            sum_pt += rec.point_feasibility;
            sum_seg += rec.segment_feasibility;
            sum_coll += rec.collisions;
            rep.episodes.push_back(rec);
        }
        const std::size_t n_seed = per_seed[si].size();
        seed_success.push_back(n_seed ? static_cast<double>(seed_hits) / n_seed : 0.0);
    }

    const std::size_t n = rep.episodes.size();
    rep.n_episodes = static_cast<int>(n);
    if (n > 0) {
        rep.success_rate = sum_success / n;
        rep.reached_any_rate = sum_any / n;
        rep.point_feasibility = sum_pt / n;
        rep.segment_feasibility = sum_seg / n;
        rep.collisions_mean = sum_coll / n;
    }
    rep.normalized_length_mean = norm_count ? sum_norm / norm_count : 0.0;
    rep.normalized_length_count = norm_count;
    if (seed_success.size() > 1) {
        double mean = 0;
        for (double v : seed_success) mean += v;
        mean /= seed_success.size();
        double var = 0;
        for (double v : seed_success) var += (v - mean) * (v - mean);
        rep.success_std = std::sqrt(var / (seed_success.size() - 1));
    }
    return rep;
}

std::vector<EvalReport> run_benchmark(const MazeSpec& maze,
                                      const std::vector<Planner>& methods,
                                      const EvalParams& params) {
    std::vector<std::vector<Episode>> per_seed;
    per_seed.reserve(params.seeds.size());
    for (std::uint64_t seed : params.seeds)
        per_seed.push_back(make_episodes(maze, seed, params.episodes, params));

    std::vector<EvalReport> reports;
    reports.reserve(methods.size());
    for (const Planner& m : methods)
        reports.push_back(evaluate_method(maze, m, per_seed, params));
    return reports;
}

std::string comparison_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %-14s %9s %9s %9s %9s %9s\n", "method",
                  "success", "reach-any", "pt-feas", "seg-feas", "norm-len", "collide");
    out << line;
    out << std::string(78, '-') << "\n";
    for (const EvalReport& r : reports) {
        char succ[32];
        std::snprintf(succ, sizeof succ, "%.3f+-%.3f", r.success_rate, r.success_std);
        std::snprintf(line, sizeof line, "%-12s %-14s %9.3f %9.3f %9.3f %9.3f %9.2f\n",
                      r.method.c_str(), succ, r.reached_any_rate, r.point_feasibility,
                      r.segment_feasibility, r.normalized_length_mean, r.collisions_mean);
        out << line;
    }
    return out.str();
}

void save_report_json(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["method"] = report.method;
    j["n_episodes"] = report.n_episodes;
    j["success_rate"] = report.success_rate;
    j["success_std"] = report.success_std;
    j["reached_any_rate"] = report.reached_any_rate;
    j["point_feasibility"] = report.point_feasibility;
    j["segment_feasibility"] = report.segment_feasibility;
    j["normalized_length_mean"] = report.normalized_length_mean;
    j["normalized_length_count"] = report.normalized_length_count;
    j["collisions_mean"] = report.collisions_mean;
    nlohmann::json eps = nlohmann::json::array();
    for (const EpisodeRecord& r : report.episodes) {
        nlohmann::json e;
        e["seed"] = r.seed;
        e["index"] = r.index;
        e["start"] = {r.start.pos.x, r.start.pos.y, r.start.vel.x, r.start.vel.y};
        e["goal"] = {r.goal.x, r.goal.y};
        e["goal_radius"] = r.goal_radius;
        e["planner_error"] = r.planner_error;
        e["success"] = r.success;
        e["reached_any"] = r.reached_any;
        e["collisions"] = r.collisions;
        e["steps_used"] = r.steps_used;
        e["point_feasibility"] = r.point_feasibility;
        e["segment_feasibility"] = r.segment_feasibility;
        e["plan_length"] = r.plan_length;
        e["reference_length"] = r.reference_length;
        e["normalized_length"] = r.normalized_length;
        eps.push_back(std::move(e));
    }
    j["episodes"] = std::move(eps);

    std::ofstream f(path);
    if (!f) throw IoError("save_report_json: cannot open " + path.string());
    f << j.dump(2) << "\n";
    if (!f.good()) throw IoError("save_report_json: write failed for " + path.string());
}

}  // namespace cdrb
