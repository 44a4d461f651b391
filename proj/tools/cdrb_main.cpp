// cdrb: demo generation, diffusion training, planning, evaluation, ablations.
//
// One binary, subcommand style. Every run is a pure function of
// (config file, flags, input files, seed); artifacts land under --out-dir.
// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numeric/planning failure,
// 5 threshold failure (selftest).

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdrb/config.hpp"
#include "cdrb/diffusion.hpp"
#include "cdrb/errors.hpp"
#include "cdrb/eval.hpp"
#include "cdrb/selftest.hpp"
#include "cdrb/svg.hpp"
#include "cdrb/textio.hpp"

namespace fs = std::filesystem;
using namespace cdrb;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

MazeSpec maze_from(const RunConfig& cfg) {
    MazeSpec maze = cfg.maze_file.empty() ? MazeSpec::preset(cfg.maze)
                                          : MazeSpec::from_file(cfg.maze_file);
    maze.validate();
    return maze;
}

ExpertParams expert_from(const RunConfig& cfg) {
    ExpertParams p;
    p.inflate_margin = cfg.inflate_margin;
    p.grid_resolution = cfg.expert_grid;
    p.waypoint_spacing = cfg.waypoint_spacing;
    p.gains = {cfg.kp, cfg.kd};
    p.tracking = {cfg.capture_radius, cfg.waypoint_budget, cfg.step_cap};
    return p;
}

EvalParams eval_from(const RunConfig& cfg) {
    EvalParams p;
    p.episodes = cfg.episodes;
    p.seeds = cfg.seed_list();
    p.gains = {cfg.kp, cfg.kd};
    p.tracking = {cfg.capture_radius, cfg.waypoint_budget, cfg.step_cap};
    p.expert = expert_from(cfg);
    return p;
}

IndexKind index_from(const RunConfig& cfg) {
    return cfg.index == "brute" ? IndexKind::brute : IndexKind::kdtree;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / name;
}

std::vector<std::vector<double>> latents_of(const DemoDataset& ds, const LatentSpec& spec) {
    std::vector<std::vector<double>> out;
    out.reserve(ds.size());
    for (const Trajectory& t : ds.trajectories) out.push_back(to_latent(t, spec));
    return out;
}

NetConfig net_config_from(const RunConfig& cfg, const LatentSpec& spec) {
    NetConfig nc;
    nc.backbone = backbone_from_string(cfg.backbone);
    nc.horizon = spec.horizon;
    nc.entry_dim = spec.entry_dim();
    nc.diffusion_steps = cfg.diffusion_steps;
    nc.hidden = cfg.hidden;
    nc.depth = cfg.depth;
    nc.embed_dim = cfg.embed_dim;
    nc.channels = cfg.channels;
    nc.kernel = cfg.kernel;
    nc.validate();
    return nc;
}

void save_loss_curve(const std::vector<double>& loss, const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("loss curve: cannot open " + path.string() + " for writing");
    for (double v : loss) f << fmt_g17(v) << "\n";
    if (!f.good()) throw IoError("loss curve: write failed for " + path.string());
}

struct TrainedArtifacts {
    Checkpoint ck;
    TrainResult result;
};

// Shared by `train` and the training-based ablations.
TrainedArtifacts train_method(const RunConfig& cfg, const std::string& method,
                              const DemoDataset& ds) {
    const LatentSpec spec = LatentSpec::from_dataset(ds, cfg.include_actions != 0);
    const auto latents = latents_of(ds, spec);
    const NetConfig nc = net_config_from(cfg, spec);

    RestorationNet net = RestorationNet::init(nc, cfg.seed);
    OptimizerState opt = OptimizerState::init(net.params.size(), cfg.lr);
    TrainConfig tc;
    tc.steps = cfg.train_steps;
    tc.batch = cfg.batch;
    tc.pin = cfg.pin != 0;
    tc.seed = cfg.seed;

    Checkpoint ck;
    ck.method = method;
    ck.maze_id = ds.maze_id;
    ck.latent = spec;
    ck.net_cfg = nc;

    TrainResult tr;
    if (method == "cdrb") {
        const ReplayBuffer buf =
            build_buffer(ds, cfg.include_actions != 0, index_from(cfg), cfg.d_max_override);
        DistanceSchedule sched;
        sched.kind = schedule_kind_from_string(cfg.schedule);
        sched.d_max = buf.d_max();
        sched.t = cfg.diffusion_steps;
        tr = train_restoration(latents, buf, sched, net, opt, tc);
        ck.sched_kind = sched.kind;
        ck.d_max = sched.d_max;
    } else if (method == "gaussian") {
        const NoiseSchedule ns = NoiseSchedule::cosine(cfg.diffusion_steps);
        tr = train_gaussian(latents, ns, net, opt, tc);
    } else {
        throw ConfigError("train: method must be cdrb or gaussian, got '" + method + "'");
    }
    ck.params = net.params;
    return {std::move(ck), std::move(tr)};
}

// Planner backed by a checkpoint. CDRB rebuilds its buffer from the dataset
// the checkpoint was trained on, keeping the training-time d_max.
Planner planner_from_checkpoint(const Checkpoint& ck, const RunConfig& cfg,
                                const DemoDataset* ds, const std::string& name) {
    if (ck.method == "cdrb") {
        if (!ds) throw ConfigError("cdrb checkpoint needs --dataset for its buffer");
        ReplayBuffer buf =
            build_buffer(*ds, ck.latent.action_dim > 0, index_from(cfg), ck.d_max);
        if (cfg.kmeans_k > 0) {
            Rng rng = Rng(cfg.seed).stream("kmeans");
            buf = buf.kmeans_compress(static_cast<std::size_t>(cfg.kmeans_k),
                                      cfg.kmeans_iters, rng);
        }
        SamplerConfig sc;
        sc.schedule = DistanceSchedule{ck.sched_kind, ck.d_max, ck.net_cfg.diffusion_steps};
        sc.kind = sampler_kind_from_string(cfg.sampler);
        sc.pin = cfg.pin != 0;
        return make_cdrb_planner(name, ck.net(), std::move(buf), sc, ck.latent);
    }
    if (ck.method == "gaussian")
        return make_gaussian_planner(name, ck.net(), ck.latent, cfg.pin != 0);
    throw ConfigError("checkpoint method '" + ck.method + "' is not plannable");
}

int cmd_gen_demos(const RunConfig& cfg, const std::string& out) {
    Timer timer;
    const MazeSpec maze = maze_from(cfg);
    DatasetParams dp;
    dp.num_demos = cfg.demos;
    dp.horizon = cfg.horizon;
    dp.keep_actions = cfg.keep_actions != 0;
    dp.expert = expert_from(cfg);
    const DemoDataset ds = generate_dataset(maze, cfg.seed, dp);

    double mean_len = 0.0;
    for (const Trajectory& t : ds.trajectories) mean_len += path_length(t);
    mean_len /= static_cast<double>(ds.size());

    const fs::path path = out.empty() ? out_path(cfg, "dataset.txt") : fs::path(out);
    if (!out.empty() && path.has_parent_path()) fs::create_directories(path.parent_path());
    save_dataset(ds, path);
    std::printf("dataset: %zu trajectories, horizon %d, actions %s, mean path %.2f\n",
                ds.size(), ds.horizon, ds.has_actions ? "yes" : "no", mean_len);
    std::printf("wrote %s (%.1fs)\n", path.string().c_str(), timer.seconds());
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& method, const std::string& dataset,
              const std::string& out) {
    Timer timer;
    const fs::path ds_path = dataset.empty() ? out_path(cfg, "dataset.txt") : fs::path(dataset);
    const DemoDataset ds = load_dataset(ds_path);
    TrainedArtifacts art = train_method(cfg, method, ds);

    const fs::path ck_path = out.empty() ? out_path(cfg, method + ".ckpt") : fs::path(out);
    if (!out.empty() && ck_path.has_parent_path()) fs::create_directories(ck_path.parent_path());
    save_checkpoint(art.ck, ck_path);
    save_loss_curve(art.result.loss, out_path(cfg, method + "_loss.txt"));

    const auto& loss = art.result.loss;
    std::printf("train %s: %zu params, %zu steps, loss %.5f -> %.5f\n", method.c_str(),
                art.ck.params.size(), loss.size(), loss.empty() ? 0.0 : loss.front(),
                loss.empty() ? 0.0 : loss.back());
    std::printf("wrote %s (%.1fs)\n", ck_path.string().c_str(), timer.seconds());
    return 0;
}

int cmd_plan(const RunConfig& cfg, const std::string& checkpoint, const std::string& dataset,
             std::vector<double> start_xy, std::vector<double> goal_xy, int episode,
             bool execute, const std::string& out, const std::string& svg) {
    Timer timer;
    const MazeSpec maze = maze_from(cfg);
    const Checkpoint ck = load_checkpoint(checkpoint);
    if (ck.maze_id != maze.id)
        std::fprintf(stderr, "note: checkpoint trained on '%s', planning in '%s'\n",
                     ck.maze_id.c_str(), maze.id.c_str());

    std::optional<DemoDataset> ds;
    if (ck.method == "cdrb") {
        const fs::path p = dataset.empty() ? out_path(cfg, "dataset.txt") : fs::path(dataset);
        ds = load_dataset(p);
    }
    const Planner planner =
        planner_from_checkpoint(ck, cfg, ds ? &*ds : nullptr, ck.method);

    MazeState start;
    GoalRegion goal;
    if (start_xy.size() == 2 && goal_xy.size() == 2) {
        start.pos = {start_xy[0], start_xy[1]};
        goal.center = {goal_xy[0], goal_xy[1]};
        if (!maze.goals.empty()) goal.radius = maze.goals.front().radius;
    } else if (start_xy.empty() && goal_xy.empty()) {
        EvalParams ep = eval_from(cfg);
        ep.compute_reference = false;
        const auto eps = make_episodes(maze, cfg.seed, episode + 1, ep);
        start = eps.back().start;
        goal = eps.back().goal;
    } else {
        throw ConfigError("plan: give both --start and --goal, or neither");
    }

    Rng rng = Rng(cfg.seed).stream("plan/" + planner.name, static_cast<std::uint64_t>(episode));
    const Trajectory plan = planner.plan(start, goal.center, rng);
    const Feasibility feas = plan_feasibility(plan, maze);

    const fs::path path = out.empty() ? out_path(cfg, "plan.txt") : fs::path(out);
    if (!out.empty() && path.has_parent_path()) fs::create_directories(path.parent_path());
    save_trajectory(plan, path);

    std::printf("plan %s: start (%.2f, %.2f) goal (%.2f, %.2f)\n", planner.name.c_str(),
                start.pos.x, start.pos.y, goal.center.x, goal.center.y);
    std::printf("  feasibility: points %.1f%%, segments %.1f%%, length %.2f\n",
                100.0 * feas.point_frac, 100.0 * feas.segment_frac, path_length(plan));

    std::vector<SvgPath> art;
    art.push_back({plan, "#d62728", 2.0});
    if (execute) {
        const ExecutionResult ex = execute_plan(maze, plan, {cfg.kp, cfg.kd}, goal.center,
                                                goal.radius,
                                                {cfg.capture_radius, cfg.waypoint_budget,
                                                 cfg.step_cap});
        std::printf("  executed: %s, %d collisions, %d steps\n",
                    ex.success ? "success" : "failure", ex.collisions, ex.steps_used);
        art.push_back({ex.executed, "#1f77b4", 1.5});
    }
    if (!svg.empty()) {
        write_maze_svg(maze, art, svg);
        std::printf("wrote %s\n", svg.c_str());
    }
    std::printf("wrote %s (%.1fs)\n", path.string().c_str(), timer.seconds());
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& checkpoints,
             const std::string& dataset, bool with_projection, bool with_oracle,
             bool with_blind) {
    Timer timer;
    const MazeSpec maze = maze_from(cfg);

    std::optional<DemoDataset> ds;
    const auto need_dataset = [&]() -> const DemoDataset& {
        if (!ds) {
            const fs::path p =
                dataset.empty() ? out_path(cfg, "dataset.txt") : fs::path(dataset);
            ds = load_dataset(p);
        }
        return *ds;
    };

    std::vector<Planner> methods;
    const auto unique_name = [&](std::string base) {
        int n = 1;
        std::string name = base;
        for (std::size_t i = 0; i < methods.size();) {
            if (methods[i].name == name) {
                name = base + "-" + std::to_string(++n);
                i = 0;
            } else {
                ++i;
            }
        }
        return name;
    };

    for (const std::string& path : checkpoints) {
        const Checkpoint ck = load_checkpoint(path);
        if (ck.maze_id != maze.id)
            std::fprintf(stderr, "note: %s trained on '%s', evaluating in '%s'\n",
                         path.c_str(), ck.maze_id.c_str(), maze.id.c_str());
        const DemoDataset* dsp = ck.method == "cdrb" ? &need_dataset() : nullptr;
        methods.push_back(planner_from_checkpoint(ck, cfg, dsp, unique_name(ck.method)));
    }
    if (with_projection) {
        const DemoDataset& d = need_dataset();
        const LatentSpec spec = LatentSpec::from_dataset(d, cfg.include_actions != 0);
        ReplayBuffer buf =
            build_buffer(d, cfg.include_actions != 0, index_from(cfg), cfg.d_max_override);
        methods.push_back(
            make_projection_planner(unique_name("projection"), std::move(buf), spec));
    }
    if (with_oracle)
        methods.push_back(make_oracle_planner(unique_name("oracle"), maze, expert_from(cfg)));
    if (with_blind) methods.push_back(make_blind_planner(unique_name("blind"), cfg.horizon));
    if (methods.empty())
        throw ConfigError("eval: no methods (give checkpoints or --projection/--oracle/--blind)");

    const EvalParams params = eval_from(cfg);
    const std::vector<EvalReport> reports = run_benchmark(maze, methods, params);
    const std::string table = comparison_table(reports);
    std::fputs(table.c_str(), stdout);

    for (const EvalReport& r : reports)
        save_report_json(r, out_path(cfg, "eval_" + r.method + ".json"));
    {
        const fs::path tp = out_path(cfg, "comparison.txt");
        std::ofstream f(tp);
        if (!f) throw IoError("eval: cannot open " + tp.string() + " for writing");
        f << table;
    }
    std::printf("wrote %s (%.1fs)\n", out_path(cfg, "comparison.txt").string().c_str(),
                timer.seconds());
    return 0;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        while (!cur.empty() && std::isspace(static_cast<unsigned char>(cur.front())))
            cur.erase(cur.begin());
        while (!cur.empty() && std::isspace(static_cast<unsigned char>(cur.back())))
            cur.pop_back();
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

void write_table(const RunConfig& cfg, const std::string& kind,
                 const std::vector<std::string>& lines) {
    const fs::path path = out_path(cfg, "ablate_" + kind + ".txt");
    std::ofstream f(path);
    if (!f) throw IoError("ablate: cannot open " + path.string() + " for writing");
    for (const std::string& l : lines) {
        f << l << "\n";
        std::puts(l.c_str());
    }
    std::printf("wrote %s\n", path.string().c_str());
}

int cmd_ablate(const RunConfig& cfg, const std::string& kind, const std::string& grid,
               const std::string& checkpoint, const std::string& dataset) {
    const MazeSpec maze = maze_from(cfg);
    const fs::path ds_path = dataset.empty() ? out_path(cfg, "dataset.txt") : fs::path(dataset);
    const DemoDataset ds = load_dataset(ds_path);
    const EvalParams params = eval_from(cfg);

    const auto success_of = [&](const Planner& planner) {
        std::vector<std::vector<Episode>> per_seed;
        for (std::uint64_t s : params.seeds)
            per_seed.push_back(make_episodes(maze, s, params.episodes, params));
        return evaluate_method(maze, planner, per_seed, params);
    };

    if (kind == "kmeans_size") {
        if (checkpoint.empty()) throw ConfigError("ablate kmeans_size needs --checkpoint");
        const Checkpoint ck = load_checkpoint(checkpoint);
        if (ck.method != "cdrb") throw ConfigError("ablate kmeans_size needs a cdrb checkpoint");
        const ReplayBuffer full =
            build_buffer(ds, ck.latent.action_dim > 0, index_from(cfg), ck.d_max);
        const SamplerConfig sc{
            DistanceSchedule{ck.sched_kind, ck.d_max, ck.net_cfg.diffusion_steps},
            sampler_kind_from_string(cfg.sampler), cfg.pin != 0};

        // Fixed probe set for the degradation timing.
        const auto latents = latents_of(ds, ck.latent);
        const int probe = static_cast<int>(std::min<std::size_t>(latents.size(), 64));
        const int k_mid = std::max(1, ck.net_cfg.diffusion_steps / 2);

        std::vector<std::string> lines;
        lines.push_back("fraction\tsize\tsuccess\tdegrade_ms");
        for (const std::string& g : split_csv(grid.empty() ? "1.0,0.5,0.25,0.1" : grid)) {
            const double f = std::stod(g);
            if (!(f > 0.0 && f <= 1.0))
                throw ConfigError("ablate kmeans_size: fraction must be in (0, 1]");
            ReplayBuffer buf = full;
            if (f < 1.0) {
                Rng rng = Rng(cfg.seed).stream("kmeans");
                const auto k = static_cast<std::size_t>(
                    std::max(1.0, std::round(f * static_cast<double>(full.size()))));
                buf = full.kmeans_compress(k, cfg.kmeans_iters, rng);
            }
            Rng trng = Rng(cfg.seed).stream("ablate/degrade-timing");
            Timer timer;
            for (int i = 0; i < probe; ++i)
                degrade_cdrb(latents[i % latents.size()], k_mid, buf, sc.schedule, trng);
            const double ms = 1e3 * timer.seconds() / probe;
            const EvalReport rep =
                success_of(make_cdrb_planner("cdrb", ck.net(), buf, sc, ck.latent));
            char row[128];
            std::snprintf(row, sizeof row, "%.2f\t%zu\t%.3f\t%.3f", f, buf.size(),
                          rep.success_rate, ms);
            lines.emplace_back(row);
        }
        write_table(cfg, kind, lines);
        return 0;
    }

    if (kind == "schedule") {
        std::vector<std::string> lines;
        lines.push_back("schedule\tfinal_loss\tsteps_to_half\tsuccess\tstd");
        for (const std::string& g : split_csv(grid.empty() ? "linear,log" : grid)) {
            RunConfig c = cfg;
            c.schedule = g;
            const TrainedArtifacts art = train_method(c, "cdrb", ds);
            save_loss_curve(art.result.loss, out_path(cfg, "ablate_schedule_" + g + "_loss.txt"));
            const EvalReport rep =
                success_of(planner_from_checkpoint(art.ck, c, &ds, "cdrb-" + g));
            char row[160];
            std::snprintf(row, sizeof row, "%s\t%.5f\t%d\t%.3f\t%.3f", g.c_str(),
                          art.result.loss.back(), steps_to_half_loss(art.result.loss),
                          rep.success_rate, rep.success_std);
            lines.emplace_back(row);
        }
        write_table(cfg, kind, lines);
        return 0;
    }

    if (kind == "steps_t") {
        std::vector<std::string> lines;
        lines.push_back("t\tfinal_loss\tsuccess\tstd");
        for (const std::string& g : split_csv(grid.empty() ? "10,25,50" : grid)) {
            RunConfig c = cfg;
            c.diffusion_steps = std::stoi(g);
            const TrainedArtifacts art = train_method(c, "cdrb", ds);
            const EvalReport rep =
                success_of(planner_from_checkpoint(art.ck, c, &ds, "cdrb-t" + g));
            char row[128];
            std::snprintf(row, sizeof row, "%d\t%.5f\t%.3f\t%.3f", c.diffusion_steps,
                          art.result.loss.back(), rep.success_rate, rep.success_std);
            lines.emplace_back(row);
        }
        write_table(cfg, kind, lines);
        return 0;
    }

    if (kind == "action_inclusion") {
        if (!ds.has_actions)
            throw ConfigError("ablate action_inclusion needs a dataset with actions");
        std::vector<std::string> lines;
        lines.push_back("include_actions\tentry_dim\tfinal_loss\tsuccess\tstd");
        for (const std::string& g : split_csv(grid.empty() ? "0,1" : grid)) {
            RunConfig c = cfg;
            c.include_actions = std::stoi(g);
            const TrainedArtifacts art = train_method(c, "cdrb", ds);
            const EvalReport rep = success_of(
                planner_from_checkpoint(art.ck, c, &ds, "cdrb-a" + g));
            char row[128];
            std::snprintf(row, sizeof row, "%d\t%d\t%.5f\t%.3f\t%.3f", c.include_actions,
                          art.ck.latent.entry_dim(), art.result.loss.back(),
                          rep.success_rate, rep.success_std);
            lines.emplace_back(row);
        }
        write_table(cfg, kind, lines);
        return 0;
    }

    throw ConfigError(
        "ablate: kind must be kmeans_size, schedule, steps_t, or action_inclusion");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    // The config file establishes the baseline; flags parsed below override it.
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string_view a = argv[i];
        if (a == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0)
            config_path = std::string(a.substr(9));
    }

    CLI::App app{"Cold diffusion trajectory planning through a replay buffer"};
    app.require_subcommand(1);

    int threads = 1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--maze", cfg.maze, "maze preset name");
        sub->add_option("--maze-file", cfg.maze_file, "maze config file (overrides preset)");
        sub->add_option("--seed", cfg.seed, "global seed; all streams derive from it");
        sub->add_option("--out-dir", cfg.out_dir, "artifact directory");
        sub->add_option("--threads", threads,
                        "worker-thread cap (this build computes serially)");
        sub->add_option("--demos", cfg.demos, "demonstrations to collect");
        sub->add_option("--horizon", cfg.horizon, "trajectory horizon H");
        sub->add_option("--keep-actions", cfg.keep_actions, "store actions in the dataset");
        sub->add_option("--index", cfg.index, "spatial index: kdtree or brute");
        sub->add_option("--kmeans-k", cfg.kmeans_k, "compress buffer to k points (0 = off)");
        sub->add_option("--kmeans-iters", cfg.kmeans_iters, "Lloyd iterations");
        sub->add_option("--d-max", cfg.d_max_override, "override schedule d_max (0 = auto)");
        sub->add_option("--schedule", cfg.schedule, "distance schedule: linear or log");
        sub->add_option("--steps", cfg.diffusion_steps, "diffusion steps t");
        sub->add_option("--sampler", cfg.sampler, "reverse sampler: alg2 or eq5");
        sub->add_option("--pin", cfg.pin, "pin endpoints (1) or not (0)");
        sub->add_option("--include-actions", cfg.include_actions,
                        "diffuse state-action entries");
        sub->add_option("--backbone", cfg.backbone, "net backbone: mlp or tcn");
        sub->add_option("--hidden", cfg.hidden, "mlp hidden width");
        sub->add_option("--depth", cfg.depth, "hidden/conv layers");
        sub->add_option("--embed-dim", cfg.embed_dim, "step embedding size");
        sub->add_option("--channels", cfg.channels, "tcn channels");
        sub->add_option("--kernel", cfg.kernel, "tcn kernel width (odd)");
        sub->add_option("--train-steps", cfg.train_steps, "optimizer steps");
        sub->add_option("--batch", cfg.batch, "batch size");
        sub->add_option("--lr", cfg.lr, "Adam learning rate");
        sub->add_option("--inflate-margin", cfg.inflate_margin, "expert planning margin");
        sub->add_option("--expert-grid", cfg.expert_grid, "expert A* grid resolution");
        sub->add_option("--waypoint-spacing", cfg.waypoint_spacing, "expert waypoint spacing");
        sub->add_option("--kp", cfg.kp, "controller position gain");
        sub->add_option("--kd", cfg.kd, "controller damping gain");
        sub->add_option("--capture-radius", cfg.capture_radius, "waypoint capture radius");
        sub->add_option("--waypoint-budget", cfg.waypoint_budget, "env steps per waypoint");
        sub->add_option("--step-cap", cfg.step_cap, "env steps per episode");
        sub->add_option("--episodes", cfg.episodes, "eval episodes per seed");
        sub->add_option("--seeds", cfg.seeds, "eval seeds, comma separated");
    };

    // gen-demos
    auto* gen = app.add_subcommand("gen-demos", "collect expert demonstrations");
    std::string gen_out;
    add_common(gen);
    gen->add_option("--out", gen_out, "dataset path (default <out-dir>/dataset.txt)");

    // train
    auto* train = app.add_subcommand("train", "train a restoration net");
    std::string train_method = "cdrb", train_dataset, train_out;
    add_common(train);
    train->add_option("--method", train_method, "cdrb or gaussian");
    train->add_option("--dataset", train_dataset, "dataset path");
    train->add_option("--out", train_out, "checkpoint path (default <out-dir>/<method>.ckpt)");

    // plan
    auto* plan = app.add_subcommand("plan", "plan one trajectory from a checkpoint");
    std::string plan_ck, plan_dataset, plan_out, plan_svg;
    std::vector<double> plan_start, plan_goal;
    int plan_episode = 0;
    bool plan_execute = false;
    add_common(plan);
    plan->add_option("--checkpoint", plan_ck, "trained checkpoint")->required();
    plan->add_option("--dataset", plan_dataset, "dataset path (cdrb buffer source)");
    plan->add_option("--start", plan_start, "start position x y")->expected(2);
    plan->add_option("--goal", plan_goal, "goal position x y")->expected(2);
    plan->add_option("--episode", plan_episode, "episode index when sampling endpoints");
    plan->add_flag("--execute", plan_execute, "run the tracking controller on the plan");
    plan->add_option("--out", plan_out, "trajectory path (default <out-dir>/plan.txt)");
    plan->add_option("--svg", plan_svg, "also render an SVG here");

    // eval
    auto* eval = app.add_subcommand("eval", "benchmark methods on shared episodes");
    std::vector<std::string> eval_cks;
    std::string eval_dataset;
    bool eval_projection = false, eval_oracle = false, eval_blind = false;
    add_common(eval);
    eval->add_option("checkpoints", eval_cks, "checkpoints to evaluate");
    eval->add_option("--dataset", eval_dataset, "dataset path (buffer source)");
    eval->add_flag("--projection", eval_projection, "include the projection strawman");
    eval->add_flag("--oracle", eval_oracle, "include the scripted expert");
    eval->add_flag("--blind", eval_blind, "include the stay-at-start baseline");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "sweep one knob and tabulate");
    std::string ab_kind, ab_grid, ab_ck, ab_dataset;
    add_common(ablate);
    ablate->add_option("--kind", ab_kind,
                       "kmeans_size | schedule | steps_t | action_inclusion")
        ->required();
    ablate->add_option("--grid", ab_grid, "comma-separated sweep values");
    ablate->add_option("--checkpoint", ab_ck, "cdrb checkpoint (kmeans_size)");
    ablate->add_option("--dataset", ab_dataset, "dataset path");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the internal consistency checks");
    (void)selftest;

    try {
        if (!config_path.empty()) cfg = RunConfig::from_file(config_path);

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }
        if (threads < 1) throw ConfigError("--threads must be at least 1");
        cfg.validate();

        if (gen->parsed()) return cmd_gen_demos(cfg, gen_out);
        if (train->parsed()) return cmd_train(cfg, train_method, train_dataset, train_out);
        if (plan->parsed())
            return cmd_plan(cfg, plan_ck, plan_dataset, plan_start, plan_goal, plan_episode,
                            plan_execute, plan_out, plan_svg);
        if (eval->parsed())
            return cmd_eval(cfg, eval_cks, eval_dataset, eval_projection, eval_oracle,
                            eval_blind);
        if (ablate->parsed()) return cmd_ablate(cfg, ab_kind, ab_grid, ab_ck, ab_dataset);
        if (selftest->parsed()) return run_selftest(std::cout) ? 0 : 5;
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const PlanningError& e) {
        std::fprintf(stderr, "planning error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
