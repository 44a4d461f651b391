#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cdrb {

/// Every run-affecting knob with its documented default. Round-trips through
/// key=value text unchanged; unknown keys are errors.
struct RunConfig {
    // world
    std::string maze = "maze";      // preset name, or a file path via maze_file
    std::string maze_file;          // overrides the preset when nonempty

    // dataset
    int demos = 200;
    int horizon = 48;
    int keep_actions = 1;           // store actions in the dataset

    // buffer
    std::string index = "kdtree";   // kdtree | brute
    int kmeans_k = 0;               // 0 = no compression
    int kmeans_iters = 25;
    double d_max_override = 0.0;    // 0 = half bounding-box diagonal

    // schedule / sampler
    std::string schedule = "linear";  // linear | log
    int diffusion_steps = 50;
    std::string sampler = "alg2";     // alg2 | eq5
    int pin = 1;
    int include_actions = 0;          // diffuse state-action entries

    // model
    std::string backbone = "mlp";   // mlp | tcn
    int hidden = 512;
    int depth = 3;
    int embed_dim = 64;
    int channels = 64;
    int kernel = 5;

    // training
    int train_steps = 20000;
    int batch = 64;
    double lr = 3e-4;

    // expert
    double inflate_margin = 0.12;
    int expert_grid = 128;
    double waypoint_spacing = 0.25;

    // controller
    double kp = 4.0;
    double kd = 1.0;
    double capture_radius = 0.15;
    int waypoint_budget = 10;
    int step_cap = 800;

    // eval
    int episodes = 40;              // per seed
    std::string seeds = "1,2,3,4,5";

    // run
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    std::string to_text() const;
    static RunConfig parse(std::string_view text);
    static RunConfig from_file(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::vector<std::uint64_t> seed_list() const;
    void validate() const;
};

}  // namespace cdrb
