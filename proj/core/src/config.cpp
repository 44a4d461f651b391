#include "cdrb/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "cdrb/errors.hpp"
#include "cdrb/textio.hpp"

namespace cdrb {

namespace {

struct Field {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

long long parse_int(const std::string& v, const char* key) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError(std::string("config: bad integer for ") + key + ": '" + v + "'");
    return x;
}

double parse_real(const std::string& v, const char* key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError(std::string("config: bad number for ") + key + ": '" + v + "'");
    return x;
}

Field f_int(const char* key, int RunConfig::* m) {
    return {key, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [key, m](RunConfig& c, const std::string& v) {
                c.*m = static_cast<int>(parse_int(v, key));
            }};
}

Field f_u64(const char* key, std::uint64_t RunConfig::* m) {
    return {key, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [key, m](RunConfig& c, const std::string& v) {
                char* end = nullptr;
                c.*m = std::strtoull(v.c_str(), &end, 10);
                if (v.empty() || end != v.c_str() + v.size())
                    throw ConfigError(std::string("config: bad integer for ") + key);
            }};
}

Field f_real(const char* key, double RunConfig::* m) {
    return {key, [m](const RunConfig& c) { return fmt_g17(c.*m); },
            [key, m](RunConfig& c, const std::string& v) { c.*m = parse_real(v, key); }};
}

Field f_str(const char* key, std::string RunConfig::* m) {
    return {key, [m](const RunConfig& c) { return c.*m; },
            [m](RunConfig& c, const std::string& v) { c.*m = v; }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        f_str("maze", &RunConfig::maze),
        f_str("maze_file", &RunConfig::maze_file),
        f_int("demos", &RunConfig::demos),
        f_int("horizon", &RunConfig::horizon),
        f_int("keep_actions", &RunConfig::keep_actions),
        f_str("index", &RunConfig::index),
        f_int("kmeans_k", &RunConfig::kmeans_k),
        f_int("kmeans_iters", &RunConfig::kmeans_iters),
        f_real("d_max_override", &RunConfig::d_max_override),
        f_str("schedule", &RunConfig::schedule),
        f_int("diffusion_steps", &RunConfig::diffusion_steps),
        f_str("sampler", &RunConfig::sampler),
        f_int("pin", &RunConfig::pin),
        f_int("include_actions", &RunConfig::include_actions),
        f_str("backbone", &RunConfig::backbone),
        f_int("hidden", &RunConfig::hidden),
        f_int("depth", &RunConfig::depth),
        f_int("embed_dim", &RunConfig::embed_dim),
        f_int("channels", &RunConfig::channels),
        f_int("kernel", &RunConfig::kernel),
        f_int("train_steps", &RunConfig::train_steps),
        f_int("batch", &RunConfig::batch),
        f_real("lr", &RunConfig::lr),
        f_real("inflate_margin", &RunConfig::inflate_margin),
        f_int("expert_grid", &RunConfig::expert_grid),
        f_real("waypoint_spacing", &RunConfig::waypoint_spacing),
        f_real("kp", &RunConfig::kp),
        f_real("kd", &RunConfig::kd),
        f_real("capture_radius", &RunConfig::capture_radius),
        f_int("waypoint_budget", &RunConfig::waypoint_budget),
        f_int("step_cap", &RunConfig::step_cap),
        f_int("episodes", &RunConfig::episodes),
        f_str("seeds", &RunConfig::seeds),
        f_u64("seed", &RunConfig::seed),
        f_str("out_dir", &RunConfig::out_dir),
    };
    return f;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

}  // namespace

std::string RunConfig::to_text() const {
    std::ostringstream out;
    for (const Field& f : fields()) out << f.key << " = " << f.get(*this) << "\n";
    return out.str();
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        bool matched = false;
        for (const Field& f : fields()) {
            if (key == f.key) {
                f.set(cfg, value);
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("config: cannot open " + path.string() + " for writing");
    f << to_text();
    if (!f.good()) throw IoError("config: write failed for " + path.string());
}

std::vector<std::uint64_t> RunConfig::seed_list() const {
    std::vector<std::uint64_t> out;
    std::string cur;
    std::istringstream in(seeds);
    while (std::getline(in, cur, ',')) {
        const std::string t = trim(cur);
        if (t.empty()) continue;
        char* end = nullptr;
        out.push_back(std::strtoull(t.c_str(), &end, 10));
        if (end != t.c_str() + t.size())
            throw ConfigError("config: bad seed list entry '" + t + "'");
    }
    if (out.empty()) throw ConfigError("config: empty seed list");
    return out;
}

void RunConfig::validate() const {
    const auto want = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(std::string("config: ") + msg);
    };
    want(demos > 0, "demos must be positive");
    want(horizon >= 1, "horizon must be at least 1");
    want(index == "kdtree" || index == "brute", "index must be kdtree or brute");
    want(kmeans_k >= 0, "kmeans_k must be nonnegative");
    want(kmeans_iters >= 0, "kmeans_iters must be nonnegative");
    want(d_max_override >= 0.0, "d_max_override must be nonnegative");
    want(schedule == "linear" || schedule == "log", "schedule must be linear or log");
    want(diffusion_steps >= 2, "diffusion_steps must be at least 2");
    want(sampler == "alg2" || sampler == "eq5", "sampler must be alg2 or eq5");
    want(backbone == "mlp" || backbone == "tcn", "backbone must be mlp or tcn");
    want(hidden > 0 && depth > 0 && embed_dim > 0 && channels > 0, "model sizes must be positive");
    want(kernel > 0 && kernel % 2 == 1, "kernel must be odd and positive");
    want(train_steps >= 0, "train_steps must be nonnegative");
    want(batch > 0, "batch must be positive");
    want(lr > 0.0, "lr must be positive");
    want(inflate_margin >= 0.0, "inflate_margin must be nonnegative");
    want(expert_grid >= 8, "expert_grid must be at least 8");
    want(waypoint_spacing > 0.0, "waypoint_spacing must be positive");
    want(kp >= 0.0 && kd >= 0.0 && (kp > 0.0 || kd > 0.0), "gains must be nonnegative, not both zero");
    want(capture_radius > 0.0, "capture_radius must be positive");
    want(waypoint_budget > 0, "waypoint_budget must be positive");
    want(step_cap > 0, "step_cap must be positive");
    want(episodes > 0, "episodes must be positive");
    seed_list();
}

}  // namespace cdrb
