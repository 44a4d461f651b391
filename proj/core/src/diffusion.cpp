#include "cdrb/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cdrb/textio.hpp"

namespace cdrb {

namespace {

void check_finite(std::span<const double> v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError(std::string(who) + ": non-finite output");
}

}  // namespace

LatentSpec LatentSpec::from_dataset(const DemoDataset& ds, bool include_actions) {
    if (include_actions && !ds.has_actions)
        throw ConfigError("LatentSpec: dataset has no actions to include");
    LatentSpec spec;
    spec.horizon = ds.horizon;
    spec.state_dim = static_cast<int>(ds.state_norm.dim());
    spec.action_dim = include_actions ? static_cast<int>(ds.action_norm.dim()) : 0;
    spec.state_norm = ds.state_norm;
    spec.action_norm = include_actions ? ds.action_norm : Normalizer{};
    return spec;
}

std::vector<double> LatentSpec::state_entry(const MazeState& s) const {
    if (state_dim != 4) throw ConfigError("LatentSpec: expected 4 state dimensions");
    std::vector<double> e(entry_dim());
    const double raw[4] = {s.pos.x, s.pos.y, s.vel.x, s.vel.y};
    for (int i = 0; i < 4; ++i) e[i] = state_norm.to_unit(raw[i], i);
    for (int j = 0; j < action_dim; ++j)
        e[state_dim + j] = action_norm.to_unit(0.0, j);
    return e;
}

MazeState LatentSpec::entry_state(std::span<const double> entry) const {
    if (entry.size() < static_cast<std::size_t>(state_dim) || state_dim != 4)
        throw ConfigError("LatentSpec: bad entry size");
    MazeState s;
    s.pos.x = state_norm.from_unit(entry[0], 0);
    s.pos.y = state_norm.from_unit(entry[1], 1);
    s.vel.x = state_norm.from_unit(entry[2], 2);
    s.vel.y = state_norm.from_unit(entry[3], 3);
    return s;
}

std::vector<double> to_latent(const Trajectory& traj, const LatentSpec& spec) {
    if (traj.horizon() != spec.horizon)
        throw ConfigError("to_latent: trajectory horizon mismatch");
    if (spec.action_dim > 0 && static_cast<int>(traj.actions.size()) != spec.horizon)
        throw ConfigError("to_latent: trajectory carries no actions");

    const int ed = spec.entry_dim();
    std::vector<double> latent(static_cast<std::size_t>(spec.size()));
    for (int i = 0; i <= spec.horizon; ++i) {
        double* e = latent.data() + static_cast<std::size_t>(i) * ed;
        const MazeState& s = traj.states[i];
        const double raw[4] = {s.pos.x, s.pos.y, s.vel.x, s.vel.y};
        for (int d = 0; d < spec.state_dim; ++d) e[d] = spec.state_norm.to_unit(raw[d], d);
        for (int j = 0; j < spec.action_dim; ++j) {
            const double f = i < spec.horizon
                                 ? (j == 0 ? traj.actions[i].force.x : traj.actions[i].force.y)
                                 : 0.0;  // terminal entry: zero-force pad
            e[spec.state_dim + j] = spec.action_norm.to_unit(f, j);
        }
    }
    return latent;
}

Trajectory from_latent(std::span<const double> latent, const LatentSpec& spec) {
    if (latent.size() != static_cast<std::size_t>(spec.size()))
        throw ConfigError("from_latent: latent size mismatch");
    const int ed = spec.entry_dim();
    Trajectory traj;
    traj.states.resize(spec.horizon + 1);
    for (int i = 0; i <= spec.horizon; ++i)
        traj.states[i] = spec.entry_state(latent.subspan(static_cast<std::size_t>(i) * ed, ed));
    if (spec.action_dim > 0) {
        traj.actions.resize(spec.horizon);
        for (int i = 0; i < spec.horizon; ++i) {
            const double* e = latent.data() + static_cast<std::size_t>(i) * ed + spec.state_dim;
            traj.actions[i].force.x = spec.action_norm.from_unit(e[0], 0);
            traj.actions[i].force.y = spec.action_norm.from_unit(e[1], 1);
        }
    }
    return traj;
}

ReplayBuffer build_buffer(const DemoDataset& ds, bool include_actions, IndexKind index,
                          double d_max_override) {
    const LatentSpec spec = LatentSpec::from_dataset(ds, include_actions);
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> actions;
    states.reserve(ds.trajectories.size() * (ds.horizon + 1));
    for (const Trajectory& traj : ds.trajectories) {
        const std::vector<double> latent = to_latent(traj, spec);
        for (int i = 0; i <= spec.horizon; ++i) {
            const double* e = latent.data() + static_cast<std::size_t>(i) * spec.entry_dim();
            states.emplace_back(e, e + spec.state_dim);
            if (include_actions)
                actions.emplace_back(e + spec.state_dim, e + spec.entry_dim());
        }
    }
    return ReplayBuffer::build(states, actions, index, d_max_override);
}

NoisyTrajectory degrade_cdrb(std::span<const double> clean, int k, const ReplayBuffer& buf,
                             const DistanceSchedule& sched, Rng& rng, bool pin) {
    const std::size_t ed = buf.entry_dim();
    if (ed == 0 || clean.size() % ed != 0 || clean.size() < 2 * ed)
        throw ConfigError("degrade_cdrb: trajectory size incompatible with buffer");
    const int H = static_cast<int>(clean.size() / ed) - 1;
    const double eps = sched.epsilon(k);  // validates k against [0, t]

    NoisyTrajectory out;
    out.data.assign(clean.begin(), clean.end());
    out.entry_dim = static_cast<int>(ed);
    out.horizon = H;
    out.step = k;
    out.pinned = pin;
    for (int i = 0; i <= H; ++i) {
        if (pin && (i == 0 || i == H)) continue;
        const std::span<const double> center = clean.subspan(static_cast<std::size_t>(i) * ed, ed);
        const std::size_t idx = buf.ball_sample_index(center, eps, rng);
        const std::span<const double> p = buf.entry(idx);
        std::copy(p.begin(), p.end(), out.data.begin() + static_cast<std::size_t>(i) * ed);
    }
    return out;
}

int steps_to_half_loss(const std::vector<double>& loss, int window) {
    const int n = static_cast<int>(loss.size());
    if (n == 0) return 0;
    const int w = std::min(std::max(window, 1), n);
    const auto mean = [&](int lo, int hi) {
        double s = 0.0;
        for (int i = lo; i < hi; ++i) s += loss[i];
        return s / (hi - lo);
    };
    const double initial = mean(0, w);
    const double final_ = mean(n - w, n);
    if (!(initial > final_)) return n;
    const double target = initial - 0.5 * (initial - final_);
    // Trailing moving average, so the crossing step reflects sustained loss.
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += loss[i];
        if (i >= w) acc -= loss[i - w];
        const int have = std::min(i + 1, w);
        if (have == w && acc / have <= target) return i + 1;
    }
    return n;
}

TrainResult train_restoration(const std::vector<std::vector<double>>& clean_latents,
                              const ReplayBuffer& buf, const DistanceSchedule& sched,
                              RestorationNet& net, OptimizerState& opt,
                              const TrainConfig& tc) {
    const std::size_t n = net.cfg.input_size();
    if (clean_latents.empty()) throw ConfigError("train_restoration: no trajectories");
    for (const auto& l : clean_latents)
        if (l.size() != n) throw ConfigError("train_restoration: latent size mismatch");
    if (static_cast<int>(buf.entry_dim()) != net.cfg.entry_dim)
        throw ConfigError("train_restoration: buffer entry dim mismatch");
    if (sched.t != net.cfg.diffusion_steps)
        throw ConfigError("train_restoration: schedule steps mismatch");
    if (sched.t < 2)
        throw ConfigError("train_restoration: need at least 2 diffusion steps");
    if (tc.batch < 1) throw ConfigError("train_restoration: batch must be positive");
    if (opt.m.size() != net.params.size())
        throw ConfigError("train_restoration: optimizer shape mismatch");

    const Rng root(tc.seed);
    const std::size_t B = tc.batch;
    std::vector<double> noisy(n * B), clean(n * B), grad;
    std::vector<int> ks(B);
    TrainResult result;
    result.loss.reserve(tc.steps);

    for (int s = 0; s < tc.steps; ++s) {
        for (std::size_t b = 0; b < B; ++b) {
            Rng rb = root.stream("batch", static_cast<std::uint64_t>(s), b);
            const std::size_t ti = rb.uniform_index(clean_latents.size());
            const int k = 1 + static_cast<int>(rb.uniform_index(sched.t - 1));
            const NoisyTrajectory nt = degrade_cdrb(clean_latents[ti], k, buf, sched, rb, tc.pin);
            std::copy(nt.data.begin(), nt.data.end(), noisy.begin() + b * n);
            std::copy(clean_latents[ti].begin(), clean_latents[ti].end(),
                      clean.begin() + b * n);
            ks[b] = k;
        }
        double loss;
        try {
            loss = net.loss_and_grad(noisy, clean, ks, grad);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (training step " +
                               std::to_string(s) + ")");
        }
        adam_step(opt, net.params, grad);
        result.loss.push_back(loss);
    }
    return result;
}

SamplerKind sampler_kind_from_string(std::string_view s) {
    if (s == "alg2") return SamplerKind::alg2;
    if (s == "eq5") return SamplerKind::eq5;
    throw ConfigError("unknown sampler kind '" + std::string(s) + "' (alg2|eq5)");
}

std::string to_string(SamplerKind kind) {
    return kind == SamplerKind::alg2 ? "alg2" : "eq5";
}

namespace {

// tau(k-1) = tau(k) - D(tau0, k) + D(tau0, k-1) with the two draws coupled:
// one uniform u per entry indexes both the eps_k candidate list (sorted by
// distance, then index) and its eps_{k-1} prefix.
void eq5_update(std::vector<double>& data, std::span<const double> tau0, int k,
                const SamplerConfig& cfg, const ReplayBuffer& buf, Rng& rng) {
    const std::size_t ed = buf.entry_dim();
    const int H = static_cast<int>(data.size() / ed) - 1;
    const double eps_k = cfg.schedule.epsilon(k);
    const double eps_km1 = cfg.schedule.epsilon(k - 1);

    for (int i = 0; i <= H; ++i) {
        if (cfg.pin && (i == 0 || i == H)) continue;
        const std::span<const double> center = tau0.subspan(static_cast<std::size_t>(i) * ed, ed);
        const std::vector<std::size_t> members = buf.radius_indices(center, eps_k);
        if (members.empty()) continue;  // both draws hit the nearest fallback and cancel

        std::vector<std::pair<double, std::size_t>> cand;
        cand.reserve(members.size());
        for (std::size_t m : members) {
            const std::span<const double> p = buf.entry(m);
            double d2 = 0.0;
            for (std::size_t c = 0; c < ed; ++c) {
                const double d = p[c] - center[c];
                d2 += d * d;
            }
            cand.emplace_back(d2, m);
        }
        std::sort(cand.begin(), cand.end());

        const double r2 = eps_km1 * eps_km1;
        std::size_t m_km1 = 0;
        while (m_km1 < cand.size() && cand[m_km1].first <= r2) ++m_km1;

        const double u = rng.uniform();
        const std::size_t jk =
            std::min(static_cast<std::size_t>(u * static_cast<double>(cand.size())),
                     cand.size() - 1);
        const std::span<const double> pk = buf.entry(cand[jk].second);
        std::span<const double> pkm1;
        if (m_km1 > 0) {
            const std::size_t jkm1 = std::min(
                static_cast<std::size_t>(u * static_cast<double>(m_km1)), m_km1 - 1);
            pkm1 = buf.entry(cand[jkm1].second);
        } else {
            pkm1 = buf.entry(buf.nearest(center).index);
        }
        double* e = data.data() + static_cast<std::size_t>(i) * ed;
        for (std::size_t c = 0; c < ed; ++c) e[c] += pkm1[c] - pk[c];
    }
}

}  // namespace

std::vector<double> sample_cdrb(const RestorationNet& net, const ReplayBuffer& buf,
                                const SamplerConfig& cfg, std::span<const double> s0,
                                std::span<const double> sT, Rng& rng, SampleTrace* trace) {
    const std::size_t ed = buf.entry_dim();
    const int H = net.cfg.horizon;
    if (static_cast<int>(ed) != net.cfg.entry_dim)
        throw ConfigError("sample_cdrb: buffer entry dim mismatch");
    if (cfg.schedule.t != net.cfg.diffusion_steps)
        throw ConfigError("sample_cdrb: schedule steps mismatch");
    if (cfg.pin && (s0.size() != ed || sT.size() != ed))
        throw ConfigError("sample_cdrb: endpoint entry size mismatch");
    const int t = cfg.schedule.t;

    // Line 1: tau(t) is H+1 uniform buffer draws; line 2 pins the endpoints.
    std::vector<double> data(static_cast<std::size_t>(H + 1) * ed);
    for (int i = 0; i <= H; ++i) {
        double* e = data.data() + static_cast<std::size_t>(i) * ed;
        if (cfg.pin && i == 0) {
            std::copy(s0.begin(), s0.end(), e);
        } else if (cfg.pin && i == H) {
            std::copy(sT.begin(), sT.end(), e);
        } else {
            const std::span<const double> p = buf.entry(rng.uniform_index(buf.size()));
            std::copy(p.begin(), p.end(), e);
        }
    }
    if (trace) trace->steps.push_back(data);

    std::vector<double> tau0;
    for (int k = t; k >= 1; --k) {
        tau0 = net.forward(data, k);
        check_finite(tau0, "sample_cdrb");
        if (cfg.pin) {
            std::copy(s0.begin(), s0.end(), tau0.begin());
            std::copy(sT.begin(), sT.end(), tau0.end() - ed);
        }
        if (k == 1) break;  // the last restoration is the returned plan

        if (cfg.kind == SamplerKind::alg2) {
            data = degrade_cdrb(tau0, k - 1, buf, cfg.schedule, rng, cfg.pin).data;
        } else {
            eq5_update(data, tau0, k, cfg, buf, rng);
            if (cfg.pin) {
                std::copy(s0.begin(), s0.end(), data.begin());
                std::copy(sT.begin(), sT.end(), data.end() - ed);
            }
        }
        if (trace) trace->steps.push_back(data);
    }
    return tau0;
}

std::vector<double> project_trajectory(std::span<const double> latent,
                                       const ReplayBuffer& buf) {
    const std::size_t ed = buf.entry_dim();
    if (ed == 0 || latent.size() % ed != 0)
        throw ConfigError("project_trajectory: size incompatible with buffer");
    std::vector<double> out(latent.size());
    for (std::size_t i = 0; i < latent.size() / ed; ++i) {
        const std::size_t idx = buf.nearest(latent.subspan(i * ed, ed)).index;
        const std::span<const double> p = buf.entry(idx);
        std::copy(p.begin(), p.end(), out.begin() + i * ed);
    }
    return out;
}

NoiseSchedule NoiseSchedule::cosine(int t, double s) {
    if (t < 1) throw ConfigError("NoiseSchedule: t must be at least 1");
    NoiseSchedule ns;
    ns.t = t;
    ns.alpha_bar.resize(t + 1);
    const auto f = [&](double k) {
        const double a = std::cos(((k / t + s) / (1.0 + s)) * std::numbers::pi / 2.0);
        return a * a;
    };
    const double f0 = f(0.0);
    ns.alpha_bar[0] = 1.0;
    for (int k = 1; k <= t; ++k) ns.alpha_bar[k] = f(static_cast<double>(k)) / f0;
    return ns;
}

NoiseSchedule NoiseSchedule::zero(int t) {
    if (t < 1) throw ConfigError("NoiseSchedule: t must be at least 1");
    NoiseSchedule ns;
    ns.t = t;
    ns.alpha_bar.assign(t + 1, 1.0);
    return ns;
}

NoisyTrajectory gaussian_forward(std::span<const double> clean, int entry_dim, int k,
                                 const NoiseSchedule& ns, Rng& rng, bool pin) {
    if (entry_dim < 1 || clean.size() % entry_dim != 0 ||
        clean.size() < 2 * static_cast<std::size_t>(entry_dim))
        throw ConfigError("gaussian_forward: bad trajectory shape");
    if (k < 0 || k > ns.t)
        throw ConfigError("gaussian_forward: step " + std::to_string(k) + " outside [0, " +
                          std::to_string(ns.t) + "]");
    const int H = static_cast<int>(clean.size() / entry_dim) - 1;
    const double a = ns.alpha(k);
    const double sg = ns.sigma(k);

    NoisyTrajectory out;
    out.data.assign(clean.begin(), clean.end());
    out.entry_dim = entry_dim;
    out.horizon = H;
    out.step = k;
    out.pinned = pin;
    for (int i = 0; i <= H; ++i) {
        if (pin && (i == 0 || i == H)) continue;  // pinned entries stay clean
        double* e = out.data.data() + static_cast<std::size_t>(i) * entry_dim;
        for (int c = 0; c < entry_dim; ++c) e[c] = a * e[c] + sg * rng.normal();
    }
    return out;
}

TrainResult train_gaussian(const std::vector<std::vector<double>>& clean_latents,
                           const NoiseSchedule& ns, RestorationNet& net,
                           OptimizerState& opt, const TrainConfig& tc) {
    const std::size_t n = net.cfg.input_size();
    if (clean_latents.empty()) throw ConfigError("train_gaussian: no trajectories");
    for (const auto& l : clean_latents)
        if (l.size() != n) throw ConfigError("train_gaussian: latent size mismatch");
    if (ns.t != net.cfg.diffusion_steps)
        throw ConfigError("train_gaussian: noise schedule steps mismatch");
    if (tc.batch < 1) throw ConfigError("train_gaussian: batch must be positive");
    if (opt.m.size() != net.params.size())
        throw ConfigError("train_gaussian: optimizer shape mismatch");

    const Rng root(tc.seed);
    const std::size_t B = tc.batch;
    const std::size_t ed = net.cfg.entry_dim;
    const int H = net.cfg.horizon;
    std::vector<double> noisy(n * B), target(n * B), grad;
    std::vector<int> ks(B);
    TrainResult result;
    result.loss.reserve(tc.steps);

    for (int s = 0; s < tc.steps; ++s) {
        for (std::size_t b = 0; b < B; ++b) {
            Rng rb = root.stream("gbatch", static_cast<std::uint64_t>(s), b);
            const std::size_t ti = rb.uniform_index(clean_latents.size());
            const int k = 1 + static_cast<int>(rb.uniform_index(ns.t));
            const double a = ns.alpha(k);
            const double sg = ns.sigma(k);
            const std::vector<double>& cl = clean_latents[ti];
            double* nz = noisy.data() + b * n;
            double* tg = target.data() + b * n;
            for (int i = 0; i <= H; ++i) {
                const std::size_t off = static_cast<std::size_t>(i) * ed;
                const bool pinned = tc.pin && (i == 0 || i == H);
                for (std::size_t c = 0; c < ed; ++c) {
                    if (pinned) {  // endpoint stays clean; net learns zero noise there
                        nz[off + c] = cl[off + c];
                        tg[off + c] = 0.0;
                    } else {
                        const double z = rb.normal();
                        nz[off + c] = a * cl[off + c] + sg * z;
                        tg[off + c] = z;
                    }
                }
            }
            ks[b] = k;
        }
        double loss;
        try {
            loss = net.loss_and_grad(noisy, target, ks, grad);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (training step " +
                               std::to_string(s) + ")");
        }
        adam_step(opt, net.params, grad);
        result.loss.push_back(loss);
    }
    return result;
}

std::vector<double> sample_gaussian(const RestorationNet& net, const NoiseSchedule& ns,
                                    std::span<const double> s0, std::span<const double> sT,
                                    int horizon, int entry_dim, Rng& rng, bool pin,
                                    SampleTrace* trace) {
    const std::size_t ed = entry_dim;
    const std::size_t n = static_cast<std::size_t>(horizon + 1) * ed;
    if (static_cast<int>(ed) != net.cfg.entry_dim || horizon != net.cfg.horizon)
        throw ConfigError("sample_gaussian: shape mismatch with net");
    if (ns.t != net.cfg.diffusion_steps)
        throw ConfigError("sample_gaussian: noise schedule steps mismatch");
    if (pin && (s0.size() != ed || sT.size() != ed))
        throw ConfigError("sample_gaussian: endpoint entry size mismatch");

    std::vector<double> data(n);
    for (int i = 0; i <= horizon; ++i) {
        double* e = data.data() + static_cast<std::size_t>(i) * ed;
        if (pin && i == 0) {
            std::copy(s0.begin(), s0.end(), e);
        } else if (pin && i == horizon) {
            std::copy(sT.begin(), sT.end(), e);
        } else {
            for (std::size_t c = 0; c < ed; ++c) e[c] = rng.normal();
        }
    }
    if (trace) trace->steps.push_back(data);

    for (int k = ns.t; k >= 1; --k) {
        const double ab_k = ns.alpha_bar[k];
        const double ab_prev = ns.alpha_bar[k - 1];
        if (1.0 - ab_k == 0.0) {  // noiseless step: nothing to invert
            if (trace && k > 1) trace->steps.push_back(data);
            continue;
        }
        const std::vector<double> zhat = net.forward(data, k);
        check_finite(zhat, "sample_gaussian");

        const double a_k = std::sqrt(ab_k);
        const double sg_k = std::sqrt(1.0 - ab_k);
        const double alpha_k = ab_k / ab_prev;
        const double beta_k = 1.0 - alpha_k;
        const double var = beta_k * (1.0 - ab_prev) / (1.0 - ab_k);
        const double sd = var > 0.0 ? std::sqrt(var) : 0.0;

        for (int i = 0; i <= horizon; ++i) {
            if (pin && (i == 0 || i == horizon)) continue;
            const std::size_t off = static_cast<std::size_t>(i) * ed;
            for (std::size_t c = 0; c < ed; ++c) {
                const double x = data[off + c];
                const double x0 = (x - sg_k * zhat[off + c]) / a_k;
                const double mu = (std::sqrt(ab_prev) * beta_k * x0 +
                                   std::sqrt(alpha_k) * (1.0 - ab_prev) * x) /
                                  (1.0 - ab_k);
                data[off + c] = mu + (k > 1 && sd > 0.0 ? sd * rng.normal() : 0.0);
            }
        }
        if (pin) {
            std::copy(s0.begin(), s0.end(), data.begin());
            std::copy(sT.begin(), sT.end(), data.end() - ed);
        }
        if (trace && k > 1) trace->steps.push_back(data);
    }
    check_finite(data, "sample_gaussian");
    return data;
}

RestorationNet Checkpoint::net() const {
    net_cfg.validate();
    if (params.size() != param_count(net_cfg))
        throw ConfigError("Checkpoint: parameter count does not match architecture");
    RestorationNet n;
    n.cfg = net_cfg;
    n.params = params;
    return n;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
    if (ck.method != "cdrb" && ck.method != "gaussian")
        throw ConfigError("save_checkpoint: method must be cdrb or gaussian");
    std::ostringstream out;
    out << "cdrb-checkpoint 1\n";
    out << "method " << ck.method << "\n";
    out << "maze_id " << ck.maze_id << "\n";
    out << "horizon " << ck.latent.horizon << "\n";
    out << "state_dim " << ck.latent.state_dim << "\n";
    out << "action_dim " << ck.latent.action_dim << "\n";
    const auto write_norm = [&out](const char* key, const Normalizer& nm) {
        out << key << " " << nm.dim() << "\n";
        for (std::size_t i = 0; i < nm.dim(); ++i) out << (i ? " " : "") << fmt_g17(nm.lo[i]);
        if (nm.dim()) out << "\n";
        for (std::size_t i = 0; i < nm.dim(); ++i) out << (i ? " " : "") << fmt_g17(nm.hi[i]);
        if (nm.dim()) out << "\n";
    };
    write_norm("state_norm", ck.latent.state_norm);
    write_norm("action_norm", ck.latent.action_norm);
    out << "schedule " << to_string(ck.sched_kind) << "\n";
    out << "d_max " << fmt_g17(ck.d_max) << "\n";
    out << "backbone " << to_string(ck.net_cfg.backbone) << "\n";
    out << "diffusion_steps " << ck.net_cfg.diffusion_steps << "\n";
    out << "hidden " << ck.net_cfg.hidden << "\n";
    out << "depth " << ck.net_cfg.depth << "\n";
    out << "embed_dim " << ck.net_cfg.embed_dim << "\n";
    out << "channels " << ck.net_cfg.channels << "\n";
    out << "kernel " << ck.net_cfg.kernel << "\n";
    out << "params " << ck.params.size() << "\n";
    for (std::size_t i = 0; i < ck.params.size(); ++i) {
        out << fmt_g17(ck.params[i]);
        out << ((i % 8 == 7 || i + 1 == ck.params.size()) ? "\n" : " ");
    }
    std::ofstream f(path);
    if (!f) throw IoError("save_checkpoint: cannot open " + path.string());
    f << out.str();
    if (!f.good()) throw IoError("save_checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_checkpoint: cannot open " + path.string());
    TokenReader r(f, "checkpoint " + path.string());

    r.expect("cdrb-checkpoint");
    if (r.integer() != 1) throw IoError("load_checkpoint: unsupported version");
    Checkpoint ck;
    r.expect("method");
    ck.method = r.token();
    if (ck.method != "cdrb" && ck.method != "gaussian")
        throw IoError("load_checkpoint: unknown method " + ck.method);
    r.expect("maze_id");
    ck.maze_id = r.token();
    r.expect("horizon");
    ck.latent.horizon = static_cast<int>(r.integer());
    r.expect("state_dim");
    ck.latent.state_dim = static_cast<int>(r.integer());
    r.expect("action_dim");
    ck.latent.action_dim = static_cast<int>(r.integer());
    const auto read_norm = [&r](const char* key) {
        r.expect(key);
        const long long d = r.integer();
        if (d < 0 || d > 64) throw IoError("load_checkpoint: bad normalizer size");
        Normalizer nm;
        nm.lo.resize(d);
        nm.hi.resize(d);
        for (auto& v : nm.lo) v = r.real();
        for (auto& v : nm.hi) v = r.real();
        return nm;
    };
    ck.latent.state_norm = read_norm("state_norm");
    ck.latent.action_norm = read_norm("action_norm");
    r.expect("schedule");
    ck.sched_kind = schedule_kind_from_string(r.token());
    r.expect("d_max");
    ck.d_max = r.real();
    r.expect("backbone");
    ck.net_cfg.backbone = backbone_from_string(r.token());
    r.expect("diffusion_steps");
    ck.net_cfg.diffusion_steps = static_cast<int>(r.integer());
    r.expect("hidden");
    ck.net_cfg.hidden = static_cast<int>(r.integer());
    r.expect("depth");
    ck.net_cfg.depth = static_cast<int>(r.integer());
    r.expect("embed_dim");
    ck.net_cfg.embed_dim = static_cast<int>(r.integer());
    r.expect("channels");
    ck.net_cfg.channels = static_cast<int>(r.integer());
    r.expect("kernel");
    ck.net_cfg.kernel = static_cast<int>(r.integer());
    ck.net_cfg.horizon = ck.latent.horizon;
    ck.net_cfg.entry_dim = ck.latent.state_dim + ck.latent.action_dim;
    ck.net_cfg.validate();
    if (ck.d_max <= 0.0) throw IoError("load_checkpoint: d_max must be positive");

    r.expect("params");
    const long long count = r.integer();
    if (count < 0 || static_cast<std::size_t>(count) != param_count(ck.net_cfg))
        throw IoError("load_checkpoint: parameter count does not match architecture");
    ck.params.resize(count);
    for (auto& v : ck.params) v = r.real();
    return ck;
}

}  // namespace cdrb
