#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cdrb/buffer.hpp"
#include "cdrb/expert.hpp"
#include "cdrb/model.hpp"
#include "cdrb/schedule.hpp"

namespace cdrb {

/// Layout of the latent space the diffusion operates in: trajectories
/// flattened entry-by-entry in normalized coordinates. An entry is a state
/// (4 values) optionally followed by an action (terminal entries carry a
/// zero action so every entry has the same width).
struct LatentSpec {
    int horizon = 48;
    int state_dim = 4;
    int action_dim = 0;
    Normalizer state_norm;
    Normalizer action_norm;

    int entry_dim() const { return state_dim + action_dim; }
    int size() const { return (horizon + 1) * entry_dim(); }

    static LatentSpec from_dataset(const DemoDataset& ds, bool include_actions);

    /// Normalized entry for a state, action part (if any) set to the
    /// normalized zero force.
    std::vector<double> state_entry(const MazeState& s) const;
    MazeState entry_state(std::span<const double> entry) const;
};

std::vector<double> to_latent(const Trajectory& traj, const LatentSpec& spec);
/// Inverse of to_latent: states always recovered; actions recovered for the
/// first `horizon` entries when the spec carries actions.
Trajectory from_latent(std::span<const double> latent, const LatentSpec& spec);

/// Every trajectory entry of the dataset as a buffer point in normalized
/// coordinates.
ReplayBuffer build_buffer(const DemoDataset& ds, bool include_actions,
                          IndexKind index = IndexKind::kdtree, double d_max_override = 0.0);

/// A degraded trajectory in latent layout.
struct NoisyTrajectory {
    std::vector<double> data;  // (horizon+1) * entry_dim values
    int entry_dim = 0;
    int horizon = 0;
    int step = 0;
    bool pinned = true;  // entries 0 and horizon kept clean
};

/// Replace every non-pinned entry with a buffer point drawn uniformly from
/// the closed eps_k ball around it (nearest member when the ball is empty).
/// Non-pinned output entries are always exact buffer members.
NoisyTrajectory degrade_cdrb(std::span<const double> clean, int k, const ReplayBuffer& buf,
                             const DistanceSchedule& sched, Rng& rng, bool pin = true);

struct TrainConfig {
    int steps = 20000;
    int batch = 64;
    bool pin = true;  // keep endpoints clean during degradation
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> loss;  // one value per optimizer step
};

/// First optimizer step at which the smoothed loss curve has covered half of
/// its total reduction (initial minus final plateau, both window-averaged).
/// Smaller is faster learning. Returns the curve length when the curve never
/// reaches the halfway mark.
int steps_to_half_loss(const std::vector<double>& loss, int window = 25);

/// Restoration training: per step, draw a batch of (trajectory, k) pairs
/// with k uniform in {1, ..., t-1}, degrade through the buffer, and take one
/// optimizer step on the mean squared reconstruction error.
TrainResult train_restoration(const std::vector<std::vector<double>>& clean_latents,
                              const ReplayBuffer& buf, const DistanceSchedule& sched,
                              RestorationNet& net, OptimizerState& opt,
                              const TrainConfig& tc);

enum class SamplerKind { alg2, eq5 };

SamplerKind sampler_kind_from_string(std::string_view s);
std::string to_string(SamplerKind kind);

struct SamplerConfig {
    DistanceSchedule schedule;
    SamplerKind kind = SamplerKind::alg2;
    bool pin = true;
};

/// Intermediate reverse-process trajectories tau(t), tau(t-1), ..., tau(1),
/// recorded in that order when requested.
struct SampleTrace {
    std::vector<std::vector<double>> steps;
};

/// Reverse process: start from uniform buffer draws, alternate restoration
/// and re-degradation at decreasing k, re-pinning endpoints every step.
/// Returns the last restoration output (endpoints pinned). With
/// SamplerKind::eq5 the update is tau(k-1) = tau(k) - D(tau0,k) + D(tau0,k-1)
/// with coupled draws; its intermediates may leave the buffer by
/// construction.
std::vector<double> sample_cdrb(const RestorationNet& net, const ReplayBuffer& buf,
                                const SamplerConfig& cfg, std::span<const double> s0,
                                std::span<const double> sT, Rng& rng,
                                SampleTrace* trace = nullptr);

/// Each entry replaced by its nearest buffer member (the projection
/// strawman baseline).
std::vector<double> project_trajectory(std::span<const double> latent,
                                       const ReplayBuffer& buf);

/// Variance-preserving noise levels: alpha(k)^2 + sigma(k)^2 = 1.
struct NoiseSchedule {
    int t = 50;
    std::vector<double> alpha_bar;  // size t+1, alpha_bar[0] = 1

    static NoiseSchedule cosine(int t, double s = 0.008);
    static NoiseSchedule zero(int t);  // alpha_bar identically 1 (test fixture)

    double alpha(int k) const { return std::sqrt(alpha_bar.at(k)); }
    double sigma(int k) const { return std::sqrt(1.0 - alpha_bar.at(k)); }
};

/// tau(k) = alpha(k) * clean + sigma(k) * z elementwise; pinned entries stay
/// clean (their noise is never drawn).
NoisyTrajectory gaussian_forward(std::span<const double> clean, int entry_dim, int k,
                                 const NoiseSchedule& ns, Rng& rng, bool pin = true);

/// Epsilon-prediction objective: net(tau(k), k) regresses the drawn noise
/// (zero at pinned entries). k uniform in {1, ..., t}.
TrainResult train_gaussian(const std::vector<std::vector<double>>& clean_latents,
                           const NoiseSchedule& ns, RestorationNet& net,
                           OptimizerState& opt, const TrainConfig& tc);

/// Ancestral sampling with clean-endpoint pinning at every step. Steps with
/// alpha_bar(k) == 1 pass through unchanged (zero-noise fixture).
std::vector<double> sample_gaussian(const RestorationNet& net, const NoiseSchedule& ns,
                                    std::span<const double> s0, std::span<const double> sT,
                                    int horizon, int entry_dim, Rng& rng, bool pin = true,
                                    SampleTrace* trace = nullptr);

/// Everything needed to plan with a trained net except the buffer itself.
struct Checkpoint {
    std::string method;  // "cdrb" | "gaussian"
    std::string maze_id;
    LatentSpec latent;
    ScheduleKind sched_kind = ScheduleKind::linear;
    double d_max = 1.0;  // schedule radius cap fixed at training time
    NetConfig net_cfg;
    std::vector<double> params;

    RestorationNet net() const;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cdrb
