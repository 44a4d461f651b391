#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdrb/errors.hpp"

namespace cdrb {

enum class Backbone { mlp, tcn };

Backbone backbone_from_string(std::string_view s);
std::string to_string(Backbone b);

/// Architecture of the restoration net. The net maps a flattened trajectory
/// of (horizon+1)*entry_dim values plus a step index k in [0, diffusion_steps]
/// to a clean-trajectory estimate of the same size.
struct NetConfig {
    Backbone backbone = Backbone::mlp;
    int horizon = 48;
    int entry_dim = 4;
    int diffusion_steps = 50;  // embedding table rows = diffusion_steps + 1
    int hidden = 512;          // mlp width
    int depth = 3;             // hidden layers (mlp) / conv layers (tcn)
    int embed_dim = 64;
    int channels = 64;         // tcn feature channels
    int kernel = 5;            // tcn kernel width, odd

    int input_size() const { return (horizon + 1) * entry_dim; }
    void validate() const;
};

/// Flat parameter count implied by the config; the invariant checked against
/// the actual parameter array.
std::size_t param_count(const NetConfig& cfg);

/// Restoration network with a residual output head (zero-initialized, so the
/// net is the identity map at init). Parameters live in one flat array;
/// gradients are hand-derived reverse mode over batched matrix products.
struct RestorationNet {
    NetConfig cfg;
    std::vector<double> params;

    static RestorationNet init(const NetConfig& cfg, std::uint64_t seed);

    /// Single trajectory: input and output are input_size() values.
    std::vector<double> forward(std::span<const double> noisy, int k) const;

    /// Batched forward: `noisy` holds B column-contiguous inputs, ks.size()
    /// == B. Returns B column-contiguous outputs.
    std::vector<double> forward_batch(std::span<const double> noisy,
                                      std::span<const int> ks) const;

    /// Mean squared error over all batch coordinates plus its gradient in
    /// `grad` (resized to params.size()). Throws NumericError when the loss
    /// is not finite.
    double loss_and_grad(std::span<const double> noisy, std::span<const double> clean,
                         std::span<const int> ks, std::vector<double>& grad) const;
};

/// Adam with bias correction.
struct OptimizerState {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long step = 0;
    std::vector<double> m, v;

    static OptimizerState init(std::size_t n, double lr = 3e-4);
};

void adam_step(OptimizerState& opt, std::vector<double>& params,
               const std::vector<double>& grad);

}  // namespace cdrb
