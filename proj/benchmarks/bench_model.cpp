#include <benchmark/benchmark.h>

#include <vector>

#include "cdrb/model.hpp"
#include "cdrb/rng.hpp"

namespace {

using namespace cdrb;

NetConfig small_cfg(Backbone b, int hidden) {
    NetConfig cfg;
    cfg.backbone = b;
    cfg.horizon = 48;
    cfg.entry_dim = 4;
    cfg.diffusion_steps = 50;
    cfg.hidden = hidden;
    cfg.depth = 3;
    cfg.embed_dim = 64;
    cfg.channels = hidden / 4;
    cfg.kernel = 5;
    return cfg;
}

void run_forward(benchmark::State& state, Backbone b) {
    const NetConfig cfg = small_cfg(b, static_cast<int>(state.range(0)));
    const RestorationNet net = RestorationNet::init(cfg, 3);
    Rng rng(5);
    std::vector<double> x(cfg.input_size());
    for (double& v : x) v = rng.uniform() * 2.0 - 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, 25));
    state.counters["params"] = static_cast<double>(param_count(cfg));
}

void BM_forward_mlp(benchmark::State& state) { run_forward(state, Backbone::mlp); }
void BM_forward_tcn(benchmark::State& state) { run_forward(state, Backbone::tcn); }
BENCHMARK(BM_forward_mlp)->Arg(128)->Arg(256)->Arg(512)->ArgName("hidden");
BENCHMARK(BM_forward_tcn)->Arg(128)->Arg(256)->Arg(512)->ArgName("hidden");

void run_train_step(benchmark::State& state, Backbone b) {
    const NetConfig cfg = small_cfg(b, static_cast<int>(state.range(0)));
    RestorationNet net = RestorationNet::init(cfg, 3);
    OptimizerState opt = OptimizerState::init(net.params.size());
    Rng rng(5);
    const int batch = 64;
    const std::size_t n = static_cast<std::size_t>(cfg.input_size());
    std::vector<double> noisy(n * batch), clean(n * batch), grad;
    for (double& v : noisy) v = rng.uniform() * 2.0 - 1.0;
    for (double& v : clean) v = rng.uniform() * 2.0 - 1.0;
    std::vector<int> ks(batch, 20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.loss_and_grad(noisy, clean, ks, grad));
        adam_step(opt, net.params, grad);
    }
    state.counters["params"] = static_cast<double>(param_count(cfg));
}

void BM_train_step_mlp(benchmark::State& state) { run_train_step(state, Backbone::mlp); }
void BM_train_step_tcn(benchmark::State& state) { run_train_step(state, Backbone::tcn); }
BENCHMARK(BM_train_step_mlp)
    ->Arg(128)
    ->Arg(256)
    ->Arg(512)
    ->ArgName("hidden")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_train_step_tcn)
    ->Arg(128)
    ->Arg(256)
    ->Arg(512)
    ->ArgName("hidden")
    ->Unit(benchmark::kMillisecond);

}  // namespace
