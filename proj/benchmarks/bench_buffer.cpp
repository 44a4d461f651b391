#include <benchmark/benchmark.h>

#include <vector>

#include "cdrb/buffer.hpp"
#include "cdrb/diffusion.hpp"
#include "cdrb/rng.hpp"
#include "cdrb/schedule.hpp"

namespace {

using namespace cdrb;

ReplayBuffer make_buffer(std::size_t n, std::size_t dim, IndexKind kind) {
    Rng rng(42);
    std::vector<std::vector<double>> states(n, std::vector<double>(dim));
    for (auto& s : states)
        for (double& v : s) v = rng.uniform() * 2.0 - 1.0;
    return ReplayBuffer::build(states, {}, kind);
}

void BM_nearest(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const IndexKind kind = state.range(1) ? IndexKind::kdtree : IndexKind::brute;
    const ReplayBuffer buf = make_buffer(n, 4, kind);
    Rng rng(7);
    std::vector<double> q(4);
    for (auto _ : state) {
        for (double& v : q) v = rng.uniform() * 2.0 - 1.0;
        benchmark::DoNotOptimize(buf.nearest(q));
    }
}
BENCHMARK(BM_nearest)
    ->ArgsProduct({{1000, 10000, 100000}, {0, 1}})
    ->ArgNames({"n", "kdtree"});

void BM_ball_sample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const double eps = static_cast<double>(state.range(1)) / 100.0;
    const ReplayBuffer buf = make_buffer(n, 4, IndexKind::kdtree);
    Rng rng(7);
    std::vector<double> q(4);
    for (auto _ : state) {
        for (double& v : q) v = rng.uniform() * 2.0 - 1.0;
        benchmark::DoNotOptimize(buf.ball_sample_index(q, eps, rng));
    }
}
BENCHMARK(BM_ball_sample)
    ->ArgsProduct({{10000, 100000}, {5, 20, 80}})
    ->ArgNames({"n", "eps_pct"});

// Wall time of one full-trajectory degradation; the quantity k-means
// compression is meant to shrink.
void BM_degrade(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ReplayBuffer buf = make_buffer(n, 4, IndexKind::kdtree);
    const DistanceSchedule sched{ScheduleKind::linear, buf.d_max(), 50};
    Rng rng(9);
    std::vector<double> latent(49 * 4);
    for (double& v : latent) v = rng.uniform() * 2.0 - 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(degrade_cdrb(latent, 25, buf, sched, rng));
}
BENCHMARK(BM_degrade)->Arg(1000)->Arg(10000)->Arg(100000)->ArgName("n");

void BM_kmeans(benchmark::State& state) {
    const ReplayBuffer buf = make_buffer(static_cast<std::size_t>(state.range(0)), 4,
                                         IndexKind::kdtree);
    for (auto _ : state) {
        Rng rng(11);
        benchmark::DoNotOptimize(buf.kmeans_compress(buf.size() / 10, 10, rng));
    }
}
BENCHMARK(BM_kmeans)->Arg(2000)->Arg(10000)->ArgName("n")->Unit(benchmark::kMillisecond);

}  // namespace
