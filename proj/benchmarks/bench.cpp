#include <benchmark/benchmark.h>

#include <random>

#include "survey/augment.hpp"
#include "survey/consistency.hpp"
#include "survey/geo.hpp"
#include "survey/tta.hpp"

using namespace survey;

namespace {

FeatureMap random_map(int C, int H, int W, std::mt19937_64& rng) {
    FeatureMap f(C, H, W);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& v : f.values) v = n(rng);
    return f;
}

std::vector<Detection> random_detections(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.0, 480.0), conf(0.0, 1.0);
    std::vector<Detection> out;
    for (int i = 0; i < n; ++i) {
        const double x = pos(rng), y = pos(rng);
        out.emplace_back(BBox(x, y, x + 30, y + 30),
                         (rng() & 1) ? ClassId::burrow : ClassId::prairie_dog, conf(rng),
                         static_cast<int>(rng() % 5), "tile");
    }
    return out;
}

}  // namespace

static void BM_Iou(benchmark::State& state) {
    const BBox a(10, 10, 40, 40), b(25, 25, 55, 55);
    for (auto _ : state) benchmark::DoNotOptimize(iou(a, b));
}
BENCHMARK(BM_Iou);

static void BM_ConsistencyLoss(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const int hw = static_cast<int>(state.range(0));
    const FeatureMap p3 = random_map(8, hw, hw, rng);
    const FeatureMap p4 = random_map(8, hw / 2, hw / 2, rng);
    const FeatureMap p5 = random_map(8, hw / 4, hw / 4, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(consistency_loss(p3, p4, p5, TriLossWeights{}));
}
BENCHMARK(BM_ConsistencyLoss)->Arg(16)->Arg(64);

static void BM_ClusterDetections(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto dets = random_detections(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(cluster_detections(dets, 0.5, 5));
}
BENCHMARK(BM_ClusterDetections)->Arg(20)->Arg(200);

static void BM_PoissonBlend(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.25, 0.75);
    RgbImage bg(side * 3, side * 3);
    for (double& v : bg.pixels) v = u(rng);
    Patch p;
    p.image = RgbImage(side, side);
    for (double& v : p.image.pixels) v = u(rng);
    p.mask = BoolMask(side, side, false);
    for (int y = 1; y < side - 1; ++y)
        for (int x = 1; x < side - 1; ++x) p.mask.set(x, y, true);
    for (auto _ : state) benchmark::DoNotOptimize(poisson_blend(bg, p, side, side));
}
BENCHMARK(BM_PoissonBlend)->Arg(16)->Arg(48);

static void BM_SpatialQuery(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> pos(0.0, 20000.0);
    SpatialIndex idx(760.0, 23040, 23040);
    for (int i = 0; i < 5000; ++i) idx.insert({pos(rng), pos(rng)}, i);
    const Point q{pos(rng), pos(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(idx.query(q));
}
BENCHMARK(BM_SpatialQuery);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
