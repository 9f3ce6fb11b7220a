#include <benchmark/benchmark.h>

#include "sradapt/codec.hpp"
#include "sradapt/enhance.hpp"
#include "sradapt/losses.hpp"
#include "sradapt/networks.hpp"
#include "sradapt/ops.hpp"
#include "sradapt/resample.hpp"
#include "sradapt/rng.hpp"
#include "sradapt/synthetic.hpp"

using namespace sradapt;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, bool requires_grad = false) {
    CounterRng rng(seed);
    std::vector<double> v(element_count(shape));
    for (auto& x : v) x = 2 * rng.next_unit() - 1;
    return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

void BM_Conv2dForward(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = random_tensor({4, c, 32, 32}, 1);
    const Tensor w = random_tensor({c, c, 3, 3}, 2), b = random_tensor({c}, 3);
    NoGradGuard guard;
    for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w, b, 1, 1));
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(64);

void BM_Conv2dBackward(benchmark::State& state) {
    const int c = static_cast<int>(state.range(0));
    const Tensor x = random_tensor({4, c, 32, 32}, 1, true);
    const Tensor w = random_tensor({c, c, 3, 3}, 2, true), b = random_tensor({c}, 3, true);
    for (auto _ : state) benchmark::DoNotOptimize(backward(sum(conv2d(x, w, b, 1, 1))));
}
BENCHMARK(BM_Conv2dBackward)->Arg(16)->Arg(64);

void BM_LanczosDownsample(benchmark::State& state) {
    const Frame f = synthetic_clip({1920, 1080, 10, ChromaFormat::k420}, 1, 1)[0];
    for (auto _ : state) benchmark::DoNotOptimize(downsample_2x(f));
}
BENCHMARK(BM_LanczosDownsample)->Unit(benchmark::kMillisecond);

void BM_MsSsimLoss(benchmark::State& state) {
    const Tensor a = random_tensor({8, 3, 96, 96}, 4, true), b = random_tensor({8, 3, 96, 96}, 5);
    for (auto _ : state) benchmark::DoNotOptimize(backward(ms_ssim_loss(a, b)));
}
BENCHMARK(BM_MsSsimLoss)->Unit(benchmark::kMillisecond);

void BM_ToyCodec(benchmark::State& state) {
    const auto clip = synthetic_clip({960, 540, 10, ChromaFormat::k420}, 1, 2);
    for (auto _ : state) benchmark::DoNotOptimize(toy_encode_decode(clip, {8, 27, -6}));
}
BENCHMARK(BM_ToyCodec)->Unit(benchmark::kMillisecond);

void BM_TiledEnhance(benchmark::State& state) {
    Generator g(GeneratorConfig{2, 16}, 1);
    const Frame lo = synthetic_clip({256, 256, 8, ChromaFormat::k420}, 1, 3)[0];
    for (auto _ : state) benchmark::DoNotOptimize(enhance_frame(lo, g, {96, 16}));
}
BENCHMARK(BM_TiledEnhance)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
