#include "hyperslice/complex.hpp"
#include "hyperslice/generators.hpp"
#include "hyperslice/slicer.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace hyperslice;

namespace {

const Complex3& fine_torus()
{
    static const Complex3 cx = [] {
        TorusParams p;
        p.delta_ang = std::numbers::pi / 16;
        return make_3torus(p);
    }();
    return cx;
}

void BM_SliceTorus(benchmark::State& state)
{
    const auto& cx = fine_torus();
    const Hyperplane3Flat plane({-0.1, 0.1, 0.2, 0.3, 0.9});
    const SliceConfig config{.workers = static_cast<unsigned>(state.range(0))};
    for (auto _ : state) {
        auto res = slice_complex({plane, std::nullopt, false}, cx, config);
        benchmark::DoNotOptimize(res.mesh.triangles.data());
    }
    state.counters["tets"] = static_cast<double>(cx.tets.size());
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cx.tets.size()));
}
BENCHMARK(BM_SliceTorus)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GenerateTorus(benchmark::State& state)
{
    TorusParams p;
    p.delta_ang = 2 * std::numbers::pi / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(make_3torus(p).tets.size());
}
BENCHMARK(BM_GenerateTorus)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GenerateSphere(benchmark::State& state)
{
    SphereParams p;
    p.chi_steps = p.phi_steps = static_cast<int>(state.range(0));
    p.theta_steps = 2 * p.chi_steps;
    for (auto _ : state) benchmark::DoNotOptimize(make_3sphere(p).tets.size());
}
BENCHMARK(BM_GenerateSphere)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PoolInsert(benchmark::State& state)
{
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<VecN> pts(static_cast<std::size_t>(state.range(0)));
    for (auto& p : pts) p = VecN(0, u(g), u(g), u(g), u(g));
    for (auto _ : state) {
        VertexPool pool;
        for (const auto& p : pts) pool.put(p);
        for (const auto& p : pts) pool.put(p);
        benchmark::DoNotOptimize(pool.size());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 2 * pts.size()));
}
BENCHMARK(BM_PoolInsert)->Arg(1 << 12)->Arg(1 << 16);

} // namespace

BENCHMARK_MAIN();
