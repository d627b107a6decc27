#include <benchmark/benchmark.h>

#include "mirt/curve.hpp"
#include "mirt/fields.hpp"
#include "mirt/geometry.hpp"
#include "mirt/phantom.hpp"
#include "mirt/reconstruct.hpp"
#include "mirt/symbol.hpp"
#include "mirt/transform.hpp"

namespace {

using namespace mirt;

const Curve& helix3() {
  static const Curve c = Curve::helix(2.0, 1.0, 3.0);
  return c;
}

LineSetParams small_lines() {
  LineSetParams p;
  p.n_t = 24;
  p.n_alpha = 12;
  p.n_beta = 24;
  return p;
}

void BM_Forward(benchmark::State& state) {
  const auto g = Grid3::cube(static_cast<int>(state.range(0)), 1.2);
  const LineSet ls(helix3(), g, small_lines());
  const auto f = random_tensor_field(g, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(mirt_forward(f, ls));
  state.counters["lines"] = static_cast<double>(ls.n_t() * ls.n_alpha() * ls.n_beta());
}
BENCHMARK(BM_Forward)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Adjoint(benchmark::State& state) {
  const auto g = Grid3::cube(static_cast<int>(state.range(0)), 1.2);
  const LineSet ls(helix3(), g, small_lines());
  const auto s = random_sinogram(ls, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(mirt_adjoint(s, ls));
}
BENCHMARK(BM_Adjoint)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PlaneSweep(benchmark::State& state) {
  const Vec3 xi = Vec3(0.3, -0.4, 0.85).normalized();
  const Vec3 x(0.1, 0.2, -0.1);
  for (auto _ : state) {
    const PlaneSweep sweep(helix3(), xi);
    benchmark::DoNotOptimize(sweep.intersect(x));
  }
}
BENCHMARK(BM_PlaneSweep);

void BM_PlaneSweepReuse(benchmark::State& state) {
  const PlaneSweep sweep(helix3(), Vec3(0.3, -0.4, 0.85).normalized());
  const Vec3 x(0.1, 0.2, -0.1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep.intersect(x));
}
BENCHMARK(BM_PlaneSweepReuse);

void BM_SymbolAndParametrix(benchmark::State& state) {
  const Vec3 x(0.211, -0.102, -0.002);
  const Vec3 xi(0.870, -0.270, 0.413);
  for (auto _ : state) {
    const auto s = principal_symbol(helix3(), x, xi);
    benchmark::DoNotOptimize(parametrix_symbol(s));
  }
}
BENCHMARK(BM_SymbolAndParametrix);

void BM_Decompose(benchmark::State& state) {
  const auto g = Grid3::cube(static_cast<int>(state.range(0)), 1.2);
  PhantomSpec spec;
  spec.kind = PhantomKind::kGaussianTensor;
  const auto f = make_phantom(spec, g);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f));
}
BENCHMARK(BM_Decompose)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ParametrixFrozen(benchmark::State& state) {
  const auto g = Grid3::cube(static_cast<int>(state.range(0)), 1.2);
  const auto f = make_phantom(PhantomSpec{}, g);
  ParametrixOptions opt;
  opt.frozen_point = Vec3::Zero();
  for (auto _ : state) benchmark::DoNotOptimize(apply_parametrix(f, helix3(), CutoffSpec{}, opt));
}
BENCHMARK(BM_ParametrixFrozen)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
