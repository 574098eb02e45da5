// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "higgslab/anosov.hpp"
#include "higgslab/hitchin.hpp"
#include "higgslab/liegroup.hpp"

using namespace higgslab;

namespace {

struct SystemFixture {
  hitchin::DiscreteSystem sys;
  std::vector<double> x, y;
  explicit SystemFixture(int n)
      : sys(hitchin::assemble_system(
            [] {
              hitchin::HiggsCoefficients k;
              k.b = {1.0, 0};
              k.c = {3.0, 0};
              return k;
            }(),
            hitchin::make_mesh(ChartKind::disk, 0.05, 0.9995, n))),
        x(n),
        y(n) {
    for (int i = 0; i < n; ++i) {
      x[i] = -1.0 + 0.2 * std::sin(0.01 * i);
      y[i] = -0.3 + 0.1 * std::cos(0.02 * i);
    }
  }
};

void BM_residual(benchmark::State& st) {
  SystemFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.sys.residual(f.x, f.y));
}
void BM_residual_serial(benchmark::State& st) {
  SystemFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.sys.residual_serial(f.x, f.y));
}
void BM_jacobian(benchmark::State& st) {
  SystemFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.sys.jacobian(f.x, f.y));
}
void BM_jacobian_serial(benchmark::State& st) {
  SystemFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.sys.jacobian_serial(f.x, f.y));
}
BENCHMARK(BM_residual)->Arg(2048)->Arg(16384);
BENCHMARK(BM_residual_serial)->Arg(2048)->Arg(16384);
BENCHMARK(BM_jacobian)->Arg(2048)->Arg(16384);
BENCHMARK(BM_jacobian_serial)->Arg(2048)->Arg(16384);

std::vector<Mat5> random_elements(int n) {
  std::mt19937_64 rng(1);
  std::vector<Mat5> gs;
  for (int i = 0; i < n; ++i) gs.push_back(liegroup::random_group_element(rng, 5.0));
  return gs;
}
void BM_cartan_batch(benchmark::State& st) {
  const auto gs = random_elements(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(liegroup::cartan_projection_batch(gs));
}
void BM_cartan_batch_serial(benchmark::State& st) {
  const auto gs = random_elements(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(liegroup::cartan_projection_batch_serial(gs));
}
BENCHMARK(BM_cartan_batch)->Arg(1000);
BENCHMARK(BM_cartan_batch_serial)->Arg(1000);

struct RayFixture {
  FuchsianField field{1.0};
  anosov::HiggsCoefficients k;
  anosov::RayFamily fam;
  Vec5 v0 = Vec5::Zero();
  RayFixture() {
    k.b = {1.0, 0};
    fam.base = 0.3;
    fam.phi_min = -M_PI / 4;
    fam.phi_max = M_PI / 4;
    fam.directions = 8;
    fam.lengths = 25;
    fam.d_max = 4.0;
    fam.chords_per_length = 2;
    v0(0) = 1.0;
  }
};
void BM_ray_traces(benchmark::State& st) {
  RayFixture f;
  for (auto _ : st) benchmark::DoNotOptimize(anosov::ray_traces(f.fam, f.v0, f.field, f.k, true));
}
void BM_ray_traces_serial(benchmark::State& st) {
  RayFixture f;
  for (auto _ : st) benchmark::DoNotOptimize(anosov::ray_traces(f.fam, f.v0, f.field, f.k, false));
}
void BM_domination(benchmark::State& st) {
  RayFixture f;
  for (auto _ : st) benchmark::DoNotOptimize(anosov::domination_verify(f.fam, f.field, f.k));
}
void BM_domination_serial(benchmark::State& st) {
  RayFixture f;
  for (auto _ : st) benchmark::DoNotOptimize(anosov::domination_verify_serial(f.fam, f.field, f.k));
}
BENCHMARK(BM_ray_traces)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ray_traces_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_domination)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_domination_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
