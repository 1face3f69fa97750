// Serial vs OpenMP Stage II table for one frame at desk scale.

#include <benchmark/benchmark.h>

#include "ensra/frame_kernels.hpp"
#include "ensra/schedulers.hpp"

namespace {

using namespace ensra;

struct Fixture {
  SystemConfig cfg;
  Scenario sc;
  EnvTrace trace;
  std::vector<UserMask> masks;
  std::vector<double> q;

  explicit Fixture(int users) {
    cfg.num_users = users;
    cfg.num_frames = 1;
    sc = Scenario::make(cfg);
    trace = generate_trace(cfg, sc.topo);
    for (UserMask m = 0; m < (UserMask{1} << users); ++m) masks.push_back(m);
    for (int l = 0; l < users; ++l) q.push_back(1.0 + 3.0 * l);
  }
};

void run_table(benchmark::State& state, KernelMode mode) {
  const Fixture f(static_cast<int>(state.range(0)));
  const Stage2Params prm = Stage2Params::from(f.cfg, f.cfg.V);
  for (auto _ : state) {
    auto t = stage2_table(mode, f.masks, f.q, f.trace, 0, f.cfg.frame_len, f.cfg, prm);
    benchmark::DoNotOptimize(t.frame_objective.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(f.masks.size()) *
                          f.cfg.frame_len);
}

void BM_TableSerial(benchmark::State& s) { run_table(s, KernelMode::kSerial); }
void BM_TableParallel(benchmark::State& s) { run_table(s, KernelMode::kParallel); }

void BM_EnsraFrame(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const auto mode = state.range(1) ? KernelMode::kParallel : KernelMode::kSerial;
  for (auto _ : state) {
    auto d = ensra_frame(f.q, f.trace, 0, f.cfg.V, f.sc, mode);
    benchmark::DoNotOptimize(d.objective);
  }
}

}  // namespace

BENCHMARK(BM_TableSerial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableParallel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsraFrame)->Args({4, 0})->Args({4, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
