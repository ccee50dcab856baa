#include "flexkrylov/decomp.hpp"
#include "flexkrylov/problems.hpp"
#include "flexkrylov/solvers.hpp"
#include "flexkrylov/transforms.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace fk = flexkrylov;

namespace {

fk::Vector random_vector(fk::Index n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  fk::Vector v(n);
  for (fk::Index i = 0; i < n; ++i) v[i] = nd(gen);
  return v;
}

void BM_FgkExpand(benchmark::State& state) {
  const fk::TestProblem p = fk::gen_deblur2d(64, {fk::PsfKind::disk, 4.0});
  const auto k = static_cast<int>(state.range(0));
  const fk::DiagonalOperator linv(random_vector(p.a->cols(), 1).cwiseAbs().array() + 0.1);
  for (auto _ : state) {
    fk::FgkState st = fk::FgkState::init(p.a, p.b);
    for (int i = 0; i < k; ++i) st.expand(linv);
    benchmark::DoNotOptimize(st.steps());
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_FgkExpand)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Haar2d(benchmark::State& state) {
  const auto side = state.range(0);
  const fk::HaarTransform2D psi(side, side, 4);
  const fk::Vector x = random_vector(side * side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psi.forward(x));
  state.SetBytesProcessed(state.iterations() * side * side * 8);
}
BENCHMARK(BM_Haar2d)->Arg(64)->Arg(256);

void BM_TomoMatvec(benchmark::State& state) {
  fk::TomoGeometry g;
  g.n_grid = static_cast<int>(state.range(0));
  g.angles_deg = fk::angle_range(0.0, 2.0, 179.0);
  const fk::SparseOperator a(fk::assemble_tomography(g));
  const fk::Vector x = random_vector(a.cols(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(a.apply(x));
}
BENCHMARK(BM_TomoMatvec)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TomoAssembly(benchmark::State& state) {
  fk::TomoGeometry g;
  g.n_grid = static_cast<int>(state.range(0));
  g.angles_deg = fk::angle_range(0.0, 2.0, 179.0);
  for (auto _ : state) benchmark::DoNotOptimize(fk::assemble_tomography(g));
}
BENCHMARK(BM_TomoAssembly)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DeblurMatvec(benchmark::State& state) {
  const auto side = state.range(0);
  const fk::ReflexiveBlurOperator a(side, side, fk::make_psf({fk::PsfKind::disk, 4.0}));
  const fk::Vector x = random_vector(side * side, 4);
  for (auto _ : state) benchmark::DoNotOptimize(a.apply(x));
}
BENCHMARK(BM_DeblurMatvec)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FlsqrIHeat(benchmark::State& state) {
  fk::ProblemSpec spec;
  spec.n = 512;
  spec.noise_level = 1e-4;
  const fk::TestProblem p = fk::generate(spec);
  fk::SolverConfig c;
  c.method = fk::Method::flsqr_i;
  c.stop.max_iterations = static_cast<int>(state.range(0));
  c.stop.stagnation_tol = 0.0;
  c.param.kind = fk::ParamKind::dp_exact;
  c.param.noise_norm = p.e.norm();
  for (auto _ : state) benchmark::DoNotOptimize(fk::run_krylov(p.a, p.b, c).x);
}
BENCHMARK(BM_FlsqrIHeat)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
