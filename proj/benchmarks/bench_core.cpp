#include <benchmark/benchmark.h>

#include "irm/basis.hpp"
#include "irm/nlp.hpp"
#include "irm/problems.hpp"
#include "irm/quadrature.hpp"

namespace {

void BM_GaussLegendreBuild(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // Bypass the cache to measure construction.
    auto nodes = irm::lgl_reference_nodes(q);
    benchmark::DoNotOptimize(nodes);
  }
}
BENCHMARK(BM_GaussLegendreBuild)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_BaryEval(benchmark::State& state) {
  const int deg = static_cast<int>(state.range(0));
  const auto s = irm::make_supports(0.0, 1.0, deg);
  Eigen::VectorXd vals = Eigen::VectorXd::LinSpaced(deg + 1, 0.0, 1.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    if (t > 1.0) t = 0.0;
    benchmark::DoNotOptimize(irm::eval_interp(
        s, std::span<const double>(vals.data(), vals.size()), t));
  }
}
BENCHMARK(BM_BaryEval)->Arg(2)->Arg(4)->Arg(8);

void BM_ObjectiveGradient(benchmark::State& state) {
  irm::Config cfg;
  const auto bc = irm::exp_decay(cfg);
  irm::MeshConfig mesh = bc.default_mesh;
  mesh.n_intervals = static_cast<int>(state.range(0));
  const irm::TranscribedNlp nlp(bc.problem, bc.boundary, mesh);
  const Eigen::VectorXd z = nlp.cold_start();
  Eigen::VectorXd grad(z.size());
  for (auto _ : state) {
    nlp.objective_gradient(z, grad);
    benchmark::DoNotOptimize(grad);
  }
}
BENCHMARK(BM_ObjectiveGradient)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
