// serial reference vs OpenMP kernels on the default 64 x 16 x 32 grid
#include "greenmass/asymptotic_expansion.hpp"
#include "greenmass/elliptic_green.hpp"
#include "greenmass/kernels.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

using namespace greenmass;
namespace K = greenmass::kernels;

namespace {

std::shared_ptr<const SphericalGrid> grid() {
  static auto g = std::make_shared<const SphericalGrid>(GridSpec{});
  return g;
}

const FluxOperator& op() {
  static const FluxOperator o = assemble_operator(grid(), MetricModel::bump(Vec3(1.0, 0.5, 0.75), 1.0, 0.5));
  return o;
}

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

const PotentialField& pot() {
  static const PotentialField p = [] {
    auto g = grid();
    static const GreensSolution s = solve_green(g, MetricModel::bump(Vec3(1.0, 0.5, 0.75), 1.0, 0.5));
    return newtonian_potential(s);
  }();
  return p;
}

std::vector<Vec3> targets() {
  const auto& lat = potential_lattice();
  std::vector<Vec3> t;
  for (const auto& y : lat.y) t.push_back(16.0 * y);
  return t;
}

template <bool Par>
void BM_apply(benchmark::State& st) {
  const auto x = noise(grid()->size());
  std::vector<double> y(x.size());
  for (auto _ : st) {
    if constexpr (Par) K::parallel::apply(op().stencil, x, y);
    else K::serial::apply(op().stencil, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Par>
void BM_dot(benchmark::State& st) {
  const auto a = noise(grid()->size()), b = noise(grid()->size());
  for (auto _ : st) benchmark::DoNotOptimize(Par ? K::parallel::dot(a, b) : K::serial::dot(a, b));
}

template <bool Par>
void BM_line_solve(benchmark::State& st) {
  const auto f = K::factor_lines(op().stencil);
  const auto r = noise(grid()->size());
  std::vector<double> z(r.size());
  for (auto _ : st) {
    if constexpr (Par) K::parallel::line_solve(f, r, z);
    else K::serial::line_solve(f, r, z);
    benchmark::DoNotOptimize(z.data());
  }
}

template <bool Par>
void BM_potential(benchmark::State& st) {
  const auto t = targets();
  std::vector<K::PotentialSample> out(t.size());
  for (auto _ : st) {
    if constexpr (Par) K::parallel::potential(pot().sources, t, out);
    else K::serial::potential(pot().sources, t, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_apply<false>)->Name("apply/serial");
BENCHMARK(BM_apply<true>)->Name("apply/parallel");
BENCHMARK(BM_dot<false>)->Name("dot/serial");
BENCHMARK(BM_dot<true>)->Name("dot/parallel");
BENCHMARK(BM_line_solve<false>)->Name("line_solve/serial");
BENCHMARK(BM_line_solve<true>)->Name("line_solve/parallel");
BENCHMARK(BM_potential<false>)->Name("potential/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_potential<true>)->Name("potential/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
