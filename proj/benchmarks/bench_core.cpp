// Microbenchmarks for the hot paths of the solver: lattice construction,
// kernel algebra, the exchange convolution, spectral projection, response
// integrals, and the energy assembly.

#include <benchmark/benchmark.h>

#include <bdf/energy.hpp>
#include <bdf/kernel.hpp>
#include <bdf/lattice.hpp>
#include <bdf/response.hpp>
#include <bdf/scf.hpp>

#include <random>

namespace {

using namespace bdf;

LatticePtr desk_lattice() {
  static LatticePtr lat = Lattice::create({6, 1.0, 3.0});
  return lat;
}

KernelOperator random_kernel(const LatticePtr& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  KernelOperator a(lat);
  const int n = a.dim();
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = cxd(gauss(rng), gauss(rng));
  a.raw() = 0.05 * (m + m.adjoint().eval());
  return a;
}

void bm_lattice_build(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const LatticeSpec spec{points, 1.0, points / 2.0};
  for (auto _ : state) {
    auto lat = Lattice::create(spec);
    benchmark::DoNotOptimize(lat->pairs(lat->zero_diff()).size());
  }
}
BENCHMARK(bm_lattice_build)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_exchange_kernel(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator q = random_kernel(lat, 1);
  for (auto _ : state) {
    KernelOperator r = exchange_kernel(q);
    benchmark::DoNotOptimize(r.raw().data());
  }
}
BENCHMARK(bm_exchange_kernel)->Unit(benchmark::kMillisecond);

void bm_compose(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator a = random_kernel(lat, 2);
  const KernelOperator b = random_kernel(lat, 3);
  for (auto _ : state) {
    KernelOperator c = compose(a, b);
    benchmark::DoNotOptimize(c.raw().data());
  }
}
BENCHMARK(bm_compose)->Unit(benchmark::kMillisecond);

void bm_spectral_projector(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator h = free_dirac(lat) + random_kernel(lat, 4);
  for (auto _ : state) {
    SpectralProjection proj = negative_spectral_projector(h, 1e-6);
    benchmark::DoNotOptimize(proj.min_abs_eig);
  }
}
BENCHMARK(bm_spectral_projector)->Unit(benchmark::kMillisecond);

void bm_energy(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator q = random_kernel(lat, 5);
  const DensityField n = source_density(lat, {SourceSpec::Profile::gaussian, 1.0, 1.0});
  for (auto _ : state) {
    EnergyBreakdown e = bdf_energy(q, n, 0.1);
    benchmark::DoNotOptimize(e.total);
  }
}
BENCHMARK(bm_energy)->Unit(benchmark::kMillisecond);

void bm_density_of(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator q = random_kernel(lat, 6);
  for (auto _ : state) {
    DensityField rho = density_of(q);
    benchmark::DoNotOptimize(rho.values().data());
  }
}
BENCHMARK(bm_density_of)->Unit(benchmark::kMillisecond);

void bm_q_norm(benchmark::State& state) {
  const auto lat = desk_lattice();
  const KernelOperator q = random_kernel(lat, 7);
  for (auto _ : state) benchmark::DoNotOptimize(q_norm(q));
}
BENCHMARK(bm_q_norm)->Unit(benchmark::kMillisecond);

void bm_response_radial(benchmark::State& state) {
  const double lambda = std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(b_lambda_1d(1.0, lambda));
}
BENCHMARK(bm_response_radial)->Arg(1)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
