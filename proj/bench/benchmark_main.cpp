// Wall-clock comparison of the serial reference kernels against their
// OpenMP counterparts. The two paths are bit-identical by construction
// (verified in tests/test_mc_parallel.cpp); this target only measures the
// speedup on this machine.

#include <chrono>
#include <cstdint>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "girsanov/likelihood.hpp"
#include "girsanov/martingale_verify.hpp"
#include "girsanov/mc.hpp"

using namespace girsanov;

namespace {

double run_ms(void (*fn)(Execution), Execution exec) {
  const auto t0 = std::chrono::steady_clock::now();
  fn(exec);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

const GeneratorMatrix& q0_fixture() {
  static const GeneratorMatrix q(Matrix{
      {-3.0, 1.0, 1.5, 0.5},
      {0.8, -2.0, 0.6, 0.6},
      {1.0, 0.5, -2.5, 1.0},
      {0.4, 0.8, 0.8, -2.0},
  });
  return q;
}

void ctmc_batch(Execution exec) {
  const CtmcControl ctrl = constant_coefficients(
      QuadraticCoefficients{{0.1, 0.1, 0.1, 0.1}, {1.2, 1.2, 1.2, 1.2}});
  sample_ctmc_batch(Distribution::uniform(4), q0_fixture(), &ctrl, 2.0, 200'000, 1, exec);
}

void discrete_batch(Execution exec) {
  const StochasticMatrix p0(Matrix{
      {0.4, 0.2, 0.2, 0.2},
      {0.1, 0.5, 0.2, 0.2},
      {0.3, 0.3, 0.2, 0.2},
      {0.25, 0.25, 0.25, 0.25},
  });
  const DiscreteControl ctrl = constant_control(StochasticMatrix(Matrix{
      {0.3, 0.3, 0.2, 0.2},
      {0.2, 0.4, 0.2, 0.2},
      {0.25, 0.25, 0.3, 0.2},
      {0.2, 0.3, 0.25, 0.25},
  }));
  sample_discrete_batch(Distribution::uniform(4), p0, &ctrl, 16, 500'000, 2, exec);
}

void dynkin_batch(Execution exec) {
  const std::vector<double> f{1.0, -0.5, 0.25, 0.0};
  check_dynkin_mc(Distribution::uniform(4), q0_fixture(), nullptr, nullptr, f, 2.0, 200'000, 3,
                  exec);
}

void report(const char* name, void (*fn)(Execution)) {
  fn(Execution::Serial);  // warm up allocators and caches
  const double serial = run_ms(fn, Execution::Serial);
  const double parallel = run_ms(fn, Execution::Parallel);
  std::printf("%-18s serial %8.1f ms   openmp %8.1f ms   speedup %.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run serially\n");
#endif
  report("ctmc batch", ctmc_batch);
  report("discrete batch", discrete_batch);
  report("dynkin check", dynkin_batch);
  return 0;
}
