#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "fwdflat/analysis.hpp"
#include "fwdflat/expr_parser.hpp"
#include "fwdflat/system_file.hpp"

using namespace fwdflat;

namespace {

std::string data(const std::string& name) { return std::string(FWDFLAT_DATA) + "/" + name; }

Poly random_poly(std::mt19937_64& rng, int terms, int degree) {
  const char* vars[] = {"x", "y", "z"};
  std::uniform_int_distribution<int> coef(-9, 9), exp(0, degree), var(0, 2);
  Poly p;
  for (int i = 0; i < terms; ++i) {
    Poly t(coef(rng));
    for (int j = 0; j < degree; ++j)
      if (exp(rng) > 0) t = t * Poly::variable(vars[var(rng)]);
    p = p + t;
  }
  return p;
}

}  // namespace

static void BM_GcdCoprime(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int deg = static_cast<int>(state.range(0));
  Poly a = random_poly(rng, 8, deg), b = random_poly(rng, 8, deg);
  for (auto _ : state) benchmark::DoNotOptimize(gcd(a, b));
}
BENCHMARK(BM_GcdCoprime)->Arg(2)->Arg(4)->Arg(6);

static void BM_GcdCommonFactor(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int deg = static_cast<int>(state.range(0));
  Poly g = random_poly(rng, 4, deg);
  Poly a = g * random_poly(rng, 6, deg), b = g * random_poly(rng, 6, deg);
  for (auto _ : state) benchmark::DoNotOptimize(gcd(a, b));
}
BENCHMARK(BM_GcdCommonFactor)->Arg(2)->Arg(3)->Arg(4);

static void BM_ScalarArithmetic(benchmark::State& state) {
  Scalar a = parse_scalar("(x^2 + 3*y*z - 1)/(x*y + 2)");
  Scalar b = parse_scalar("(y^2 - z)/(x + y*z + 1)");
  for (auto _ : state) benchmark::DoNotOptimize((a + b) * (a - b) / (a * b + 1));
}
BENCHMARK(BM_ScalarArithmetic);

static void BM_ScalarDifferentiate(benchmark::State& state) {
  Scalar a = parse_scalar("(x^3*y + 3*y*z^2 - 1)/(x*y + 2*z + 1)^2");
  for (auto _ : state) benchmark::DoNotOptimize(differentiate(a, "x"));
}
BENCHMARK(BM_ScalarDifferentiate);

static void BM_ScalarSubstitute(benchmark::State& state) {
  Scalar a = parse_scalar("(x^2 + 3*y*z - 1)/(x*y + 2)");
  Bindings b{{"x", parse_scalar("(y + z)/(y - 1)")}, {"y", parse_scalar("z^2 + 1")}};
  for (auto _ : state) benchmark::DoNotOptimize(substitute(a, b));
}
BENCHMARK(BM_ScalarSubstitute);

static void BM_AnalyzeFixture(benchmark::State& state, const char* file, bool decompose) {
  DiscreteSystem sys = parse_system(data(file));
  AnalysisOptions opt;
  opt.decompose = decompose;
  for (auto _ : state) benchmark::DoNotOptimize(analyze(sys, opt));
}
BENCHMARK_CAPTURE(BM_AnalyzeFixture, example, "example.sys", false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AnalyzeFixture, example_decompose, "example.sys", true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AnalyzeFixture, random_flat_3, "random_flat_3.sys", true)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
