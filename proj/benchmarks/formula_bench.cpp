#include <benchmark/benchmark.h>

#include <string>

#include "gridlayers/formula.hpp"

namespace gl = gridlayers;

namespace {

std::string nested_formula(int depth) {
  std::string text = "A1";
  for (int i = 0; i < depth; ++i) text = "SUM(" + text + ",B" + std::to_string(i + 1) + ":C" + std::to_string(i + 5) + ",2*D1)";
  return "=" + text;
}

void BM_Parse(benchmark::State& state) {
  const std::string text = nested_formula(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gl::parse_formula(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(1)->Arg(4)->Arg(16);

void BM_Print(benchmark::State& state) {
  const gl::Expr ast = gl::parse_formula(nested_formula(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(gl::print_formula(ast));
}
BENCHMARK(BM_Print)->Arg(1)->Arg(4)->Arg(16);

}  // namespace
