#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "aeroqa/embeddings.hpp"

namespace {

using namespace aeroqa;

void BM_EmbedHashed(benchmark::State& state) {
  const std::string text(static_cast<std::size_t>(state.range(0)), 'a');
  for (auto _ : state) benchmark::DoNotOptimize(embed::embed_hashed(text));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmbedHashed)->Arg(16)->Arg(128)->Arg(1024);

void BM_EmbedBatch(benchmark::State& state) {
  const embed::HashedNgramProvider provider;
  std::vector<std::string> texts;
  for (int i = 0; i < state.range(0); ++i) texts.push_back("Loss of engine power " + std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(provider.embed(texts));
}
BENCHMARK(BM_EmbedBatch)->Arg(10)->Arg(100);

}  // namespace
