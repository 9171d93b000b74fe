// Copyright 2026 The faithedit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Serial against OpenMP corpus ROUGE over synthetic summary pairs.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "faithedit/eval.hpp"

namespace {

struct Corpus {
  std::vector<std::string> candidates;
  std::vector<std::string> references;
};

const Corpus& corpus(std::size_t n) {
  static std::map<std::size_t, Corpus> cache;
  auto& c = cache[n];
  if (!c.candidates.empty()) return c;
  std::mt19937 rng(99);
  const std::vector<std::string> vocab = {
      "the", "council", "voted", "on", "tuesday", "to", "expand", "ferry", "service",
      "new", "route", "links", "port", "with", "campus", "first", "boats", "sail", "in",
      "may", "mayor", "said", "million", "pounds", "bridge", "river", "opened", "friday"};
  auto sentence = [&](int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
      if (i) s += ' ';
      s += vocab[rng() % vocab.size()];
    }
    return s + ".";
  };
  for (std::size_t i = 0; i < n; ++i) {
    c.candidates.push_back(sentence(20 + static_cast<int>(rng() % 40)));
    c.references.push_back(sentence(20 + static_cast<int>(rng() % 40)));
  }
  return c;
}

void BM_SerialCorpusRouge(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(faithedit::eval::serial::corpus_rouge(c.candidates, c.references));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParallelCorpusRouge(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(faithedit::eval::parallel::corpus_rouge(c.candidates, c.references));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_SerialCorpusRouge)->Arg(256)->Arg(4096)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelCorpusRouge)->Arg(256)->Arg(4096)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
