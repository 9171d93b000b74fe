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

// Corpus-level ROUGE. Each item is independent, so the parallel version only
// distributes items; any reduction happens afterwards in input order.

#include "faithedit/eval.hpp"

namespace faithedit::eval {

namespace {

void check(std::span<const std::string> c, std::span<const std::string> r) {
  if (c.size() != r.size()) {
    throw Error(ErrorCode::OutOfRange, "candidate/reference count mismatch");
  }
}

}  // namespace

namespace serial {

std::vector<RougeTriple> corpus_rouge(std::span<const std::string> candidates,
                                      std::span<const std::string> references) {
  check(candidates, references);
  std::vector<RougeTriple> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out[i] = rouge_triple(candidates[i], references[i]);
  }
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<RougeTriple> corpus_rouge(std::span<const std::string> candidates,
                                      std::span<const std::string> references) {
  check(candidates, references);
  std::vector<RougeTriple> out(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = rouge_triple(candidates[k], references[k]);
  }
  return out;
}

}  // namespace parallel

}  // namespace faithedit::eval
