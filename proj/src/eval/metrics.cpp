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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "faithedit/eval.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit::eval {

namespace {

bool token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> toks,
                                                  int n) {
  std::unordered_map<std::string, int> counts;
  const auto un = static_cast<std::size_t>(n);
  if (toks.size() < un) return counts;
  for (std::size_t i = 0; i + un <= toks.size(); ++i) {
    std::string key = toks[i];
    for (std::size_t k = 1; k < un; ++k) {
      key.push_back('\x1f');
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::OutOfRange, "length mismatch: " + std::to_string(a) +
                                           " vs " + std::to_string(b));
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (token_byte(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

RougeScore make_rouge(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0 ? overlap / cand_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "ROUGE-N needs n >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  double overlap = 0;
  for (const auto& [gram, c] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  const auto un = static_cast<std::size_t>(n);
  const double ct = candidate.size() >= un ? double(candidate.size() - un + 1) : 0.0;
  const double rt = reference.size() >= un ? double(reference.size() - un + 1) : 0.0;
  return make_rouge(overlap, ct, rt);
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  const auto c = tokenize(candidate);
  const auto r = tokenize(reference);
  return rouge_n(c, r, n);
}

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  std::vector<int> prev(reference.size() + 1, 0);
  std::vector<int> cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1]
                   ? prev[j - 1] + 1
                   : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return make_rouge(prev[reference.size()], double(candidate.size()),
                    double(reference.size()));
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize(candidate);
  const auto r = tokenize(reference);
  return rouge_l(c, r);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double mean_rank = (double(i + 1) + double(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_lengths(xs.size(), ys.size());
  if (xs.size() < 2) {
    throw Error(ErrorCode::DegenerateInput, "correlation needs at least 2 points");
  }
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_lengths(xs.size(), ys.size());
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double balanced_accuracy(std::span<const Faithfulness> predicted,
                         std::span<const Faithfulness> gold) {
  check_lengths(predicted.size(), gold.size());
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == Faithfulness::Unfaithful) {
      ++pos;
      if (predicted[i] == Faithfulness::Unfaithful) ++tp;
    } else {
      ++neg;
      if (predicted[i] == Faithfulness::Faithful) ++tn;
    }
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::MissingClass, "gold labels need both classes");
  }
  return (double(tp) / double(pos) + double(tn) / double(neg)) / 2.0;
}

double type_macro_f1(std::span<const ErrorTypeSet> predicted,
                     std::span<const ErrorTypeSet> gold) {
  check_lengths(predicted.size(), gold.size());
  if (gold.empty()) throw Error(ErrorCode::EmptyInput, "no records");
  double sum = 0;
  int counted = 0;
  for (auto t : kAllErrorTypes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool p = predicted[i].count(t) > 0;
      const bool g = gold[i].count(t) > 0;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    if (tp + fp + fn == 0) continue;
    sum += 2.0 * double(tp) / double(2 * tp + fp + fn);
    ++counted;
  }
  if (counted == 0) throw Error(ErrorCode::EmptyInput, "no error types to score");
  return sum / counted;
}

RougeTriple rouge_triple(std::string_view candidate, std::string_view reference) {
  const auto c = tokenize(candidate);
  const auto r = tokenize(reference);
  return {rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)};
}

CorpusRouge mean_rouge(std::span<const RougeTriple> items) {
  CorpusRouge out;
  out.n = items.size();
  if (items.empty()) return out;
  for (const auto& t : items) {
    out.r1 += t.r1.f1;
    out.r2 += t.r2.f1;
    out.rl += t.rl.f1;
  }
  const double scale = 100.0 / double(items.size());
  out.r1 *= scale;
  out.r2 *= scale;
  out.rl *= scale;
  return out;
}

}  // namespace faithedit::eval
