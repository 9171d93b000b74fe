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

// Dataset ingestion into the normalized corpus format (docs/schemas.md).

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faithedit/core.hpp"

namespace faithedit {

struct NormalizedRecord {
  DocumentSummaryPair pair;
  // "frank", "defacto" or "jsonl".
  std::string source_kind;
  std::string source_file;
  std::size_t source_index = 0;
  // Summarization system that produced input_summary, when known.
  std::string system;
  // Human judgment that the input summary contains an error.
  std::optional<bool> has_error;
  bool in_edit_pool = true;

  bool operator==(const NormalizedRecord&) const = default;
};

struct SpanAnnotation {
  // One entry per annotator (sorted by annotator id); nullopt when the
  // annotator marked nothing.
  std::vector<std::optional<std::string>> annotator_spans;
  std::optional<std::string> majority_span;

  bool operator==(const SpanAnnotation&) const = default;
};

// A sentence is labeled 1 when any annotator marks an error on it, or, under
// Majority, when at least two do.
enum class LabelRule { AnyAnnotator, Majority };

struct FrankOptions {
  LabelRule label_rule = LabelRule::AnyAnnotator;
  // Keyed by "<bbcid>:<system>", joined onto pair ids as gold_span.
  const std::map<std::string, SpanAnnotation>* xsum_spans = nullptr;
};

std::vector<NormalizedRecord> load_frank(const std::string& path,
                                         const FrankOptions& options = {});
std::vector<NormalizedRecord> parse_frank(std::string_view json_text,
                                          const std::string& source_name,
                                          const FrankOptions& options = {});

// One marked character range [start, end) by one annotator.
struct MarkedSpan {
  std::string annotator;
  std::size_t start = 0;
  std::size_t end = 0;
};

// Token-level vote: a whitespace token is marked by an annotator when any of
// their ranges overlaps it; the majority span is the longest run of tokens
// marked by at least two annotators (earliest on ties).
SpanAnnotation majority_vote(std::string_view summary,
                             const std::vector<std::string>& annotators,
                             const std::vector<MarkedSpan>& spans);

std::map<std::string, SpanAnnotation> load_xsum_spans(const std::string& path);
std::map<std::string, SpanAnnotation> parse_xsum_spans(std::string_view csv_text,
                                                       const std::string& source_name);

std::vector<NormalizedRecord> load_defacto(const std::string& path);
std::vector<NormalizedRecord> parse_defacto(std::string_view jsonl_text,
                                            const std::string& source_name);

// RFC 4180 CSV: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string record_to_json(const NormalizedRecord& record);
NormalizedRecord record_from_json(std::string_view json_text);

void save_corpus(const std::vector<NormalizedRecord>& records,
                 const std::string& path);
std::vector<NormalizedRecord> load_corpus(const std::string& path);

// Deterministic subsample of `n` records (input order kept) for seed `seed`.
std::vector<NormalizedRecord> subsample(const std::vector<NormalizedRecord>& records,
                                        std::size_t n, std::uint64_t seed);

}  // namespace faithedit
