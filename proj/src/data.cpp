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

#include "faithedit/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "faithedit/log.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string idx_path(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const char* key, const std::string& where,
                    json::value_t type) {
  if (!obj.contains(key)) throw SchemaError(where + "." + key, "missing field");
  const auto& v = obj[key];
  if (v.type() != type &&
      !(type == json::value_t::number_integer && v.is_number_unsigned())) {
    throw SchemaError(where + "." + key,
                      std::string("expected ") + json(type).type_name() +
                          ", found " + v.type_name());
  }
  return v;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  return require(obj, key, where, json::value_t::string).get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) return std::nullopt;
  return obj[key].get<std::string>();
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(where, e.what());
  }
}

// Codes of one sentence, grouped by annotator.
std::vector<std::vector<std::string>> sentence_codes(const json& entry,
                                                     const std::string& where) {
  std::vector<std::vector<std::string>> out;
  auto codes_of = [&](const json& v, const std::string& at) {
    std::vector<std::string> codes;
    if (v.is_string()) {
      codes.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& c : v) {
        if (!c.is_string()) throw SchemaError(at, "error codes must be strings");
        codes.push_back(c.get<std::string>());
      }
    } else {
      throw SchemaError(at, "expected a code list");
    }
    return codes;
  };
  if (entry.is_object()) {
    for (const auto& [annotator, v] : entry.items()) {
      out.push_back(codes_of(v, where + "." + annotator));
    }
  } else if (entry.is_array() && !entry.empty() &&
             std::all_of(entry.begin(), entry.end(),
                         [](const json& v) { return v.is_array(); })) {
    for (std::size_t i = 0; i < entry.size(); ++i) {
      out.push_back(codes_of(entry[i], where + "[" + std::to_string(i) + "]"));
    }
  } else if (entry.is_array()) {
    out.push_back(codes_of(entry, where));
  } else {
    throw SchemaError(where, "expected an object or array of error codes");
  }
  return out;
}

bool is_no_error(std::string_view code) {
  return text::iequals(code, "NoE") || text::iequals(code, "none");
}

std::vector<std::pair<std::size_t, std::size_t>> whitespace_tokens(
    std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size()) break;
    const std::size_t b = i;
    while (i < s.size() && !text::is_space(s[i])) ++i;
    out.emplace_back(b, i);
  }
  return out;
}

std::optional<long long> parse_int(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  bool neg = false;
  if (s.front() == '-') {
    neg = true;
    s.remove_prefix(1);
  }
  if (!all_digits(s)) return std::nullopt;
  return (neg ? -1 : 1) * std::stoll(std::string(s));
}

ojson string_or_null(const std::optional<std::string>& s) {
  return s ? ojson(*s) : ojson(nullptr);
}

}  // namespace

std::vector<NormalizedRecord> parse_frank(std::string_view json_text,
                                          const std::string& source_name,
                                          const FrankOptions& options) {
  const json doc = parse_json(json_text, source_name);
  if (!doc.is_array()) throw SchemaError("$", "expected a list of records");
  std::vector<NormalizedRecord> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto where = idx_path("$", i);
    const auto& rec = doc[i];
    if (!rec.is_object()) throw SchemaError(where, "expected an object");
    NormalizedRecord r;
    r.source_kind = "frank";
    r.source_file = source_name;
    r.source_index = i;

    if (!rec.contains("hash")) throw SchemaError(where + ".hash", "missing field");
    const auto& h = rec["hash"];
    if (!h.is_string() && !h.is_number_integer()) {
      throw SchemaError(where + ".hash", "expected a string or integer");
    }
    const std::string hash = h.is_string() ? h.get<std::string>() : h.dump();
    r.system = require_string(rec, "model_name", where);
    r.pair.id = hash + ":" + r.system;
    if (!seen.insert(r.pair.id).second) {
      throw SchemaError(where, "duplicate record id " + r.pair.id);
    }
    r.pair.article = require_string(rec, "article", where);
    r.pair.input_summary = require_string(rec, "summary", where);
    r.pair.reference_summary = optional_string(rec, "reference");
    if (auto ds = optional_string(rec, "dataset")) {
      auto parsed = parse_dataset(*ds);
      if (!parsed) throw SchemaError(where + ".dataset", "unknown dataset " + *ds);
      r.pair.dataset = *parsed;
    } else {
      r.pair.dataset = all_digits(hash) ? Dataset::XSum : Dataset::CnnDm;
    }

    const auto& anns = require(rec, "summary_sentences_annotations", where,
                               json::value_t::array);
    if (anns.empty()) {
      throw SchemaError(where + ".summary_sentences_annotations",
                        "no sentence annotations");
    }
    if (rec.contains("summary_sentences") && rec["summary_sentences"].is_array() &&
        rec["summary_sentences"].size() != anns.size()) {
      throw SchemaError(where + ".summary_sentences_annotations",
                        "length differs from summary_sentences");
    }
    std::vector<int> labels;
    ErrorTypeSet types;
    for (std::size_t s = 0; s < anns.size(); ++s) {
      const auto at = idx_path(where + ".summary_sentences_annotations", s);
      const auto per_annotator = sentence_codes(anns[s], at);
      std::map<ErrorType, int> type_votes;
      int marking = 0;
      for (const auto& codes : per_annotator) {
        bool marked = false;
        std::set<ErrorType> mine;
        for (const auto& code : codes) {
          if (is_no_error(code)) continue;
          marked = true;
          if (auto t = parse_error_type(code)) {
            mine.insert(*t);
          } else {
            log::warn(at + ": unknown error code '" + code + "'");
          }
        }
        if (marked) ++marking;
        for (auto t : mine) ++type_votes[t];
      }
      const int need = options.label_rule == LabelRule::Majority ? 2 : 1;
      labels.push_back(marking >= need ? 1 : 0);
      for (const auto& [t, votes] : type_votes) {
        if (votes >= need) types.insert(t);
      }
    }
    r.pair.sentence_labels = std::move(labels);
    r.pair.gold_error_types = std::move(types);
    const auto score = summary_level_score(*r.pair.sentence_labels);
    r.has_error = binarize_human(score) == Faithfulness::Unfaithful;

    if (options.xsum_spans != nullptr) {
      const auto it = options.xsum_spans->find(r.pair.id);
      if (it != options.xsum_spans->end() && it->second.majority_span) {
        r.pair.gold_span = it->second.majority_span;
      }
    }
    try {
      validate(r.pair);
    } catch (const SchemaError& e) {
      throw SchemaError(where, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<NormalizedRecord> load_frank(const std::string& path,
                                         const FrankOptions& options) {
  const auto content = text::read_file(path);
  try {
    return parse_frank(content, path, options);
  } catch (const SchemaError& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw SchemaError("csv", "unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

SpanAnnotation majority_vote(std::string_view summary,
                             const std::vector<std::string>& annotators,
                             const std::vector<MarkedSpan>& spans) {
  const auto tokens = whitespace_tokens(summary);
  std::vector<std::string> ids = annotators;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  SpanAnnotation out;
  std::vector<int> votes(tokens.size(), 0);
  for (const auto& id : ids) {
    std::vector<bool> marked(tokens.size(), false);
    std::optional<std::pair<std::size_t, std::size_t>> hull;
    for (const auto& s : spans) {
      if (s.annotator != id || s.end <= s.start) continue;
      const std::size_t b = std::min(s.start, summary.size());
      const std::size_t e = std::min(s.end, summary.size());
      if (e <= b) continue;
      hull = hull ? std::make_pair(std::min(hull->first, b), std::max(hull->second, e))
                  : std::make_pair(b, e);
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (tokens[t].first < e && b < tokens[t].second) marked[t] = true;
      }
    }
    for (std::size_t t = 0; t < tokens.size(); ++t) votes[t] += marked[t] ? 1 : 0;
    if (hull) {
      out.annotator_spans.emplace_back(std::string(
          text::trim(summary.substr(hull->first, hull->second - hull->first))));
    } else {
      out.annotator_spans.emplace_back(std::nullopt);
    }
  }

  std::size_t best_len = 0;
  std::size_t best_start = 0;
  std::size_t run = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    run = votes[t] >= 2 ? run + 1 : 0;
    if (run > best_len) {
      best_len = run;
      best_start = t + 1 - run;
    }
  }
  if (best_len > 0) {
    const auto b = tokens[best_start].first;
    const auto e = tokens[best_start + best_len - 1].second;
    out.majority_span = std::string(summary.substr(b, e - b));
  }
  return out;
}

std::map<std::string, SpanAnnotation> parse_xsum_spans(
    std::string_view csv_text, const std::string& source_name) {
  const auto rows = parse_csv(csv_text);
  if (rows.empty()) throw SchemaError(source_name, "empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    col[std::string(text::trim(rows[0][c]))] = c;
  }
  for (const char* name : {"bbcid", "system", "summary", "hallucinated_span_start",
                           "hallucinated_span_end", "worker_id"}) {
    if (!col.count(name)) {
      throw SchemaError(source_name, std::string("missing column ") + name);
    }
  }

  struct Group {
    std::string summary;
    std::vector<std::string> annotators;
    std::vector<MarkedSpan> spans;
  };
  std::map<std::string, Group> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = "row " + std::to_string(r);
    if (row.size() < rows[0].size()) {
      throw SchemaError(where, "expected " + std::to_string(rows[0].size()) +
                                   " fields, found " + std::to_string(row.size()));
    }
    const std::string id =
        std::string(text::trim(row[col["bbcid"]])) + ":" +
        std::string(text::trim(row[col["system"]]));
    auto& g = groups[id];
    const auto& summary = row[col["summary"]];
    if (g.annotators.empty()) {
      g.summary = summary;
    } else if (g.summary != summary) {
      throw SchemaError(where, "summary differs between rows of " + id);
    }
    const std::string worker(text::trim(row[col["worker_id"]]));
    g.annotators.push_back(worker);
    const auto sv = std::string(text::trim(row[col["hallucinated_span_start"]]));
    const auto ev = std::string(text::trim(row[col["hallucinated_span_end"]]));
    if (sv.empty() || text::iequals(sv, "null") || text::iequals(sv, "nan")) continue;
    const auto s = parse_int(sv);
    const auto e = parse_int(ev);
    if (!s || !e) throw SchemaError(where, "span offsets must be integers");
    if (*s < 0 || *e <= *s) continue;
    g.spans.push_back({worker, static_cast<std::size_t>(*s), static_cast<std::size_t>(*e)});
  }

  std::map<std::string, SpanAnnotation> out;
  for (const auto& [id, g] : groups) {
    out.emplace(id, majority_vote(g.summary, g.annotators, g.spans));
  }
  return out;
}

std::map<std::string, SpanAnnotation> load_xsum_spans(const std::string& path) {
  const auto content = text::read_file(path);
  try {
    return parse_xsum_spans(content, path);
  } catch (const SchemaError& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<NormalizedRecord> parse_defacto(std::string_view jsonl_text,
                                            const std::string& source_name) {
  std::vector<NormalizedRecord> out;
  std::set<std::string> seen;
  std::size_t row = 0;
  for (auto line : text::split_lines(jsonl_text)) {
    if (text::trim(line).empty()) continue;
    const auto where = "row " + std::to_string(row);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(where, e.what());
    }
    if (!rec.is_object()) throw SchemaError(where, "expected an object");
    NormalizedRecord r;
    r.source_kind = "defacto";
    r.source_file = source_name;
    r.source_index = row;
    if (rec.contains("doc_id") && !rec["doc_id"].is_null()) {
      r.pair.id = rec["doc_id"].is_string() ? rec["doc_id"].get<std::string>()
                                            : rec["doc_id"].dump();
    } else if (rec.contains("id") && !rec["id"].is_null()) {
      r.pair.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
    } else {
      r.pair.id = "defacto-" + std::to_string(row);
    }
    if (!seen.insert(r.pair.id).second) {
      throw SchemaError(where, "duplicate record id " + r.pair.id);
    }
    r.pair.dataset = Dataset::DeFacto;
    r.pair.article = require_string(rec, "article", where);
    r.pair.input_summary = require_string(rec, "candidate", where);
    r.pair.reference_summary = optional_string(rec, "ref_summ");
    const bool has_error =
        require(rec, "has_error", where, json::value_t::boolean).get<bool>();
    r.has_error = has_error;
    r.in_edit_pool = has_error;
    if (has_error) {
      if (!rec.contains("feedback") || !rec["feedback"].is_object()) {
        throw SchemaError(where + ".feedback", "missing feedback object");
      }
      auto edit = optional_string(rec["feedback"], "summary");
      if (!edit || text::trim(*edit).empty()) {
        throw SchemaError(where + ".feedback.summary", "missing human edit");
      }
      r.pair.human_edit = std::move(edit);
    }
    try {
      validate(r.pair);
    } catch (const SchemaError& e) {
      throw SchemaError(where, e.what());
    }
    out.push_back(std::move(r));
    ++row;
  }
  return out;
}

std::vector<NormalizedRecord> load_defacto(const std::string& path) {
  const auto content = text::read_file(path);
  try {
    return parse_defacto(content, path);
  } catch (const SchemaError& e) {
    throw SchemaError(path, e.what());
  }
}

std::string record_to_json(const NormalizedRecord& r) {
  ojson j;
  j["id"] = r.pair.id;
  j["dataset"] = to_string(r.pair.dataset);
  j["article"] = r.pair.article;
  j["input_summary"] = r.pair.input_summary;
  j["sentence_labels"] =
      r.pair.sentence_labels ? ojson(*r.pair.sentence_labels) : ojson(nullptr);
  if (r.pair.gold_error_types) {
    ojson types = ojson::array();
    for (auto t : *r.pair.gold_error_types) types.push_back(long_name(t));
    j["gold_error_types"] = std::move(types);
  } else {
    j["gold_error_types"] = nullptr;
  }
  j["gold_span"] = string_or_null(r.pair.gold_span);
  j["reference_summary"] = string_or_null(r.pair.reference_summary);
  j["human_edit"] = string_or_null(r.pair.human_edit);
  j["has_error"] = r.has_error ? ojson(*r.has_error) : ojson(nullptr);
  j["in_edit_pool"] = r.in_edit_pool;
  j["provenance"] = {{"source_kind", r.source_kind},
                     {"source_file", r.source_file},
                     {"source_index", r.source_index},
                     {"system", r.system}};
  return j.dump();
}

NormalizedRecord record_from_json(std::string_view json_text) {
  const json j = parse_json(json_text, "record");
  if (!j.is_object()) throw SchemaError("record", "expected an object");
  const std::string where = "record";
  NormalizedRecord r;
  r.pair.id = require_string(j, "id", where);
  const auto ds = require_string(j, "dataset", where);
  auto parsed = parse_dataset(ds);
  if (!parsed) throw SchemaError(where + ".dataset", "unknown dataset " + ds);
  r.pair.dataset = *parsed;
  r.pair.article = require_string(j, "article", where);
  r.pair.input_summary = require_string(j, "input_summary", where);
  try {
    if (j.contains("sentence_labels") && !j["sentence_labels"].is_null()) {
      r.pair.sentence_labels = j["sentence_labels"].get<std::vector<int>>();
    }
    if (j.contains("gold_error_types") && !j["gold_error_types"].is_null()) {
      ErrorTypeSet types;
      for (const auto& t : j["gold_error_types"]) {
        const auto s = t.get<std::string>();
        auto et = parse_error_type(s);
        if (!et) throw SchemaError(where + ".gold_error_types", "unknown type " + s);
        types.insert(*et);
      }
      r.pair.gold_error_types = std::move(types);
    }
    if (j.contains("has_error") && !j["has_error"].is_null()) {
      r.has_error = j["has_error"].get<bool>();
    }
    if (j.contains("in_edit_pool")) r.in_edit_pool = j["in_edit_pool"].get<bool>();
    if (j.contains("provenance") && j["provenance"].is_object()) {
      const auto& p = j["provenance"];
      r.source_kind = p.value("source_kind", "");
      r.source_file = p.value("source_file", "");
      r.source_index = p.value("source_index", std::size_t{0});
      r.system = p.value("system", "");
    }
  } catch (const json::exception& e) {
    throw SchemaError(where, e.what());
  }
  r.pair.gold_span = optional_string(j, "gold_span");
  r.pair.reference_summary = optional_string(j, "reference_summary");
  r.pair.human_edit = optional_string(j, "human_edit");
  if (!r.has_error && r.pair.sentence_labels && !r.pair.sentence_labels->empty()) {
    r.has_error = binarize_human(summary_level_score(*r.pair.sentence_labels)) ==
                  Faithfulness::Unfaithful;
  }
  validate(r.pair);
  return r;
}

void save_corpus(const std::vector<NormalizedRecord>& records,
                 const std::string& path) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  text::write_file_atomic(path, out);
}

std::vector<NormalizedRecord> load_corpus(const std::string& path) {
  const auto content = text::read_file(path);
  std::vector<NormalizedRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto where = path + ":" + std::to_string(line_no);
    try {
      out.push_back(record_from_json(line));
    } catch (const SchemaError& e) {
      throw SchemaError(where, e.what());
    }
    if (!seen.insert(out.back().pair.id).second) {
      throw SchemaError(where, "duplicate record id " + out.back().pair.id);
    }
  }
  return out;
}

std::vector<NormalizedRecord> subsample(const std::vector<NormalizedRecord>& records,
                                        std::size_t n, std::uint64_t seed) {
  if (n >= records.size()) return records;
  std::vector<NormalizedRecord> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::sample(records.begin(), records.end(), std::back_inserter(out), n, rng);
  return out;
}

}  // namespace faithedit
