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

#include <gtest/gtest.h>

#include <random>

#include "faithedit/report.hpp"
#include "test_support.hpp"

namespace faithedit {
namespace {

// Human scores reachable with one to five summary sentences.
std::vector<CriticObservation> observations(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<CriticObservation> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int sentences = 1 + static_cast<int>(rng() % 5);
    const int errors = static_cast<int>(rng() % (sentences + 1));
    CriticObservation o;
    o.id = "p" + std::to_string(i);
    o.dataset = i % 2 ? Dataset::XSum : Dataset::CnnDm;
    o.human_score = double(errors) / double(sentences);
    o.human_unfaithful = errors > 0;
    out.push_back(o);
  }
  return out;
}

void set_verdicts(std::vector<CriticObservation>& obs, const std::function<int(double)>& f) {
  for (auto& o : obs) {
    const int v = f(*o.human_score);
    o.verdict = CriticVerdict{CriticMode::Scale5, v, std::to_string(v)};
  }
}

TEST(CriticReport, OracleCriticIsPerfect) {
  for (auto scheme : {BucketScheme::EqualWidth, BucketScheme::ZeroExclusive}) {
    auto obs = observations(200, 1);
    set_verdicts(obs, [scheme](double h) {
      return bucket_to_likert(HumanFactualityScore(h), scheme).value();
    });
    const auto r = evaluate_critic(obs, CriticMode::Scale5, scheme, "oracle");
    for (const char* name : {"CNN_DM", "XSUM", "overall"}) {
      const auto* p = r.partition(name);
      ASSERT_NE(p, nullptr) << name;
      EXPECT_NEAR(*p->pearson, 1.0, 1e-12) << name;
      EXPECT_NEAR(*p->spearman, 1.0, 1e-12) << name;
      EXPECT_NEAR(*p->balanced_accuracy, 1.0, 1e-12) << name;
      EXPECT_EQ(p->n_unparsed, 0u);
    }
    EXPECT_EQ(r.partition("DEFACTO"), nullptr);
    EXPECT_EQ(r.partition("overall")->n, 200u);
  }
}

TEST(CriticReport, ConstantCriticHasChanceAccuracy) {
  for (int constant : {1, 3, 5}) {
    auto obs = observations(200, 2);
    set_verdicts(obs, [constant](double) { return constant; });
    const auto r = evaluate_critic(obs, CriticMode::Scale5, BucketScheme::EqualWidth, "c");
    const auto* p = r.partition("overall");
    EXPECT_DOUBLE_EQ(*p->balanced_accuracy, 0.5);
    EXPECT_FALSE(p->pearson.has_value());
    EXPECT_FALSE(p->notes.empty());
  }
}

TEST(CriticReport, UnparsedAndFailedAreExcluded) {
  auto obs = observations(40, 3);
  set_verdicts(obs, [](double h) { return bucket_to_likert(HumanFactualityScore(h)).value(); });
  obs[0].verdict = CriticVerdict{CriticMode::Scale5, std::nullopt, "no idea"};
  obs[1].error = "Timeout: slow";
  obs[1].verdict = {};
  const auto r = evaluate_critic(obs, CriticMode::Scale5, BucketScheme::EqualWidth, "x");
  const auto* p = r.partition("overall");
  EXPECT_EQ(p->n, 40u);
  EXPECT_EQ(p->n_unparsed, 2u);
  EXPECT_NEAR(*p->pearson, 1.0, 1e-12);
  EXPECT_EQ(r.failed_ids, std::vector<std::string>{"p1"});
}

TEST(CriticReport, ConfusionArithmetic) {
  // Gold: 4 unfaithful, 6 faithful. Critic flags 3 of the unfaithful and 2
  // of the faithful: (3/4 + 4/6) / 2.
  std::vector<CriticObservation> obs;
  for (int i = 0; i < 10; ++i) {
    CriticObservation o;
    o.id = std::to_string(i);
    o.dataset = Dataset::DeFacto;
    o.human_unfaithful = i < 4;
    const bool flagged = i < 3 || i == 4 || i == 5;
    o.verdict = CriticVerdict{CriticMode::Binary, flagged ? 0 : 1, ""};
    obs.push_back(o);
  }
  const auto r = evaluate_critic(obs, CriticMode::Binary, BucketScheme::EqualWidth, "b");
  const auto* p = r.partition("DEFACTO");
  ASSERT_NE(p, nullptr);
  EXPECT_NEAR(*p->balanced_accuracy, (0.75 + 4.0 / 6.0) / 2.0, 1e-12);
  EXPECT_FALSE(p->pearson.has_value());
}

TEST(CriticReport, ObservationJsonRoundTrip) {
  CriticObservation o;
  o.id = "a:b";
  o.dataset = Dataset::XSum;
  o.verdict = CriticVerdict{CriticMode::Scale5, 4, "Score: 4"};
  o.human_score = 0.25;
  o.human_unfaithful = true;
  EXPECT_EQ(observation_from_json(observation_to_json(o)), o);
  o.error = "ProviderError: 500";
  o.verdict = {};
  o.human_score.reset();
  EXPECT_EQ(observation_from_json(observation_to_json(o)), o);
}

TEST(Tables, CriticTableColumns) {
  auto obs = observations(20, 4);
  set_verdicts(obs, [](double h) { return bucket_to_likert(HumanFactualityScore(h)).value(); });
  const std::vector<CriticEvalReport> reports{
      evaluate_critic(obs, CriticMode::Scale5, BucketScheme::EqualWidth, "oracle")};
  const auto t = critic_table(reports);
  EXPECT_EQ(t.header, (std::vector<std::string>{"Critic", "CNN/DM PCC", "CNN/DM ρ",
                                                "CNN/DM BAcc", "XSum PCC", "XSum ρ",
                                                "XSum BAcc"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"oracle", "1.000", "1.000", "1.000",
                                                 "1.000", "1.000", "1.000"}));
}

SessionTrace edited_trace(const std::string& id, const std::string& input,
                          const std::string& output) {
  SessionTrace t;
  t.pair_id = id;
  t.input_summary = input;
  t.final_summary = output;
  Round r;
  r.pre_verdict = CriticVerdict{CriticMode::Scale5, 2, "2"};
  if (input != output) {
    EditorOutput e;
    e.edited_summary = output;
    e.parse_status = ParseStatus::Clean;
    r.editor_output = e;
    r.summary_after = output;
    t.rounds.push_back(r);
    Round last;
    last.index = 2;
    last.pre_verdict = CriticVerdict{CriticMode::Scale5, 5, "5"};
    t.rounds.push_back(last);
  } else {
    r.pre_verdict = CriticVerdict{CriticMode::Scale5, 5, "5"};
    t.rounds.push_back(r);
  }
  t.terminal_status = TerminalStatus::JudgedFaithful;
  return t;
}

std::map<std::string, NormalizedRecord> corpus_for(const std::vector<SessionTrace>& traces) {
  std::map<std::string, NormalizedRecord> out;
  for (const auto& t : traces) {
    NormalizedRecord rec;
    rec.pair.id = t.pair_id;
    rec.pair.input_summary = t.input_summary;
    rec.pair.reference_summary = "the bridge opened on friday";
    rec.has_error = true;
    out.emplace(t.pair_id, rec);
  }
  return out;
}

TEST(Tables, EditTableHasExactColumnsAndBlankScores) {
  const std::vector<SessionTrace> traces{
      edited_trace("a", "the bridge closed on monday", "the bridge opened on friday"),
      edited_trace("b", "the bridge opened on friday", "the bridge opened on friday"),
  };
  const auto report = build_edit_report(traces, corpus_for(traces), {}, "EditorSpan");
  const std::vector<EditReport> reports{report};
  const auto t = edit_table(reports);
  EXPECT_EQ(t.header, std::vector<std::string>(kTable2Columns.begin(), kTable2Columns.end()));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "Input");
  EXPECT_EQ(t.rows[1][0], "EditorSpan");
  for (int c : {1, 2, 3, 7}) EXPECT_EQ(t.rows[1][c], "") << c;
  EXPECT_EQ(t.rows[1][4], "100.00");
  EXPECT_EQ(t.rows[1][8], "50.00");
  EXPECT_EQ(t.rows[0][8], "");
  // Input a: R1 with 3 of 5 tokens shared = 60; input b: 100.
  EXPECT_EQ(t.rows[0][4], "80.00");
}

TEST(Tables, ScoresFillExternalColumns) {
  const std::vector<SessionTrace> traces{
      edited_trace("a", "the bridge closed", "the bridge opened"),
      edited_trace("b", "a mayor spoke", "the mayor spoke"),
  };
  eval::ScoreTable scores{{"qafacteval", {{"a", 0.5}, {"b", 1.0}, {"a#input", 0.1}}},
                          {"dae", {{"a", 0.25}}}};
  const auto report = build_edit_report(traces, corpus_for(traces), scores, "E");
  EXPECT_NEAR(*report.edited.external.at("qafacteval"), 0.75, 1e-12);
  EXPECT_NEAR(*report.input.external.at("qafacteval"), 0.1, 1e-12);
  EXPECT_NEAR(*report.edited.external.at("dae"), 0.25, 1e-12);
  EXPECT_FALSE(report.edited.external.at("factcc").has_value());
  const std::vector<EditReport> reports{report};
  const auto t = edit_table(reports);
  EXPECT_EQ(t.rows[1][1], "0.75");
  EXPECT_EQ(t.rows[1][3], "");
  EXPECT_EQ(report.terminal_counts.at("JudgedFaithful"), 2u);
}

TEST(Tables, CsvAndMarkdownShape) {
  Table t;
  t.title = "T";
  t.header = {"a", "b"};
  t.rows = {{"1", "x,y"}, {"2", "p|q"}};
  t.notes = {"note"};
  EXPECT_EQ(t.to_csv(), "a,b\n1,\"x,y\"\n2,p|q\n");
  EXPECT_EQ(t.to_markdown(), "### T\n\n| a | b |\n|---|---|\n| 1 | x,y |\n| 2 | p\\|q |\n\nnote\n");
  testing::TempDir dir;
  write_table(t, dir.path(), "t");
  EXPECT_EQ(testing::slurp(dir / "t.csv"), t.to_csv());
  EXPECT_EQ(testing::slurp(dir / "t.md"), t.to_markdown());
}

TEST(Tables, SeriesAndHistogramTsv) {
  eval::RoundSeries s;
  s.rows = {{1, "a", 0.5}, {2, "a", std::nullopt}};
  s.exit_histogram = {{0, 3}, {2, 1}};
  EXPECT_EQ(series_tsv(s), "round\tpair_id\tscore\n1\ta\t0.5\n2\ta\t\n");
  EXPECT_EQ(exit_histogram_tsv(s), "edits\tsessions\n0\t3\n2\t1\n");
}

TEST(Tables, SliceTableRows) {
  eval::ErrorTypeSlice s;
  s.type = ErrorType::EntityError;
  s.pair_ids = {"1", "2"};
  s.rows = {{"dae", 0.5, 0.75}};
  eval::ErrorTypeSlice empty;
  empty.type = ErrorType::OtherError;
  const std::vector<eval::ErrorTypeSlice> slices{s, empty};
  const auto t = slice_table(slices, "Editor", "EditorType");
  EXPECT_EQ(t.header, (std::vector<std::string>{"Error type", "n", "Metric", "Editor",
                                                "EditorType"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "2");
  EXPECT_EQ(t.rows[0][3], "0.50");
  EXPECT_EQ(t.rows[1][1], "0");
}

}  // namespace
}  // namespace faithedit
