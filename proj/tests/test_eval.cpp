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
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "faithedit/eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace faithedit {
namespace {

using namespace std::chrono_literals;
using Tokens = std::vector<std::string>;

// ---- ROUGE against brute-force oracles.

TEST(Rouge, ExhaustiveUpToSixTokens) {
  const auto seqs = oracle::all_sequences(6);
  ASSERT_EQ(seqs.size(), 1093u);
  std::vector<Tokens> words;
  for (const auto& q : seqs) words.push_back(oracle::words(q));
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    for (std::size_t j = 0; j < seqs.size(); ++j) {
      ASSERT_NEAR(eval::rouge_n(words[i], words[j], 1).f1, oracle::rouge_n(seqs[i], seqs[j], 1), 1e-9);
      ASSERT_NEAR(eval::rouge_n(words[i], words[j], 2).f1, oracle::rouge_n(seqs[i], seqs[j], 2), 1e-9);
      ASSERT_NEAR(eval::rouge_l(words[i], words[j]).f1, oracle::rouge_l(seqs[i], seqs[j]), 1e-9);
    }
  }
}

TEST(Rouge, HandComputed) {
  // candidate "the cat sat", reference "the cat sat down": P=1, R=.75.
  EXPECT_NEAR(eval::rouge_n("The cat sat.", "the cat sat down", 1).f1, 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(eval::rouge_n("The cat sat.", "the cat sat down", 2).f1, 0.8, 1e-12);
  EXPECT_NEAR(eval::rouge_l("sat the cat", "the cat sat").f1, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(eval::rouge_l("", "anything").f1, 0.0);
  EXPECT_THROW(eval::rouge_n("a", "a", 0), Error);
}

TEST(Rouge, TokenizerLowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(eval::tokenize("Hello, World! it's 2-1"),
            (Tokens{"hello", "world", "it", "s", "2", "1"}));
  EXPECT_EQ(eval::tokenize("caf\xC3\xA9 ok"), (Tokens{"caf\xC3\xA9", "ok"}));
  EXPECT_TRUE(eval::tokenize(" ..; ").empty());
}

TEST(Rouge, SerialAndParallelKernelsAgree) {
  std::mt19937 rng(17);
  const char* words[] = {"river", "bridge", "opened", "on", "friday", "the", "mayor", "a"};
  std::vector<std::string> cands, refs;
  for (int i = 0; i < 500; ++i) {
    std::string c, r;
    for (unsigned k = 0; k < 3 + rng() % 12; ++k) c += std::string(words[rng() % 8]) + " ";
    for (unsigned k = 0; k < 3 + rng() % 12; ++k) r += std::string(words[rng() % 8]) + " ";
    cands.push_back(c);
    refs.push_back(r);
  }
  const auto s = eval::serial::corpus_rouge(cands, refs);
  const auto p = eval::parallel::corpus_rouge(cands, refs);
  ASSERT_EQ(s.size(), p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].r1.f1, p[i].r1.f1);
    EXPECT_EQ(s[i].r2.f1, p[i].r2.f1);
    EXPECT_EQ(s[i].rl.f1, p[i].rl.f1);
  }
  const auto m = eval::mean_rouge(s);
  EXPECT_EQ(m.n, 500u);
  double sum = 0;
  for (const auto& t : s) sum += t.r1.f1;
  EXPECT_NEAR(m.r1, 100.0 * sum / 500.0, 1e-9);
  EXPECT_THROW(eval::serial::corpus_rouge(cands, std::span(refs).first(3)), Error);
}

// ---- Correlation and accuracy.

TEST(Correlation, TextbookValues) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  EXPECT_NEAR(eval::pearson(x, y), 6.0 / std::sqrt(60.0), 1e-12);
  // Ranks of y: 1, 2.5, 4.5, 2.5, 4.5.
  EXPECT_EQ(eval::average_ranks(y), (std::vector<double>{1, 2.5, 4.5, 2.5, 4.5}));
  const std::vector<double> ry{1, 2.5, 4.5, 2.5, 4.5};
  EXPECT_NEAR(eval::spearman(x, y), eval::pearson(x, ry), 1e-12);
}

TEST(Correlation, RandomVectorsMatchClosedForms) {
  std::mt19937 rng(23);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + rng() % 60;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = noise(rng);
      y[i] = 0.3 * x[i] + noise(rng);
    }
    EXPECT_NEAR(eval::pearson(x, y), oracle::pearson(x, y), 1e-9);
    // Continuous data has no ties, so the closed form applies.
    EXPECT_NEAR(eval::spearman(x, y), oracle::spearman_no_ties(x, y), 1e-9);
  }
}

TEST(Correlation, PropertiesOnTiedIntegerData) {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 6 + rng() % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = double(1 + rng() % 5);
      y[i] = double(1 + rng() % 5);
    }
    x[0] = 1;
    x[1] = 5;
    y[0] = 1;
    y[1] = 5;
    const double r = eval::pearson(x, y);
    EXPECT_GE(r, -1.0 - 1e-12);
    EXPECT_LE(r, 1.0 + 1e-12);
    EXPECT_NEAR(r, eval::pearson(y, x), 1e-12);
    std::vector<double> affine(n);
    for (std::size_t i = 0; i < n; ++i) affine[i] = 3.0 * x[i] - 7.0;
    EXPECT_NEAR(eval::pearson(affine, y), r, 1e-9);
    const auto rx = eval::average_ranks(x), ry = eval::average_ranks(y);
    EXPECT_NEAR(eval::spearman(x, y), eval::pearson(rx, ry), 1e-12);
    EXPECT_NEAR(std::accumulate(rx.begin(), rx.end(), 0.0), double(n * (n + 1)) / 2.0, 1e-9);
  }
}

TEST(Correlation, DegenerateInputs) {
  const std::vector<double> one{1.0}, flat{2, 2, 2}, xs{1, 2, 3}, two{1, 2};
  EXPECT_THROW(eval::pearson(one, one), Error);
  EXPECT_THROW(eval::pearson(flat, xs), Error);
  EXPECT_THROW(eval::spearman(xs, flat), Error);
  try {
    eval::pearson(xs, two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

std::vector<Faithfulness> labels(std::size_t unfaithful, std::size_t faithful) {
  std::vector<Faithfulness> v(unfaithful, Faithfulness::Unfaithful);
  v.insert(v.end(), faithful, Faithfulness::Faithful);
  return v;
}

Faithfulness flip(Faithfulness f) {
  return f == Faithfulness::Faithful ? Faithfulness::Unfaithful : Faithfulness::Faithful;
}

TEST(BalancedAccuracy, ConfusionClosedForm) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t tp = rng() % 20, fn = rng() % 20 + (tp == 0), tn = rng() % 20,
                      fp = rng() % 20 + (tn == 0);
    std::vector<Faithfulness> gold, pred;
    auto add = [&](std::size_t k, Faithfulness g, Faithfulness p) {
      for (std::size_t i = 0; i < k; ++i) {
        gold.push_back(g);
        pred.push_back(p);
      }
    };
    add(tp, Faithfulness::Unfaithful, Faithfulness::Unfaithful);
    add(fn, Faithfulness::Unfaithful, Faithfulness::Faithful);
    add(tn, Faithfulness::Faithful, Faithfulness::Faithful);
    add(fp, Faithfulness::Faithful, Faithfulness::Unfaithful);
    std::shuffle(gold.begin(), gold.end(), std::mt19937(trial));
    std::shuffle(pred.begin(), pred.end(), std::mt19937(trial));
    const double expect = oracle::balanced_accuracy(tp, fn, tn, fp);
    const double got = eval::balanced_accuracy(pred, gold);
    EXPECT_NEAR(got, expect, 1e-12);
    std::vector<Faithfulness> gs(gold.size()), ps(pred.size());
    std::transform(gold.begin(), gold.end(), gs.begin(), flip);
    std::transform(pred.begin(), pred.end(), ps.begin(), flip);
    EXPECT_NEAR(eval::balanced_accuracy(ps, gs), got, 1e-12);
  }
}

TEST(BalancedAccuracy, ConstantPredictorIsHalf) {
  const auto gold = labels(7, 93);
  EXPECT_DOUBLE_EQ(eval::balanced_accuracy(labels(100, 0), gold), 0.5);
  EXPECT_DOUBLE_EQ(eval::balanced_accuracy(labels(0, 100), gold), 0.5);
  EXPECT_DOUBLE_EQ(eval::balanced_accuracy(gold, gold), 1.0);
  try {
    eval::balanced_accuracy(labels(3, 0), labels(3, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingClass);
  }
}

TEST(TypeMacroF1, HandComputed) {
  using E = ErrorType;
  const std::vector<ErrorTypeSet> gold{{E::EntityError}, {E::PredicateError, E::EntityError}, {}};
  const std::vector<ErrorTypeSet> pred{{E::EntityError}, {E::EntityError}, {E::OtherError}};
  // Entity: TP 2 -> 1. Predicate: FN 1 -> 0. Other: FP 1 -> 0.
  EXPECT_NEAR(eval::type_macro_f1(pred, gold), 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(eval::type_macro_f1(gold, gold), 1.0);
  EXPECT_THROW(eval::type_macro_f1(std::vector<ErrorTypeSet>{}, std::vector<ErrorTypeSet>{}),
               Error);
}

// ---- Edit-level metrics.

Round edit_round(int index, const std::string& after, std::optional<ErrorTypeSet> types = {}) {
  Round r;
  r.index = index;
  r.pre_verdict = CriticVerdict{CriticMode::Scale5, 2, "2"};
  EditorOutput out;
  out.edited_summary = after;
  out.error_types = types;
  out.span = "span " + std::to_string(index);
  out.parse_status = ParseStatus::Clean;
  r.editor_output = out;
  r.summary_after = after;
  return r;
}

Round final_round(int index, int score) {
  Round r;
  r.index = index;
  r.pre_verdict = CriticVerdict{CriticMode::Scale5, score, std::to_string(score)};
  return r;
}

SessionTrace trace(const std::string& id, const std::string& input, int edits,
                   TerminalStatus status, std::optional<ErrorTypeSet> types = {}) {
  SessionTrace t;
  t.pair_id = id;
  t.input_summary = input;
  std::string current = input;
  for (int k = 1; k <= edits; ++k) {
    current = input + " edit" + std::to_string(k);
    t.rounds.push_back(edit_round(k, current, types));
  }
  if (status == TerminalStatus::JudgedFaithful) t.rounds.push_back(final_round(edits + 1, 5));
  t.final_summary = current;
  t.terminal_status = status;
  return t;
}

TEST(EditRates, WhitespaceOnlyChangesAreNotEdits) {
  auto a = trace("a", "One two.", 0, TerminalStatus::JudgedFaithful);
  a.final_summary = "  One\n two.  ";
  EXPECT_FALSE(eval::summary_modified(a));
  a.final_summary = "One two!";
  EXPECT_TRUE(eval::summary_modified(a));
}

TEST(EditRates, CountsOverPool) {
  const std::vector<SessionTrace> pool{
      trace("a", "x", 0, TerminalStatus::JudgedFaithful),
      trace("b", "x", 1, TerminalStatus::JudgedFaithful),
      trace("c", "x", 5, TerminalStatus::RoundCapReached),
      trace("d", "x", 2, TerminalStatus::JudgedFaithful),
  };
  const auto r = eval::edit_rates(pool);
  EXPECT_EQ(r.pool, 4u);
  EXPECT_EQ(r.modified, 3u);
  EXPECT_EQ(r.valid, 2u);
  EXPECT_DOUBLE_EQ(r.edit_rate, 75.0);
  EXPECT_DOUBLE_EQ(r.valid_edit_rate, 50.0);
  EXPECT_EQ(eval::critic_flagged(pool).size(), 3u);
  EXPECT_THROW(eval::edit_rates(std::vector<SessionTrace>{}), Error);
}

TEST(Series, RowsAndExitHistogram) {
  std::mt19937 rng(3);
  std::vector<SessionTrace> traces;
  std::map<std::string, double> scores;
  std::size_t expected_rows = 0;
  for (int i = 0; i < 60; ++i) {
    const int edits = static_cast<int>(rng() % 6);
    const auto id = "p" + std::to_string(i);
    traces.push_back(trace(id, "s", edits,
                           edits == 5 ? TerminalStatus::RoundCapReached
                                      : TerminalStatus::JudgedFaithful));
    for (int k = 1; k <= edits; ++k) scores[eval::round_score_id(id, k)] = 0.1 * k;
    expected_rows += std::size_t(edits);
  }
  const auto s = eval::per_round_series(traces, scores);
  EXPECT_EQ(s.rows.size(), expected_rows);
  std::size_t sessions = 0;
  for (const auto& [n, count] : s.exit_histogram) sessions += count;
  EXPECT_EQ(sessions, traces.size());
  for (const auto& row : s.rows) {
    ASSERT_TRUE(row.score.has_value());
    EXPECT_NEAR(*row.score, 0.1 * row.round, 1e-12);
  }
  EXPECT_EQ(eval::final_score_id("x"), "x");
  EXPECT_EQ(eval::input_score_id("x"), "x#input");
  EXPECT_EQ(eval::round_score_id("x", 3), "x#r3");
}

TEST(Slice, SelectsOnGoldAndStrategyBPrediction) {
  using E = ErrorType;
  const std::vector<SessionTrace> a{trace("1", "s", 1, TerminalStatus::JudgedFaithful),
                                    trace("2", "s", 1, TerminalStatus::JudgedFaithful),
                                    trace("3", "s", 1, TerminalStatus::JudgedFaithful)};
  const std::vector<SessionTrace> b{
      trace("1", "s", 1, TerminalStatus::JudgedFaithful, ErrorTypeSet{E::EntityError}),
      trace("2", "s", 1, TerminalStatus::JudgedFaithful, ErrorTypeSet{E::PredicateError}),
      trace("3", "s", 1, TerminalStatus::JudgedFaithful,
            ErrorTypeSet{E::EntityError, E::PredicateError})};
  const std::map<std::string, ErrorTypeSet> gold{
      {"1", {E::EntityError}}, {"2", {E::EntityError}}, {"3", {E::EntityError}}};
  eval::ScoreTable sa{{"qafacteval", {{"1", 0.2}, {"2", 0.9}, {"3", 0.4}}}};
  eval::ScoreTable sb{{"qafacteval", {{"1", 0.6}, {"3", 0.8}}}};
  const auto slice = eval::error_type_slice(a, b, gold, E::EntityError, sa, sb);
  EXPECT_EQ(slice.pair_ids, (std::vector<std::string>{"1", "3"}));
  ASSERT_EQ(slice.rows.size(), 1u);
  EXPECT_NEAR(*slice.rows[0].mean_a, 0.3, 1e-12);
  EXPECT_NEAR(*slice.rows[0].mean_b, 0.7, 1e-12);
  EXPECT_EQ(eval::error_type_slice(a, b, gold, E::OtherError, sa, sb).n(), 0u);
}

// ---- Score files and the scorer service.

TEST(Scores, CsvRoundTripAndMerge) {
  const auto t = eval::parse_score_csv(
      "id,metric,score\n\"a,1\",QAFactEval,0.5\nb,dae,1e-3\nc,dae,\n", "inline");
  EXPECT_EQ(t.at("qafacteval").at("a,1"), 0.5);
  EXPECT_EQ(t.at("dae").at("b"), 0.001);
  EXPECT_FALSE(t.at("dae").count("c"));
  testing::TempDir dir;
  const auto path = (dir / "s.csv").string();
  eval::save_score_file(t, path);
  EXPECT_EQ(eval::load_score_file(path), t);

  auto merged = t;
  eval::merge_scores(merged, {{"dae", {{"b", 0.25}, {"z", 1.0}}}});
  EXPECT_EQ(merged.at("dae").at("b"), 0.25);
  EXPECT_EQ(merged.at("dae").at("z"), 1.0);
  EXPECT_EQ(merged.at("qafacteval").size(), 1u);

  EXPECT_THROW(eval::parse_score_csv("id,score\nx,1\n", "inline"), SchemaError);
  EXPECT_THROW(eval::parse_score_csv("id,metric,score\nx,dae,high\n", "inline"), SchemaError);
}

TEST(Scores, TableLookupLeavesMissingIdsOut) {
  const eval::ScoreTable t{{"dae", {{"a", 0.1}, {"b", 0.2}}}};
  const std::vector<eval::ScoreItem> items{{"a", "", ""}, {"c", "", ""}};
  const auto got = eval::external_scores(t, items, "DAE");
  EXPECT_EQ(got, (std::map<std::string, double>{{"a", 0.1}}));
}

TEST(Scores, ServiceStub) {
  testing::StubServer stub("/score", [](const httplib::Request& req, httplib::Response& res, int) {
    const auto j = nlohmann::json::parse(req.body);
    if (j.at("summary") == "fail") {
      res.status = 500;
      return;
    }
    const double v = j.at("metric") == "dae" ? 0.5 : 0.25;
    res.set_content(nlohmann::json{{"score", v}}.dump(), "application/json");
  });
  eval::ScorerConfig config;
  config.endpoint_url = stub.base_url();
  config.timeout = 2000ms;
  std::vector<eval::ScoreItem> items;
  for (int i = 0; i < 9; ++i) items.push_back({"id" + std::to_string(i), "article", "summary"});
  items.push_back({"bad", "article", "fail"});
  const auto got = eval::external_scores(config, items, "dae");
  EXPECT_EQ(got.size(), 9u);
  for (const auto& [id, v] : got) EXPECT_EQ(v, 0.5) << id;
  EXPECT_EQ(stub.calls(), 10);
}

TEST(Scores, UnreachableServiceIsScorerUnavailable) {
  eval::ScorerConfig config;
  config.endpoint_url = "http://127.0.0.1:" + std::to_string(testing::closed_port());
  config.timeout = 1000ms;
  const std::vector<eval::ScoreItem> items{{"a", "x", "y"}, {"b", "x", "y"}};
  try {
    eval::external_scores(config, items, "dae");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScorerUnavailable);
  }
}

}  // namespace
}  // namespace faithedit
