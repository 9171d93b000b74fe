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
#include <sstream>

#include "faithedit/parse.hpp"
#include "faithedit/prompt.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace faithedit {
namespace {

TEST(Critic, ReadsRankingAnswer) {
  EXPECT_EQ(parse_critic("4", CriticMode::Scale5).value, 4);
  EXPECT_EQ(parse_critic("Ranking (5, 4, 3, 2, or 1): 2", CriticMode::Scale5).value, 2);
  EXPECT_EQ(parse_critic("**Ranking:** 5\nThe summary is faithful.", CriticMode::Scale5).value,
            5);
  EXPECT_EQ(parse_critic("I would rate this a 3 out of 5.", CriticMode::Scale5).value, 3);
  EXPECT_EQ(parse_critic("Ranking (1 or 0): 0", CriticMode::Binary).value, 0);
  EXPECT_EQ(parse_critic("1", CriticMode::Binary).value, 1);
}

TEST(Critic, SkipsOutOfRangeAndFractions) {
  EXPECT_EQ(parse_critic("Of the 12 facts, I give 4.", CriticMode::Scale5).value, 4);
  EXPECT_EQ(parse_critic("Score 4.5, so 4", CriticMode::Scale5).value, 4);
  EXPECT_EQ(parse_critic("Rated 3 (binary says 1)", CriticMode::Binary).value, 1);
  EXPECT_EQ(parse_critic("COVID19 aside, 2", CriticMode::Scale5).value, 2);
}

TEST(Critic, NoScore) {
  try {
    parse_critic("The summary is mostly fine.", CriticMode::Scale5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoScoreFound);
  }
  const auto v = parse_critic_lenient("no idea", CriticMode::Binary);
  EXPECT_FALSE(v.parsed());
  EXPECT_EQ(v.raw, "no idea");
  EXPECT_EQ(v.mode, CriticMode::Binary);
  EXPECT_TRUE(critic_needs_edit(v));
}

TEST(Editor, DagenhamRoundOne) {
  const auto raw = testing::slurp(testing::fixture("dagenham_round1.txt"));
  const auto out = parse_editor(raw, EditorStrategy::EditorSpan);
  EXPECT_EQ(out.parse_status, ParseStatus::Clean);
  ASSERT_TRUE(out.span.has_value());
  EXPECT_EQ(*out.span,
            "The article mentions that Dagenham & Redbridge won the match, not that they "
            "lost and Leyton Orient was relegated.");
  EXPECT_TRUE(out.edited_summary.starts_with(
      "Dagenham & Redbridge kept their survival hopes alive"));
  EXPECT_EQ(out.edited_summary,
            "Dagenham & Redbridge kept their survival hopes alive in the National League "
            "after winning against Leyton Orient.");
}

TEST(Editor, MarkdownHeadersAndQuotes) {
  const std::string raw =
      "Let me check the article first.\n\n"
      "**Inconsistent span:** \"voted on Monday\"\n"
      "**Error types:** Circumstance Error\n"
      "**Post-edited summary:** The council voted on Tuesday to expand the ferry.\n"
      "**Reasoning:** The article says Tuesday.\n";
  const auto out = parse_editor(raw, EditorStrategy::EditorSpanType);
  EXPECT_EQ(out.parse_status, ParseStatus::Clean);
  EXPECT_EQ(out.span, "voted on Monday");
  EXPECT_EQ(out.error_types, ErrorTypeSet{ErrorType::CircumstanceError});
  EXPECT_EQ(out.edited_summary, "The council voted on Tuesday to expand the ferry.");
  EXPECT_EQ(out.reasoning, "The article says Tuesday.");
}

TEST(Editor, MissingMandatoryHeaderIsRecovered) {
  const auto out = parse_editor("Post-edited summary: Fixed text.", EditorStrategy::EditorSpan);
  EXPECT_EQ(out.parse_status, ParseStatus::Recovered);
  EXPECT_EQ(out.edited_summary, "Fixed text.");
  EXPECT_FALSE(out.span.has_value());
}

TEST(Editor, HeaderlessAnswerUsesLastParagraph) {
  const auto out = parse_editor("Here is the fix.\n\nThe council voted on Tuesday.",
                                EditorStrategy::Editor);
  EXPECT_EQ(out.parse_status, ParseStatus::Recovered);
  EXPECT_EQ(out.edited_summary, "The council voted on Tuesday.");
}

TEST(Editor, EmptyResponseFails) {
  EXPECT_EQ(parse_editor("", EditorStrategy::Editor).parse_status, ParseStatus::Failed);
  EXPECT_EQ(parse_editor(" \n\n ", EditorStrategy::EditorSpan).parse_status,
            ParseStatus::Failed);
}

TEST(Editor, RefusalCorpusFails) {
  std::vector<std::string> refusals;
  std::istringstream lines(testing::slurp(testing::fixture("refusals.txt")));
  for (std::string line; std::getline(lines, line);) refusals.push_back(line);
  ASSERT_EQ(refusals.size(), 8u);
  for (const auto& r : refusals) {
    for (auto s : kAllStrategies) {
      const auto out = parse_editor(r, s);
      EXPECT_EQ(out.parse_status, ParseStatus::Failed) << r;
      EXPECT_TRUE(out.edited_summary.empty());
      EXPECT_EQ(out.raw, r);
    }
  }
}

TEST(Editor, FieldsOutsideFooterIgnored) {
  const std::string raw = "Inconsistent span: x\nPost-edited summary: Fixed.";
  const auto out = parse_editor(raw, EditorStrategy::Editor);
  EXPECT_FALSE(out.span.has_value());
  EXPECT_EQ(out.edited_summary, "Fixed.");
  EXPECT_EQ(out.parse_status, ParseStatus::Clean);
}

TEST(Editor, CrlfAndBareHeaderLines) {
  const std::string raw = "Inconsistent span:\r\nMonday\r\n\r\nPost-edited summary:\r\nTuesday.\r\n";
  const auto out = parse_editor(raw, EditorStrategy::EditorSpan);
  EXPECT_EQ(out.parse_status, ParseStatus::Clean);
  EXPECT_EQ(out.span, "Monday");
  EXPECT_EQ(out.edited_summary, "Tuesday.");
}

TEST(ErrorTypeList, SplitsAndNormalizes) {
  EXPECT_EQ(parse_error_types("Entity Error and Circumstance Error (the date)"),
            (ErrorTypeSet{ErrorType::EntityError, ErrorType::CircumstanceError}));
  EXPECT_EQ(parse_error_types("- Predicate Error\n- Out of Article Error."),
            (ErrorTypeSet{ErrorType::PredicateError, ErrorType::OutOfArticleError}));
  EXPECT_EQ(parse_error_types("EntE; CorefE / GramE"),
            (ErrorTypeSet{ErrorType::EntityError, ErrorType::CoreferenceError,
                          ErrorType::GrammaticalError}));
  EXPECT_TRUE(parse_error_types("None").empty());
  EXPECT_TRUE(parse_error_types("").empty());
}

TEST(ParseStatusNames, RoundTrip) {
  for (auto s : {ParseStatus::Clean, ParseStatus::Recovered, ParseStatus::Failed}) {
    EXPECT_EQ(parse_parse_status(to_string(s)), s);
  }
}

// Strict-format round trip: whatever the formatter writes, the parser reads
// back field for field.
TEST(EditorProperty, StrictFormatRoundTripThousandCases) {
  oracle::EditorOutputGenerator gen(20260101);
  int recovered = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = gen.strategy();
    auto want = gen.make(s);
    const auto text = format_editor_response(want, s);
    const auto got = parse_editor(text, s);
    want.raw = text;
    EXPECT_EQ(got, want) << to_string(s) << "\n" << text;
    recovered += got == want;
  }
  EXPECT_EQ(recovered, 1000);
}

}  // namespace
}  // namespace faithedit
