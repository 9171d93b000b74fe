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

#include <CLI11.hpp>

#include <iostream>

#include "faithedit/cli.hpp"

namespace {

using faithedit::cli::Overrides;

void add_run_flags(CLI::App* cmd, std::string& config_path, Overrides& o) {
  cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  cmd->add_option("--corpus", o.corpus, "Normalized corpus (JSONL)");
  cmd->add_option("--strategy", o.strategy, "Editor strategy, e.g. EditorSpan");
  cmd->add_option("--critic-mode", o.critic_mode, "scale or binary");
  cmd->add_option("--max-rounds", o.max_rounds, "Edit round cap");
  cmd->add_option("--parallelism", o.parallelism, "Concurrent sessions");
  cmd->add_option("--out", o.out, "Run directory");
  cmd->add_option("--scores-file", o.scores_file, "Precomputed scores (id,metric,score)");
  cmd->add_option("--subsample", o.subsample, "Seeded subsample size");
  cmd->add_option("--seed", o.seed, "Subsample seed");
}

int run_with_config(const std::string& path, const Overrides& o,
                    int (*command)(const faithedit::cli::RunConfig&, std::ostream&)) {
  try {
    return command(faithedit::cli::load_run_config(path, o), std::cerr);
  } catch (const faithedit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return faithedit::cli::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critic and editor post-editing of summaries for faithfulness"};
  app.require_subcommand(1);

  std::string kind, in_path, out_path, label_rule = "any";
  std::optional<std::string> xsum_spans;
  auto* ingest = app.add_subcommand("ingest", "Normalize a dataset into corpus JSONL");
  ingest->add_option("kind", kind, "frank or defacto")->required();
  ingest->add_option("input", in_path, "Dataset file")->required();
  ingest->add_option("output", out_path, "Corpus JSONL to write")->required();
  ingest->add_option("--xsum-spans", xsum_spans, "XSum hallucination span CSV (frank)");
  ingest->add_option("--label-rule", label_rule, "any or majority")
      ->check(CLI::IsMember({"any", "majority"}));

  std::string config_path;
  Overrides overrides;
  auto* critic = app.add_subcommand("critic-eval", "Score a corpus with the critic");
  add_run_flags(critic, config_path, overrides);
  auto* edit = app.add_subcommand("edit", "Run critic and editor loops over a corpus");
  add_run_flags(edit, config_path, overrides);

  std::string run_dir;
  std::optional<std::string> report_scores, compare;
  auto* report = app.add_subcommand("report", "Render tables from a run directory");
  report->add_option("run_dir", run_dir, "Run directory")->required();
  report->add_option("--scores-file", report_scores, "Extra precomputed scores");
  report->add_option("--compare", compare, "Second run for the error-type slice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : faithedit::cli::kExitConfig;
  }

  if (ingest->parsed()) {
    const auto rule = label_rule == "majority" ? faithedit::LabelRule::Majority
                                               : faithedit::LabelRule::AnyAnnotator;
    return faithedit::cli::cmd_ingest(kind, in_path, out_path, xsum_spans, rule, std::cerr);
  }
  if (critic->parsed()) {
    return run_with_config(config_path, overrides, faithedit::cli::cmd_critic_eval);
  }
  if (edit->parsed()) {
    return run_with_config(config_path, overrides, faithedit::cli::cmd_edit);
  }
  return faithedit::cli::cmd_report(run_dir, report_scores, compare, std::cerr);
}
