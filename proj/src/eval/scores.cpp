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

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <mutex>
#include <thread>

#include "faithedit/data.hpp"
#include "faithedit/eval.hpp"
#include "faithedit/log.hpp"
#include "faithedit/text_util.hpp"
#include "url.hpp"

namespace faithedit::eval {

ScoreTable parse_score_csv(std::string_view csv_text, const std::string& source) {
  const auto rows = parse_csv(csv_text);
  if (rows.empty()) return {};
  int id_col = -1, metric_col = -1, score_col = -1;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    const auto name = text::to_lower(text::trim(rows[0][c]));
    if (name == "id") id_col = static_cast<int>(c);
    if (name == "metric") metric_col = static_cast<int>(c);
    if (name == "score") score_col = static_cast<int>(c);
  }
  if (id_col < 0 || metric_col < 0 || score_col < 0) {
    throw SchemaError(source, "score file needs columns id,metric,score");
  }
  const auto width = static_cast<std::size_t>(std::max({id_col, metric_col, score_col}));
  ScoreTable out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= width) {
      throw SchemaError(source + ": row " + std::to_string(r), "too few fields");
    }
    const auto cell = text::trim(row[static_cast<std::size_t>(score_col)]);
    if (cell.empty()) continue;
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(std::string(cell), &used);
      if (used != cell.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw SchemaError(source + ": row " + std::to_string(r),
                        "score is not a number: " + std::string(cell));
    }
    const auto metric = text::to_lower(text::trim(row[static_cast<std::size_t>(metric_col)]));
    out[metric][std::string(text::trim(row[static_cast<std::size_t>(id_col)]))] = value;
  }
  return out;
}

ScoreTable load_score_file(const std::string& path) {
  return parse_score_csv(text::read_file(path), path);
}

void save_score_file(const ScoreTable& scores, const std::string& path) {
  std::string out = "id,metric,score\n";
  for (const auto& [metric, by_id] : scores) {
    for (const auto& [id, value] : by_id) {
      out += text::csv_field(id);
      out += ',';
      out += text::csv_field(metric);
      out += ',';
      out += fmt::format("{}", value);
      out += '\n';
    }
  }
  text::write_file_atomic(path, out);
}

void merge_scores(ScoreTable& into, const ScoreTable& from) {
  for (const auto& [metric, by_id] : from) {
    for (const auto& [id, value] : by_id) into[metric][id] = value;
  }
}

std::map<std::string, double> external_scores(const ScoreTable& table,
                                              std::span<const ScoreItem> items,
                                              std::string_view metric) {
  std::map<std::string, double> out;
  const auto it = table.find(text::to_lower(metric));
  std::size_t missing = 0;
  for (const auto& item : items) {
    if (it != table.end()) {
      const auto s = it->second.find(item.id);
      if (s != it->second.end()) {
        out[item.id] = s->second;
        continue;
      }
    }
    ++missing;
  }
  if (missing > 0) {
    log::warn(fmt::format("{} of {} ids have no {} score", missing, items.size(),
                          metric));
  }
  return out;
}

std::map<std::string, double> external_scores(const ScorerConfig& config,
                                              std::span<const ScoreItem> items,
                                              std::string_view metric) {
  if (config.max_in_flight < 1) {
    throw Error(ErrorCode::ConfigError, "scorer max_in_flight must be >= 1");
  }
  const auto url = detail::split_url(config.endpoint_url);
  const std::string path = url.path + "/score";
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);

  std::map<std::string, double> out;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> transport_failures{0};
  std::atomic<std::size_t> other_failures{0};
  std::atomic<bool> any_success{false};

  auto worker = [&] {
    httplib::Client client(url.base);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      // Stop early once the service has proven unreachable.
      if (!any_success && transport_failures >= 3) {
        ++transport_failures;
        continue;
      }
      const auto& item = items[i];
      const nlohmann::json body = {{"metric", std::string(metric)},
                                   {"article", item.article},
                                   {"summary", item.summary}};
      auto res = client.Post(path, body.dump(), "application/json");
      if (!res) {
        ++transport_failures;
        continue;
      }
      if (res->status != 200) {
        ++other_failures;
        log::warn(fmt::format("scorer returned {} for {}", res->status, item.id));
        continue;
      }
      try {
        const auto j = nlohmann::json::parse(res->body);
        const double v = j.at("score").get<double>();
        any_success = true;
        std::lock_guard lock(mu);
        out[item.id] = v;
      } catch (const std::exception& e) {
        ++other_failures;
        log::warn(fmt::format("bad scorer response for {}: {}", item.id, e.what()));
      }
    }
  };

  const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.max_in_flight),
                                       std::max<std::size_t>(items.size(), 1));
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  }
  if (!items.empty() && !any_success && transport_failures > 0) {
    throw Error(ErrorCode::ScorerUnavailable,
                "scorer at " + config.endpoint_url + " is unreachable");
  }
  const auto missing = items.size() - out.size();
  if (missing > 0) {
    log::warn(fmt::format("{} of {} items have no {} score", missing, items.size(),
                          metric));
  }
  return out;
}

}  // namespace faithedit::eval
