/*
 * Copyright 2026 The trackr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trackr/history.hpp"

#include <random>

#include "trackr/hash.hpp"
#include "trackr/parser.hpp"

namespace trackr {

std::string Origin::str() const {
  return kind == Kind::Interactive ? "interactive" : "weave:" + chunk_label;
}

HistoryLog::HistoryLog() {
  std::string seed = format_rfc3339(to_timestamp(std::chrono::system_clock::now()));
  std::random_device rd;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t word = rd();
    seed.append(reinterpret_cast<const char*>(&word), sizeof word);
  }
  session_id_ = artifact_id(seed).str();
}

bool HistoryLog::append(const TopExpr& expr, EvalStatus status, Origin origin, Timestamp when) {
  if (status != EvalStatus::Ok) return false;
  entries_.push_back({expr, when, std::move(origin)});
  return true;
}

Program HistoryLog::snapshot() const {
  Program p;
  p.exprs.reserve(entries_.size());
  for (const auto& e : entries_) {
    TopExpr t = e.expr;
    t.index = p.exprs.size();
    p.exprs.push_back(std::move(t));
  }
  return p;
}

std::string HistoryLog::save() const {
  std::string out = "# histry 1 " + session_id_ + "\n";
  for (const auto& e : entries_) {
    out += e.origin.str();
    out += '\t';
    out += format_rfc3339(e.timestamp);
    out += '\t';
    out += deparse(e.expr);
    out += '\n';
  }
  return out;
}

HistoryLog HistoryLog::load(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::optional<HistoryLog> log;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!log) {
      constexpr std::string_view kHeader = "# histry 1 ";
      if (!line.starts_with(kHeader) || !ArtifactId::is_valid(line.substr(kHeader.size()))) {
        throw FormatError(line_no, "expected '# histry 1 <session-id>' header");
      }
      log.emplace(std::string(line.substr(kHeader.size())));
      continue;
    }
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw FormatError(line_no, "expected three tab-separated fields");

    std::string_view origin_text = line.substr(0, t1);
    Origin origin;
    if (origin_text == "interactive") {
      origin = Origin::interactive();
    } else if (origin_text.starts_with("weave:") && origin_text.size() > 6) {
      origin = Origin::weave(std::string(origin_text.substr(6)));
    } else {
      throw FormatError(line_no, "unknown origin '" + std::string(origin_text) + "'");
    }

    auto when = parse_rfc3339(line.substr(t1 + 1, t2 - t1 - 1));
    if (!when) throw FormatError(line_no, "malformed timestamp");

    Program p;
    try {
      p = parse_program(line.substr(t2 + 1));
    } catch (const Error& e) {
      throw FormatError(line_no, std::string("bad expression: ") + e.what());
    }
    if (p.size() != 1) throw FormatError(line_no, "expected exactly one expression");
    log->append(p.exprs[0], EvalStatus::Ok, std::move(origin), *when);
  }
  if (!log) throw FormatError(1, "empty history file");
  return std::move(*log);
}

bool operator==(const HistoryLog& a, const HistoryLog& b) {
  if (a.session_id_ != b.session_id_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.timestamp != y.timestamp || !(x.origin == y.origin) || !same_structure(x.expr, y.expr)) {
      return false;
    }
  }
  return true;
}

}  // namespace trackr
