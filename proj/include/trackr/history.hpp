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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trackr/ast.hpp"
#include "trackr/timeutil.hpp"

namespace trackr {

enum class EvalStatus { Ok, Failed };

/// Where an expression was evaluated: an interactive session or a chunk of
/// a woven document.
struct Origin {
  enum class Kind { Interactive, Weave } kind = Kind::Interactive;
  std::string chunk_label;

  static Origin interactive() { return {}; }
  static Origin weave(std::string label) { return {Kind::Weave, std::move(label)}; }

  /// `interactive` or `weave:<label>`.
  std::string str() const;
  friend bool operator==(const Origin&, const Origin&) = default;
};

struct HistoryEntry {
  TopExpr expr;
  Timestamp timestamp;
  Origin origin;
};

/// Append-only log of successfully evaluated top-level expressions.
class HistoryLog {
 public:
  /// Fresh session; the id hashes the start time with 16 random bytes.
  HistoryLog();
  explicit HistoryLog(std::string session_id) : session_id_(std::move(session_id)) {}

  /// Appends `expr` iff `status` is Ok. Returns whether it was kept.
  bool append(const TopExpr& expr, EvalStatus status, Origin origin, Timestamp when);

  const std::vector<HistoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const std::string& session_id() const { return session_id_; }

  /// Logged expressions as a Program indexed 0..n-1.
  Program snapshot() const;

  /// Line format: a `# histry 1 <session-id>` header, then one
  /// `<origin>\t<RFC 3339 timestamp>\t<canonical source>` line per entry.
  std::string save() const;
  /// Throws FormatError carrying the offending line number.
  static HistoryLog load(std::string_view text);

  friend bool operator==(const HistoryLog& a, const HistoryLog& b);

 private:
  std::string session_id_;
  std::vector<HistoryEntry> entries_;
};

}  // namespace trackr
