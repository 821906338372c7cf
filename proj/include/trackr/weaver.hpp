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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trackr/ast.hpp"
#include "trackr/backend.hpp"
#include "trackr/features.hpp"
#include "trackr/history.hpp"

namespace trackr {

struct TextSegment {
  std::string text;
  std::size_t line = 1;
};

struct Chunk {
  std::string label;
  std::map<std::string, std::string> options;
  /// Chunk body exactly as written, each line ending in a newline.
  std::string source;
  Program code;
  /// Line of the opening fence.
  std::size_t line = 1;

  /// False when the chunk has `display=false`.
  bool displays() const;
};

using Segment = std::variant<TextSegment, Chunk>;

struct LiterateDoc {
  std::map<std::string, std::string> front_matter;
  std::vector<Segment> segments;
};

/// Throws ParseError for an unclosed fence, a bad chunk header, a
/// duplicate label, a malformed front matter block or chunk code that does
/// not parse. Positions are relative to the whole document.
LiterateDoc parse_document(std::string_view source);

/// Prose of the document: Text segments with whitespace runs collapsed.
std::string report_text(const LiterateDoc& doc);

/// Keywords from the `keywords` front matter entry, comma separated.
std::vector<std::string> doc_keywords(const LiterateDoc& doc);

struct WeaveOptions {
  EnvironmentInfo env;
  /// Directory that relative read_csv paths resolve against.
  std::filesystem::path base_dir;
  ExtractorRegistry registry;
  double significance = kDefaultSignificance;
};

struct WeaveResult {
  std::string report_id;
  std::vector<std::string> result_ids;
  std::string rendered;
  /// Artifact records in display order, then the report.
  std::vector<Record> records;
  HistoryLog history;
};

/// Evaluates every chunk in one environment and stages the artifact and
/// report records without storing them. Throws ChunkEvalError when an
/// expression fails.
WeaveResult weave(const LiterateDoc& doc, const WeaveOptions& options = {});

/// weave() followed by a single insert_all of the staged records, report
/// last. Nothing is inserted when a chunk fails.
WeaveResult weave_and_record(const LiterateDoc& doc, Backend& backend,
                             const WeaveOptions& options = {});

}  // namespace trackr
