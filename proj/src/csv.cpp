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

#include "trackr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trackr/error.hpp"

namespace trackr {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw EvalError(EvalErrorKind::FileError, "csv line " + std::to_string(line) + ": " + msg);
}

std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool any = false;  // current record has content
  while (i < text.size()) {
    char c = text[i];
    if (c == '"') {
      if (!field.empty()) fail(line, "quote inside unquoted field");
      std::size_t start_line = line;
      ++i;
      while (true) {
        if (i >= text.size()) fail(start_line, "unterminated quoted field");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field.push_back(text[i++]);
      }
      any = true;
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        fail(line, "characters after closing quote");
      }
      continue;
    }
    if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
    if (c == '\n' || c == '\r') {
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
      ++line;
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && std::isfinite(out);
}

}  // namespace

Table parse_csv(std::string_view text) {
  auto rows = split_records(text);
  if (rows.empty()) fail(1, "missing header row");
  const auto& header = rows.front();
  Table t;
  t.nrow = rows.size() - 1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      fail(r + 1, "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(rows[r].size()));
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) fail(1, "empty column name");
    if (t.find(header[c])) fail(1, "duplicate column name " + header[c]);
    NumericColumn nums;
    nums.reserve(t.nrow);
    bool numeric = t.nrow > 0;
    for (std::size_t r = 1; r < rows.size() && numeric; ++r) {
      double v;
      if (parse_number(rows[r][c], v)) {
        nums.push_back(v);
      } else {
        numeric = false;
      }
    }
    if (numeric) {
      t.columns.push_back({header[c], std::move(nums)});
    } else {
      StringColumn strs;
      strs.reserve(t.nrow);
      for (std::size_t r = 1; r < rows.size(); ++r) strs.push_back(rows[r][c]);
      t.columns.push_back({header[c], std::move(strs)});
    }
  }
  return t;
}

Table read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError(EvalErrorKind::FileError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace trackr
