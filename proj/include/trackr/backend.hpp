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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackr/features.hpp"

namespace trackr {

inline constexpr int kSchemaVersion = 1;

/// Persisted document for one artifact or report.
struct Record {
  std::string uniqueid;
  FeatureSet featureset;
  /// Reference to a preview payload, e.g. a thumbnail URL.
  std::optional<std::string> preview;
  std::optional<std::string> report_id;
  std::vector<std::string> result_ids;

  friend bool operator==(const Record& a, const Record& b);
};

nlohmann::json record_to_json(const Record& r);
/// Throws std::invalid_argument on schema violations.
Record record_from_json(const nlohmann::json& j);

/// Searchable (field path, text) pairs of a record: `uniqueid`,
/// `report_id`, `result_ids` and the FeatureSet paths without the
/// `featureset.` prefix (`common.user`, `specific.geoms`, ...).
std::vector<FlatField> flatten_record(const Record& r);

/// True when `field` selects `path`: equal, or a dotted prefix of it.
bool field_selects(const std::string& field, const std::string& path);

struct FindQuery {
  /// Case-insensitive ECMAScript regular expression, unanchored.
  std::string pattern;
  /// Restricts matching to these field paths; empty means every field.
  std::vector<std::string> fields;
};

/// Storage contract shared by every backend. Results of find() and all()
/// are ordered by timestamp descending, then id ascending.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string kind() const = 0;
  /// Inserts or replaces by id. Returns true when a record was replaced.
  virtual bool insert(const Record& r) = 0;
  /// Inserts in order under a single write. Returns the replaced flags.
  virtual std::vector<bool> insert_all(const std::vector<Record>& rs) = 0;
  virtual bool remove(const std::string& id) = 0;
  /// Throws BadPattern for an invalid pattern.
  virtual std::vector<Record> find(const FindQuery& q) const = 0;
  virtual std::optional<Record> get(const std::string& id) const = 0;
  virtual std::vector<Record> all() const = 0;
  virtual std::size_t size() const = 0;
};

std::unique_ptr<Backend> memory_backend();

struct JsonFileOptions {
  /// Called after the temporary file is written and before it replaces
  /// the store; throwing from here aborts the write.
  std::function<void(const std::filesystem::path& temp)> before_rename;
};

/// One JSON array of record documents, rewritten through a temporary file
/// and rename on every mutation. Throws CorruptStore on a malformed file.
std::unique_ptr<Backend> jsonfile_backend(const std::filesystem::path& path,
                                          JsonFileOptions options = {});

/// A jsonfile store plus an inverted token index at `<path>.idx`.
std::unique_ptr<Backend> indexed_backend(const std::filesystem::path& path,
                                         JsonFileOptions options = {});

/// `$TRACKR_DB`, else `~/.trackr/records.json`.
std::filesystem::path default_store_path();

/// kind is `memory`, `jsonfile` or `indexed`.
std::unique_ptr<Backend> open_backend(const std::string& kind, const std::filesystem::path& path);

/// Lowercase ASCII alphanumeric runs of `text`.
std::vector<std::string> index_tokens(std::string_view text);

}  // namespace trackr
