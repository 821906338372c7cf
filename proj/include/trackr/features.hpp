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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackr/analysis.hpp"
#include "trackr/evaluator.hpp"
#include "trackr/value.hpp"

namespace trackr {

struct VarRole {
  std::string column;
  std::string role;  // x, y, group.color, group.facet
  friend bool operator==(const VarRole&, const VarRole&) = default;
};

struct NumericSummary {
  std::string name;
  double min = 0, median = 0, mean = 0, max = 0;
};

struct LevelCount {
  std::string level;
  std::size_t count = 0;
};

struct CategoricalSummary {
  std::string name;
  std::size_t distinct = 0;
  std::vector<LevelCount> top_levels;  // at most kTopLevels
};

inline constexpr std::size_t kTopLevels = 5;

struct TableFeatures {
  std::vector<std::string> var_names;
  std::vector<std::string> var_types;  // "number" or "string"
  std::vector<NumericSummary> numeric_summaries;
  std::vector<CategoricalSummary> categorical_summaries;
  std::size_t nrow = 0;
};

struct PlotFeatures {
  std::vector<VarRole> vars;
  std::vector<std::string> geoms;
  std::vector<std::string> stats;
  std::vector<std::string> facets;
  std::vector<std::string> titles;
  std::size_t nobs = 0;
  TableFeatures data_summary;
  std::string system = "tracklang-plotspec";
};

struct ModelFeatures {
  std::string formula;
  std::string family;
  std::string link;
  std::vector<std::string> coef_names;
  std::vector<std::string> significant_terms;
  std::size_t nobs = 0;
};

struct GenericFeatures {
  std::string value_kind;
  std::string sketch;
};

struct ReportFeatures {
  std::size_t n_results = 0;
  std::size_t n_plots = 0;
  std::size_t n_models = 0;
  std::vector<std::string> result_ids;
  bool results_interdependent = false;
  std::string text;
  std::string code;
  std::map<std::string, std::string> front_matter;
};

using SpecificFeatures =
    std::variant<PlotFeatures, ModelFeatures, TableFeatures, GenericFeatures, ReportFeatures>;

struct CommonFeatures {
  std::string uniqueid;  // empty until the record is stored
  std::string klass;     // plot, model, table, generic, report
  std::vector<std::string> tags;
  std::string user;
  std::string timestamp;  // RFC 3339
  std::string tool_version;
  std::string platform;
  std::optional<std::string> source_file;
  std::optional<std::string> project;
  CodeFeatures code;
  std::string session_code_ref;
};

struct FeatureSet {
  CommonFeatures common;
  SpecificFeatures specific;
};

/// Lowercases and removes duplicate tags, keeping first occurrences.
std::vector<std::string> normalize_tags(const std::vector<std::string>& tags);

/// Facts about the recording environment.
struct EnvironmentInfo {
  std::string user;
  std::string tool_version;
  std::string platform;
  std::optional<std::string> source_file;
  std::optional<std::string> project;
  Clock clock = [] { return std::chrono::system_clock::now(); };

  /// User from $TRACKR_USER, else the OS account name.
  static EnvironmentInfo capture();
};

inline constexpr double kDefaultSignificance = 0.05;

struct ExtractionContext {
  /// Session history the value came from; null when unknown.
  const Program* history = nullptr;
  /// Variable holding the value, sliced at the end of `history`.
  std::optional<std::string> target;
  /// Alternatively, index of the expression that displayed the value.
  std::optional<std::size_t> target_index;
  EnvironmentInfo env;
  double significance = kDefaultSignificance;
};

using ValueMatcher = std::function<bool(const ArtifactValue&)>;
/// Returns klass, tags and specific fields; common environment and code
/// fields are filled in afterwards.
using Extractor = std::function<FeatureSet(const ArtifactValue&, const ExtractionContext&)>;

/// Built-in extraction for a value (plot, model, table, or generic fallback).
FeatureSet builtin_extract(const ArtifactValue& v, const ExtractionContext& ctx);

class ExtractorRegistry {
 public:
  using Handle = std::size_t;

  /// Later registrations take precedence over earlier ones and over the
  /// built-in extractors.
  Handle register_extractor(ValueMatcher matcher, Extractor extractor);
  bool unregister(Handle h);

  FeatureSet extract(const ArtifactValue& v, const ExtractionContext& ctx) const;

 private:
  struct Entry {
    Handle handle;
    ValueMatcher matcher;
    Extractor extractor;
  };
  std::vector<Entry> entries_;
  Handle next_ = 1;
};

/// Full extraction: specific features via `registry`, then user, timestamp,
/// environment and code features from the context. Never throws for values
/// the evaluator can produce.
FeatureSet extract_features(const ArtifactValue& v, const ExtractionContext& ctx,
                            const ExtractorRegistry& registry = {});

TableFeatures summarize_table(const Table& t);

/// Code features for the context's slice; empty when the slice is unknown.
CodeFeatures context_code(const ExtractionContext& ctx);

nlohmann::json to_json(const FeatureSet& fs);
/// Throws std::invalid_argument on schema violations.
FeatureSet featureset_from_json(const nlohmann::json& j);

using FlatField = std::pair<std::string, std::string>;

/// Depth-first flattening of a JSON document into (dotted path, text)
/// pairs. Array elements share their array's path; nulls are skipped;
/// numbers render as in canonical bytes.
void flatten_json(const nlohmann::json& j, const std::string& prefix, std::vector<FlatField>& out);
std::vector<FlatField> flatten_text(const FeatureSet& fs);

/// Canonical bytes identifying the content: the FeatureSet without
/// uniqueid, timestamp and user.
std::string content_bytes(const FeatureSet& fs);

/// Human-readable summary, one `label: value` per line.
std::string show(const FeatureSet& fs);

}  // namespace trackr
