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

#include <optional>
#include <string>
#include <vector>

#include "trackr/backend.hpp"
#include "trackr/features.hpp"
#include "trackr/value.hpp"

namespace trackr {

/// artifact_id of the FeatureSet's content bytes.
std::string record_id(const FeatureSet& fs);

/// Extracts features and assigns the id without storing anything.
Record make_record(const ArtifactValue& v, const ExtractionContext& ctx,
                   const ExtractorRegistry& registry = {});

struct RecordOutcome {
  std::string id;
  /// A record with the same content was already present and was replaced.
  bool replaced = false;
};

RecordOutcome record(const ArtifactValue& v, const ExtractionContext& ctx, Backend& backend,
                     const ExtractorRegistry& registry = {});

enum class RetType { Id, Record, Count };

struct FindResult {
  RetType ret_type = RetType::Id;
  std::vector<std::string> ids;
  std::vector<Record> records;
  std::size_t count = 0;
};

FindResult find_records(const Backend& backend, const std::string& pattern,
                        const std::vector<std::string>& fields = {}, RetType ret_type = RetType::Id);

bool rm_record(Backend& backend, const std::string& id);
/// Recomputes the value's id the same way record() does, then removes it.
bool rm_record(Backend& backend, const ArtifactValue& v, const ExtractionContext& ctx,
               const ExtractorRegistry& registry = {});

}  // namespace trackr
