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

#include "trackr/record.hpp"

#include <stdexcept>

#include "trackr/hash.hpp"

namespace trackr {

using nlohmann::json;

bool operator==(const Record& a, const Record& b) { return record_to_json(a) == record_to_json(b); }

json record_to_json(const Record& r) {
  json doc = {{"schema_version", kSchemaVersion},
              {"uniqueid", r.uniqueid},
              {"featureset", to_json(r.featureset)},
              {"preview", r.preview ? json(*r.preview) : json(nullptr)},
              {"report_id", r.report_id ? json(*r.report_id) : json(nullptr)},
              {"result_ids", r.result_ids}};
  return doc;
}

Record record_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record document must be an object");
  try {
    auto version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version " + std::to_string(version));
    }
    Record r;
    r.uniqueid = j.at("uniqueid").get<std::string>();
    if (!ArtifactId::is_valid(r.uniqueid)) throw std::invalid_argument("bad uniqueid '" + r.uniqueid + "'");
    r.featureset = featureset_from_json(j.at("featureset"));
    if (auto it = j.find("preview"); it != j.end() && !it->is_null()) r.preview = it->get<std::string>();
    if (auto it = j.find("report_id"); it != j.end() && !it->is_null()) r.report_id = it->get<std::string>();
    if (auto it = j.find("result_ids"); it != j.end() && !it->is_null()) {
      r.result_ids = it->get<std::vector<std::string>>();
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  }
}

std::vector<FlatField> flatten_record(const Record& r) {
  std::vector<FlatField> out;
  out.emplace_back("uniqueid", r.uniqueid);
  if (r.report_id) out.emplace_back("report_id", *r.report_id);
  for (const auto& id : r.result_ids) out.emplace_back("result_ids", id);
  flatten_json(to_json(r.featureset), "", out);
  return out;
}

bool field_selects(const std::string& field, const std::string& path) {
  if (field == path) return true;
  return path.size() > field.size() && path.compare(0, field.size(), field) == 0 &&
         path[field.size()] == '.';
}

std::string record_id(const FeatureSet& fs) { return artifact_id(content_bytes(fs)).str(); }

Record make_record(const ArtifactValue& v, const ExtractionContext& ctx,
                   const ExtractorRegistry& registry) {
  Record r;
  r.featureset = extract_features(v, ctx, registry);
  r.uniqueid = record_id(r.featureset);
  r.featureset.common.uniqueid = r.uniqueid;
  r.preview = "/records/" + r.uniqueid + "/thumbnail.svg";
  return r;
}

RecordOutcome record(const ArtifactValue& v, const ExtractionContext& ctx, Backend& backend,
                     const ExtractorRegistry& registry) {
  Record r = make_record(v, ctx, registry);
  bool replaced = backend.insert(r);
  return {r.uniqueid, replaced};
}

FindResult find_records(const Backend& backend, const std::string& pattern,
                        const std::vector<std::string>& fields, RetType ret_type) {
  FindResult out;
  out.ret_type = ret_type;
  auto found = backend.find(FindQuery{pattern, fields});
  out.count = found.size();
  switch (ret_type) {
    case RetType::Id:
      for (const auto& r : found) out.ids.push_back(r.uniqueid);
      break;
    case RetType::Record: out.records = std::move(found); break;
    case RetType::Count: break;
  }
  return out;
}

bool rm_record(Backend& backend, const std::string& id) { return backend.remove(id); }

bool rm_record(Backend& backend, const ArtifactValue& v, const ExtractionContext& ctx,
               const ExtractorRegistry& registry) {
  return backend.remove(record_id(extract_features(v, ctx, registry)));
}

}  // namespace trackr
