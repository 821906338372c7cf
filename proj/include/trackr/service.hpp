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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackr/backend.hpp"
#include "trackr/error.hpp"

namespace trackr {

class BindError : public Error {
 public:
  using Error::Error;
};

/// Thrown for malformed query parameters; maps to HTTP 400.
class BadQuery : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultPageSize = 20;
inline constexpr std::size_t kMaxPageSize = 200;

/// Field aliases accepted as `alias:pattern` in the q parameter.
const std::map<std::string, std::string>& query_aliases();

/// Splits `alias:pattern`; a q without a known alias prefix is a plain
/// pattern over every field.
FindQuery parse_q(const std::string& q);

struct ServiceQuery {
  FindQuery find;
  /// 1-based.
  std::size_t page = 1;
  std::size_t page_size = kDefaultPageSize;
  /// Conjunctive exact matches, field path to value.
  std::map<std::string, std::string> facets;
};

struct QueryPage {
  std::vector<Record> records;
  std::size_t total = 0;
  std::size_t page = 1;
  std::size_t page_size = kDefaultPageSize;
  std::size_t pages = 0;
  /// Value counts over all matches for klass, user, tags and geoms.
  std::map<std::string, std::map<std::string, std::size_t>> facet_counts;
};

/// Pattern match, then facets, then pagination. Throws BadQuery when the
/// page size is outside 1..200 or the page is 0.
QueryPage run_query(const Backend& backend, const ServiceQuery& q);

nlohmann::json page_json(const QueryPage& page);

/// First title of a plot, else its first variable; model formula; report
/// title; table or generic sketch.
std::string record_label(const Record& r);

/// RSS 2.0 document of the `limit` most recent records matching `q`.
std::string rss_feed(const Backend& backend, const std::string& q, std::size_t limit,
                     const std::string& base_url);

/// Deterministic schematic of a plot record; other klasses get a glyph.
std::string thumbnail_svg(const Record& r);

struct ServiceOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 7878;
  /// Directory served under /ui/ when set.
  std::optional<std::filesystem::path> ui_dir;
  /// Used for absolute links; defaults to http://host:port.
  std::optional<std::string> base_url;
};

/// HTTP discovery service over a backend.
class Service {
 public:
  Service(Backend& backend, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving on a background thread. Throws BindError.
  void start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;
  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trackr
