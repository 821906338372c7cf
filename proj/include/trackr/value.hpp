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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace trackr {

using NumericColumn = std::vector<double>;
using StringColumn = std::vector<std::string>;

struct Column {
  std::string name;
  std::variant<NumericColumn, StringColumn> data;

  bool numeric() const { return std::holds_alternative<NumericColumn>(data); }
  const NumericColumn& numbers() const { return std::get<NumericColumn>(data); }
  const StringColumn& strings() const { return std::get<StringColumn>(data); }
  std::size_t size() const;

  friend bool operator==(const Column&, const Column&) = default;
};

/// Column-oriented table. Column order is presentation only; identity and
/// canonical bytes are keyed by column name.
struct Table {
  std::vector<Column> columns;
  std::size_t nrow = 0;

  const Column* find(const std::string& name) const;
  /// Throws std::invalid_argument on duplicate names or ragged columns.
  void validate() const;
  Table take_rows(const std::vector<std::size_t>& rows) const;
};

using TablePtr = std::shared_ptr<const Table>;

struct Scalar {
  std::variant<double, std::string, bool> value;
};

struct Vector {
  std::variant<std::vector<double>, std::vector<std::string>, std::vector<bool>> items;
  std::size_t size() const;
};

struct PlotSpec {
  TablePtr data;
  /// aesthetic (x, y, color) -> column name
  std::map<std::string, std::string> mappings;
  std::vector<std::string> geoms;
  std::vector<std::string> stats;
  std::vector<std::string> facets;
  std::optional<std::string> title;
  /// axis (x, y) -> label
  std::map<std::string, std::string> labels;
};

struct ModelFit {
  std::string formula;
  std::string response;
  std::string family = "gaussian";
  std::string link = "identity";
  std::vector<std::string> coef_names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  std::size_t nobs = 0;
  std::size_t df_residual = 0;
  double rss = 0;
  TablePtr data;
};

struct Unit {};

enum class ValueKind { Unit, Scalar, Vector, Table, PlotSpec, ModelFit };

const char* to_string(ValueKind kind);

/// Runtime value produced by evaluating Tracklang.
struct ArtifactValue {
  std::variant<Unit, Scalar, Vector, TablePtr, PlotSpec, ModelFit> v;

  ArtifactValue() = default;
  ArtifactValue(Unit u) : v(u) {}
  ArtifactValue(Scalar s) : v(std::move(s)) {}
  ArtifactValue(Vector x) : v(std::move(x)) {}
  ArtifactValue(Table t) : v(std::make_shared<const Table>(std::move(t))) {}
  ArtifactValue(TablePtr t) : v(std::move(t)) {}
  ArtifactValue(PlotSpec p) : v(std::move(p)) {}
  ArtifactValue(ModelFit m) : v(std::move(m)) {}

  ValueKind kind() const { return static_cast<ValueKind>(v.index()); }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&v);
  }
  const Table* table() const {
    auto* t = std::get_if<TablePtr>(&v);
    return t ? t->get() : nullptr;
  }
};

/// Tagged, key-sorted document used for canonical bytes.
nlohmann::json canonical_json(const ArtifactValue& v);
nlohmann::json canonical_json(const Table& t);

/// Deterministic serialization: sorted object keys, every floating number
/// with 17 significant digits, non-finite numbers as NaN/Infinity/-Infinity.
std::string canonical_dump(const nlohmann::json& j);

std::string canonical_bytes(const ArtifactValue& v);

/// Number rendering shared by canonical bytes and search text.
std::string canonical_number(double v);

}  // namespace trackr
