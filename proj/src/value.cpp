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

#include "trackr/value.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace trackr {

using nlohmann::json;

std::size_t Column::size() const {
  return std::visit([](const auto& d) { return d.size(); }, data);
}

const Column* Table::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void Table::validate() const {
  std::set<std::string> names;
  for (const auto& c : columns) {
    if (!names.insert(c.name).second) throw std::invalid_argument("duplicate column " + c.name);
    if (c.size() != nrow) throw std::invalid_argument("column " + c.name + " has wrong length");
  }
}

Table Table::take_rows(const std::vector<std::size_t>& rows) const {
  Table out;
  out.nrow = rows.size();
  for (const auto& c : columns) {
    Column nc{c.name, {}};
    std::visit(
        [&](const auto& d) {
          std::decay_t<decltype(d)> picked;
          picked.reserve(rows.size());
          for (std::size_t r : rows) picked.push_back(d.at(r));
          nc.data = std::move(picked);
        },
        c.data);
    out.columns.push_back(std::move(nc));
  }
  return out;
}

std::size_t Vector::size() const {
  return std::visit([](const auto& d) { return d.size(); }, items);
}

const char* to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Unit: return "unit";
    case ValueKind::Scalar: return "scalar";
    case ValueKind::Vector: return "vector";
    case ValueKind::Table: return "table";
    case ValueKind::PlotSpec: return "plotspec";
    case ValueKind::ModelFit: return "modelfit";
  }
  return "unknown";
}

namespace {

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

json strings(const std::vector<std::string>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(x);
  return a;
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

void dump_string(const std::string& s, std::string& out) {
  // nlohmann's escaping is deterministic; reuse it for a single string.
  out += json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

void dump(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: out += canonical_number(j.get<double>()); break;
    case json::value_t::string: dump_string(j.get_ref<const std::string&>(), out); break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += ',';
        first = false;
        dump(x, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump_string(it.key(), out);
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    default: out += "null"; break;
  }
}

}  // namespace

std::string canonical_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json canonical_json(const Table& t) {
  json cols = json::object();
  for (const auto& c : t.columns) {
    if (c.numeric()) {
      cols[c.name] = {{"type", "number"}, {"values", numbers(c.numbers())}};
    } else {
      cols[c.name] = {{"type", "string"}, {"values", strings(c.strings())}};
    }
  }
  return {{"type", "table"}, {"nrow", t.nrow}, {"columns", cols}};
}

json canonical_json(const ArtifactValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Unit>) {
          return {{"type", "unit"}};
        } else if constexpr (std::is_same_v<T, Scalar>) {
          json value = std::visit([](const auto& s) { return json(s); }, x.value);
          return {{"type", "scalar"}, {"value", value}};
        } else if constexpr (std::is_same_v<T, Vector>) {
          json out = {{"type", "vector"}};
          if (auto* d = std::get_if<std::vector<double>>(&x.items)) {
            out["elem"] = "number";
            out["items"] = numbers(*d);
          } else if (auto* s = std::get_if<std::vector<std::string>>(&x.items)) {
            out["elem"] = "string";
            out["items"] = strings(*s);
          } else {
            out["elem"] = "bool";
            json a = json::array();
            for (bool b : std::get<std::vector<bool>>(x.items)) a.push_back(b);
            out["items"] = a;
          }
          return out;
        } else if constexpr (std::is_same_v<T, TablePtr>) {
          return canonical_json(*x);
        } else if constexpr (std::is_same_v<T, PlotSpec>) {
          return {{"type", "plotspec"},
                  {"data", canonical_json(*x.data)},
                  {"mappings", x.mappings},
                  {"geoms", strings(x.geoms)},
                  {"stats", strings(x.stats)},
                  {"facets", strings(x.facets)},
                  {"title", optional_string(x.title)},
                  {"labels", x.labels}};
        } else if constexpr (std::is_same_v<T, ModelFit>) {
          return {{"type", "modelfit"},
                  {"formula", x.formula},
                  {"response", x.response},
                  {"family", x.family},
                  {"link", x.link},
                  {"coef_names", strings(x.coef_names)},
                  {"coefficients", numbers(x.coefficients)},
                  {"std_errors", numbers(x.std_errors)},
                  {"t_stats", numbers(x.t_stats)},
                  {"p_values", numbers(x.p_values)},
                  {"nobs", x.nobs},
                  {"df_residual", x.df_residual},
                  {"rss", x.rss},
                  {"data", canonical_json(*x.data)}};
        }
      },
      v.v);
}

std::string canonical_dump(const json& j) {
  std::string out;
  dump(j, out);
  return out;
}

std::string canonical_bytes(const ArtifactValue& v) { return canonical_dump(canonical_json(v)); }

}  // namespace trackr
