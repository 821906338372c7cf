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

#include "trackr/features.hpp"

#include <pwd.h>
#include <sys/utsname.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "trackr/hash.hpp"
#include "trackr/parser.hpp"
#include "trackr/stats.hpp"
#include "trackr/timeutil.hpp"

#ifndef TRACKR_VERSION
#define TRACKR_VERSION "0.0.0"
#endif

namespace trackr {

using nlohmann::json;

std::vector<std::string> normalize_tags(const std::vector<std::string>& tags) {
  std::vector<std::string> out;
  for (std::string t : tags) {
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t.empty()) continue;
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

EnvironmentInfo EnvironmentInfo::capture() {
  EnvironmentInfo info;
  if (const char* u = std::getenv("TRACKR_USER"); u && *u) {
    info.user = u;
  } else if (const passwd* pw = getpwuid(geteuid()); pw && pw->pw_name) {
    info.user = pw->pw_name;
  } else if (const char* env_user = std::getenv("USER")) {
    info.user = env_user;
  } else {
    info.user = "unknown";
  }
  info.tool_version = std::string("trackr ") + TRACKR_VERSION;
  utsname un{};
  if (uname(&un) == 0) {
    info.platform = std::string(un.sysname) + "-" + un.machine;
  } else {
    info.platform = "unknown";
  }
  return info;
}

// ---------------------------------------------------------------------------
// Built-in extractors

TableFeatures summarize_table(const Table& t) {
  TableFeatures f;
  f.nrow = t.nrow;
  for (const auto& c : t.columns) {
    f.var_names.push_back(c.name);
    if (c.numeric()) {
      f.var_types.push_back("number");
      const auto& xs = c.numbers();
      NumericSummary s{c.name};
      if (xs.empty()) {
        s.min = s.max = std::numeric_limits<double>::quiet_NaN();
      } else {
        s.min = *std::min_element(xs.begin(), xs.end());
        s.max = *std::max_element(xs.begin(), xs.end());
      }
      s.median = stats::median(xs);
      s.mean = stats::mean(xs);
      f.numeric_summaries.push_back(s);
    } else {
      f.var_types.push_back("string");
      std::map<std::string, std::size_t> counts;
      for (const auto& v : c.strings()) ++counts[v];
      CategoricalSummary s{c.name, counts.size(), {}};
      std::vector<LevelCount> levels;
      for (const auto& [level, n] : counts) levels.push_back({level, n});
      std::stable_sort(levels.begin(), levels.end(),
                       [](const LevelCount& a, const LevelCount& b) { return a.count > b.count; });
      if (levels.size() > kTopLevels) levels.resize(kTopLevels);
      s.top_levels = std::move(levels);
      f.categorical_summaries.push_back(std::move(s));
    }
  }
  return f;
}

namespace {

std::string sketch_of(const ArtifactValue& v) {
  if (auto* s = v.as<Scalar>()) {
    return std::visit(
        [](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            return "scalar<number> " + canonical_number(x);
          } else if constexpr (std::is_same_v<T, std::string>) {
            return "scalar<string> " + quote_string(x);
          } else {
            return std::string("scalar<bool> ") + (x ? "TRUE" : "FALSE");
          }
        },
        s->value);
  }
  if (auto* vec = v.as<Vector>()) {
    const char* elem = std::holds_alternative<std::vector<double>>(vec->items)   ? "number"
                       : std::holds_alternative<std::vector<std::string>>(vec->items) ? "string"
                                                                                      : "bool";
    return std::string("vector<") + elem + ">[" + std::to_string(vec->size()) + "]";
  }
  if (const Table* t = v.table()) {
    return "table[" + std::to_string(t->nrow) + " x " + std::to_string(t->columns.size()) + "]";
  }
  return to_string(v.kind());
}

FeatureSet plot_features(const PlotSpec& p) {
  PlotFeatures f;
  static const std::pair<const char*, const char*> kRoles[] = {
      {"x", "x"}, {"y", "y"}, {"color", "group.color"}};
  for (const auto& [aes, role] : kRoles) {
    if (auto it = p.mappings.find(aes); it != p.mappings.end()) f.vars.push_back({it->second, role});
  }
  for (const auto& facet : p.facets) f.vars.push_back({facet, "group.facet"});
  f.geoms = p.geoms;
  f.stats = p.stats;
  f.facets = p.facets;
  if (p.title) f.titles.push_back(*p.title);
  for (const char* axis : {"x", "y"}) {
    if (auto it = p.labels.find(axis); it != p.labels.end()) f.titles.push_back(it->second);
  }
  f.nobs = p.data ? p.data->nrow : 0;
  if (p.data) f.data_summary = summarize_table(*p.data);
  FeatureSet fs;
  fs.common.klass = "plot";
  fs.common.tags = {"plot", "plotspec"};
  fs.specific = std::move(f);
  return fs;
}

FeatureSet model_features(const ModelFit& m, double alpha) {
  ModelFeatures f;
  f.formula = m.formula;
  f.family = m.family;
  f.link = m.link;
  f.coef_names = m.coef_names;
  for (std::size_t i = 0; i < m.coef_names.size() && i < m.p_values.size(); ++i) {
    if (m.p_values[i] < alpha) f.significant_terms.push_back(m.coef_names[i]);
  }
  f.nobs = m.nobs;
  FeatureSet fs;
  fs.common.klass = "model";
  fs.common.tags = {"model", "lm", m.family};
  fs.specific = std::move(f);
  return fs;
}

}  // namespace

FeatureSet builtin_extract(const ArtifactValue& v, const ExtractionContext& ctx) {
  if (auto* p = v.as<PlotSpec>()) return plot_features(*p);
  if (auto* m = v.as<ModelFit>()) return model_features(*m, ctx.significance);
  if (const Table* t = v.table()) {
    FeatureSet fs;
    fs.common.klass = "table";
    fs.common.tags = {"table", "data"};
    fs.specific = summarize_table(*t);
    return fs;
  }
  FeatureSet fs;
  fs.common.klass = "generic";
  fs.common.tags = {"generic", to_string(v.kind())};
  fs.specific = GenericFeatures{to_string(v.kind()), sketch_of(v)};
  return fs;
}

ExtractorRegistry::Handle ExtractorRegistry::register_extractor(ValueMatcher matcher,
                                                                Extractor extractor) {
  Handle h = next_++;
  entries_.push_back({h, std::move(matcher), std::move(extractor)});
  return h;
}

bool ExtractorRegistry::unregister(Handle h) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.handle == h; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

FeatureSet ExtractorRegistry::extract(const ArtifactValue& v, const ExtractionContext& ctx) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->matcher(v)) return it->extractor(v, ctx);
  }
  return builtin_extract(v, ctx);
}

CodeFeatures context_code(const ExtractionContext& ctx) {
  if (!ctx.history || ctx.history->empty()) return {};
  std::vector<std::size_t> slice;
  try {
    if (ctx.target_index && *ctx.target_index < ctx.history->size()) {
      slice = backward_slice_from(*ctx.history, *ctx.target_index);
    } else if (ctx.target) {
      slice = backward_slice(*ctx.history, *ctx.target);
    } else {
      return {};
    }
  } catch (const UnknownTarget&) {
    return {};
  }
  return extract_code_features(*ctx.history, slice);
}

FeatureSet extract_features(const ArtifactValue& v, const ExtractionContext& ctx,
                            const ExtractorRegistry& registry) {
  FeatureSet fs;
  try {
    fs = registry.extract(v, ctx);
  } catch (const std::exception&) {
    fs = builtin_extract(v, ctx);
  }
  CommonFeatures& c = fs.common;
  c.uniqueid.clear();
  if (c.klass.empty()) c.klass = "generic";
  c.tags = normalize_tags(c.tags);
  c.user = ctx.env.user;
  c.timestamp = format_rfc3339(to_timestamp(ctx.env.clock ? ctx.env.clock()
                                                          : std::chrono::system_clock::now()));
  c.tool_version = ctx.env.tool_version;
  c.platform = ctx.env.platform;
  c.source_file = ctx.env.source_file;
  c.project = ctx.env.project;
  c.code = context_code(ctx);
  c.session_code_ref = ctx.history ? artifact_id(deparse(*ctx.history)).str() : std::string();
  return fs;
}

// ---------------------------------------------------------------------------
// JSON mapping

namespace {

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

std::optional<std::string> get_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json table_json(const TableFeatures& t) {
  json nums = json::array();
  for (const auto& s : t.numeric_summaries) {
    nums.push_back({{"name", s.name},
                    {"min", num(s.min)},
                    {"median", num(s.median)},
                    {"mean", num(s.mean)},
                    {"max", num(s.max)}});
  }
  json cats = json::array();
  for (const auto& s : t.categorical_summaries) {
    json levels = json::array();
    for (const auto& l : s.top_levels) levels.push_back({{"level", l.level}, {"count", l.count}});
    cats.push_back({{"name", s.name}, {"distinct", s.distinct}, {"top_levels", levels}});
  }
  return {{"var_names", t.var_names},
          {"var_types", t.var_types},
          {"numeric_summaries", nums},
          {"categorical_summaries", cats},
          {"nrow", t.nrow}};
}

TableFeatures table_from(const json& j) {
  TableFeatures t;
  t.var_names = j.at("var_names").get<std::vector<std::string>>();
  t.var_types = j.at("var_types").get<std::vector<std::string>>();
  for (const auto& s : j.at("numeric_summaries")) {
    t.numeric_summaries.push_back({s.at("name").get<std::string>(), get_num(s, "min"),
                                   get_num(s, "median"), get_num(s, "mean"), get_num(s, "max")});
  }
  for (const auto& s : j.at("categorical_summaries")) {
    CategoricalSummary c{s.at("name").get<std::string>(), s.at("distinct").get<std::size_t>(), {}};
    for (const auto& l : s.at("top_levels")) {
      c.top_levels.push_back({l.at("level").get<std::string>(), l.at("count").get<std::size_t>()});
    }
    t.categorical_summaries.push_back(std::move(c));
  }
  t.nrow = j.at("nrow").get<std::size_t>();
  return t;
}

json code_json(const CodeFeatures& c) {
  return {{"input_vars", c.input_vars},     {"functions", c.functions},
          {"string_constants", c.string_constants}, {"packages", c.packages},
          {"code", c.code},                 {"n_lines", c.n_lines},
          {"comments", c.comments}};
}

CodeFeatures code_from(const json& j) {
  CodeFeatures c;
  c.input_vars = j.at("input_vars").get<std::set<std::string>>();
  c.functions = j.at("functions").get<std::set<std::string>>();
  c.string_constants = j.at("string_constants").get<std::set<std::string>>();
  c.packages = j.at("packages").get<std::set<std::string>>();
  c.code = j.at("code").get<std::string>();
  c.n_lines = j.at("n_lines").get<std::size_t>();
  c.comments = j.at("comments").get<std::vector<std::string>>();
  return c;
}

json specific_json(const SpecificFeatures& s) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PlotFeatures>) {
          json vars = json::array();
          for (const auto& v : f.vars) vars.push_back({{"column", v.column}, {"role", v.role}});
          return {{"vars", vars},       {"geoms", f.geoms},   {"stats", f.stats},
                  {"facets", f.facets}, {"titles", f.titles}, {"nobs", f.nobs},
                  {"data_summary", table_json(f.data_summary)}, {"system", f.system}};
        } else if constexpr (std::is_same_v<T, ModelFeatures>) {
          return {{"formula", f.formula},       {"family", f.family},
                  {"link", f.link},             {"coef_names", f.coef_names},
                  {"significant_terms", f.significant_terms}, {"nobs", f.nobs}};
        } else if constexpr (std::is_same_v<T, TableFeatures>) {
          return table_json(f);
        } else if constexpr (std::is_same_v<T, GenericFeatures>) {
          return {{"value_kind", f.value_kind}, {"sketch", f.sketch}};
        } else {
          return {{"n_results", f.n_results},
                  {"n_plots", f.n_plots},
                  {"n_models", f.n_models},
                  {"result_ids", f.result_ids},
                  {"results_interdependent", f.results_interdependent},
                  {"text", f.text},
                  {"code", f.code},
                  {"front_matter", f.front_matter}};
        }
      },
      s);
}

SpecificFeatures specific_from(const std::string& klass, const json& j) {
  if (klass == "plot") {
    PlotFeatures f;
    for (const auto& v : j.at("vars")) {
      f.vars.push_back({v.at("column").get<std::string>(), v.at("role").get<std::string>()});
    }
    f.geoms = j.at("geoms").get<std::vector<std::string>>();
    f.stats = j.at("stats").get<std::vector<std::string>>();
    f.facets = j.at("facets").get<std::vector<std::string>>();
    f.titles = j.at("titles").get<std::vector<std::string>>();
    f.nobs = j.at("nobs").get<std::size_t>();
    f.data_summary = table_from(j.at("data_summary"));
    f.system = j.at("system").get<std::string>();
    return f;
  }
  if (klass == "model") {
    ModelFeatures f;
    f.formula = j.at("formula").get<std::string>();
    f.family = j.at("family").get<std::string>();
    f.link = j.at("link").get<std::string>();
    f.coef_names = j.at("coef_names").get<std::vector<std::string>>();
    f.significant_terms = j.at("significant_terms").get<std::vector<std::string>>();
    f.nobs = j.at("nobs").get<std::size_t>();
    return f;
  }
  if (klass == "table") return table_from(j);
  if (klass == "generic") {
    return GenericFeatures{j.at("value_kind").get<std::string>(), j.at("sketch").get<std::string>()};
  }
  if (klass == "report") {
    ReportFeatures f;
    f.n_results = j.at("n_results").get<std::size_t>();
    f.n_plots = j.at("n_plots").get<std::size_t>();
    f.n_models = j.at("n_models").get<std::size_t>();
    f.result_ids = j.at("result_ids").get<std::vector<std::string>>();
    f.results_interdependent = j.at("results_interdependent").get<bool>();
    f.text = j.at("text").get<std::string>();
    f.code = j.at("code").get<std::string>();
    f.front_matter = j.at("front_matter").get<std::map<std::string, std::string>>();
    return f;
  }
  throw std::invalid_argument("unknown klass '" + klass + "'");
}

}  // namespace

json to_json(const FeatureSet& fs) {
  const CommonFeatures& c = fs.common;
  json common = {{"uniqueid", c.uniqueid},
                 {"klass", c.klass},
                 {"tags", c.tags},
                 {"user", c.user},
                 {"timestamp", c.timestamp},
                 {"tool_version", c.tool_version},
                 {"platform", c.platform},
                 {"source_file", opt(c.source_file)},
                 {"project", opt(c.project)},
                 {"code", code_json(c.code)},
                 {"session_code_ref", c.session_code_ref}};
  return {{"common", common}, {"specific", specific_json(fs.specific)}};
}

FeatureSet featureset_from_json(const json& j) {
  try {
    FeatureSet fs;
    const json& c = j.at("common");
    fs.common.uniqueid = c.at("uniqueid").get<std::string>();
    fs.common.klass = c.at("klass").get<std::string>();
    fs.common.tags = c.at("tags").get<std::vector<std::string>>();
    fs.common.user = c.at("user").get<std::string>();
    fs.common.timestamp = c.at("timestamp").get<std::string>();
    fs.common.tool_version = c.at("tool_version").get<std::string>();
    fs.common.platform = c.at("platform").get<std::string>();
    fs.common.source_file = get_opt(c, "source_file");
    fs.common.project = get_opt(c, "project");
    fs.common.code = code_from(c.at("code"));
    fs.common.session_code_ref = c.at("session_code_ref").get<std::string>();
    fs.specific = specific_from(fs.common.klass, j.at("specific"));
    return fs;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed feature set: ") + e.what());
  }
}

void flatten_json(const json& j, const std::string& prefix, std::vector<FlatField>& out) {
  switch (j.type()) {
    case json::value_t::null: return;
    case json::value_t::object:
      for (auto it = j.begin(); it != j.end(); ++it) {
        flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
      }
      return;
    case json::value_t::array:
      for (const auto& x : j) flatten_json(x, prefix, out);
      return;
    case json::value_t::string: out.emplace_back(prefix, j.get<std::string>()); return;
    case json::value_t::boolean: out.emplace_back(prefix, j.get<bool>() ? "true" : "false"); return;
    case json::value_t::number_float: out.emplace_back(prefix, canonical_number(j.get<double>())); return;
    case json::value_t::number_integer: out.emplace_back(prefix, std::to_string(j.get<std::int64_t>())); return;
    case json::value_t::number_unsigned: out.emplace_back(prefix, std::to_string(j.get<std::uint64_t>())); return;
    default: return;
  }
}

std::vector<FlatField> flatten_text(const FeatureSet& fs) {
  std::vector<FlatField> out;
  flatten_json(to_json(fs), "", out);
  return out;
}

std::string content_bytes(const FeatureSet& fs) {
  json j = to_json(fs);
  json& c = j["common"];
  c.erase("uniqueid");
  c.erase("timestamp");
  c.erase("user");
  return canonical_dump(j);
}

// ---------------------------------------------------------------------------
// show()

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string join(const std::set<std::string>& xs, const std::string& sep) {
  return join(std::vector<std::string>(xs.begin(), xs.end()), sep);
}

std::string or_na(const std::string& s) { return s.empty() ? "NA" : s; }

}  // namespace

std::string show(const FeatureSet& fs) {
  const CommonFeatures& c = fs.common;
  std::ostringstream out;
  static const std::map<std::string, std::string> kDescriptions = {
      {"plot", "A plot FeatureSet for a tracklang plot spec"},
      {"model", "A model FeatureSet for a linear model fit"},
      {"table", "A table FeatureSet for a data table"},
      {"generic", "A generic FeatureSet"},
      {"report", "A report FeatureSet for a woven document"},
  };
  auto d = kDescriptions.find(c.klass);
  out << (d != kDescriptions.end() ? d->second : "A FeatureSet of klass " + c.klass) << "\n";
  out << "id: " << or_na(c.uniqueid) << "\n";
  out << "tags: " << join(c.tags, ", ") << "\n";
  out << "location: " << c.code.n_lines << " lines of code in "
      << c.source_file.value_or("<unknown file>") << " within\n";
  out << "\tproject: " << c.project.value_or("NA") << "\n";
  out << "\tpackage: " << join(c.code.packages, " ") << "\n";

  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PlotFeatures>) {
          out << "titles: " << (f.titles.empty() ? "NA" : join(f.titles, ", ")) << "\n";
          std::vector<std::string> vars;
          for (const auto& v : f.vars) vars.push_back(v.column + " <" + v.role + ">");
          out << "vars: " << join(vars, ", ") << "\n";
          out << "facets:" << (f.facets.empty() ? "" : " " + join(f.facets, " ")) << "\n";
          out << "geom(s): " << join(f.geoms, " ") << "\n";
          out << "stat(s): " << join(f.stats, " ") << "\n";
        } else if constexpr (std::is_same_v<T, ModelFeatures>) {
          out << "formula: " << f.formula << "\n";
          out << "family: " << f.family << " (link: " << f.link << ")\n";
          out << "coefficients: " << join(f.coef_names, " ") << "\n";
          out << "significant terms: " << join(f.significant_terms, " ") << "\n";
          out << "nobs: " << f.nobs << "\n";
        } else if constexpr (std::is_same_v<T, TableFeatures>) {
          std::vector<std::string> vars;
          for (std::size_t i = 0; i < f.var_names.size(); ++i) {
            vars.push_back(f.var_names[i] + " <" + f.var_types[i] + ">");
          }
          out << "vars: " << join(vars, ", ") << "\n";
          out << "nrow: " << f.nrow << "\n";
        } else if constexpr (std::is_same_v<T, GenericFeatures>) {
          out << "structure: " << f.sketch << "\n";
        } else {
          auto title = f.front_matter.find("title");
          out << "title: " << (title == f.front_matter.end() ? "NA" : title->second) << "\n";
          out << "results: " << f.n_results << " (" << f.n_plots << " plots, " << f.n_models
              << " models)\n";
          out << "result ids: " << join(f.result_ids, " ") << "\n";
          out << "interdependent: " << (f.results_interdependent ? "yes" : "no") << "\n";
        }
      },
      fs.specific);
  return out.str();
}

}  // namespace trackr
