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

#include "trackr/weaver.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "trackr/analysis.hpp"
#include "trackr/error.hpp"
#include "trackr/evaluator.hpp"
#include "trackr/hash.hpp"
#include "trackr/lexer.hpp"
#include "trackr/parser.hpp"
#include "trackr/record.hpp"
#include "trackr/timeutil.hpp"

namespace trackr {

bool Chunk::displays() const {
  auto it = options.find("display");
  if (it == options.end()) return true;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return !(v == "false" || v == "no" || v == "0");
}

namespace {

Position at_line(std::size_t line) { return Position{static_cast<int>(line), 1}; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view src) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < src.size()) {
    std::size_t nl = src.find('\n', start);
    if (nl == std::string_view::npos) nl = src.size();
    std::string line(src.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

bool is_fence(const std::string& line) { return line.rfind("```", 0) == 0; }

/// Strips the `L:C: ` prefix that positioned errors carry.
std::string bare_message(const std::string& what) {
  auto first = what.find(':');
  if (first == std::string::npos) return what;
  auto second = what.find(": ", first + 1);
  return second == std::string::npos ? what : what.substr(second + 2);
}

void parse_header(const std::string& line, std::size_t lineno, Chunk& chunk) {
  // line starts with "```{track"
  auto close = line.rfind('}');
  if (close == std::string::npos || trim(line.substr(close + 1)) != "") {
    throw ParseError(at_line(lineno), "invalid chunk header '" + line + "'");
  }
  std::string inner = line.substr(9, close - 9);
  if (!inner.empty() && !std::isspace(static_cast<unsigned char>(inner[0])) && inner[0] != ',') {
    throw ParseError(at_line(lineno), "invalid chunk header '" + line + "'");
  }
  std::vector<std::string> parts;
  std::stringstream ss(inner);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(trim(part));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.empty()) {
      if (i == 0 && parts.size() > 0) continue;
      throw ParseError(at_line(lineno), "empty chunk option in '" + line + "'");
    }
    auto eq = p.find('=');
    if (eq == std::string::npos) {
      if (i != 0 || !chunk.label.empty()) {
        throw ParseError(at_line(lineno), "chunk option '" + p + "' needs a value");
      }
      if (p.find_first_of(" \t") != std::string::npos) {
        throw ParseError(at_line(lineno), "invalid chunk label '" + p + "'");
      }
      chunk.label = p;
      continue;
    }
    std::string key = trim(p.substr(0, eq));
    std::string value = trim(p.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!is_identifier(key)) throw ParseError(at_line(lineno), "invalid chunk option '" + p + "'");
    if (key == "label") {
      chunk.label = value;
      continue;
    }
    if (!chunk.options.emplace(key, value).second) {
      throw ParseError(at_line(lineno), "duplicate chunk option '" + key + "'");
    }
  }
}

Program parse_chunk_code(const Chunk& chunk, std::size_t first_line) {
  auto shift = [&](Position p) {
    return Position{p.line + static_cast<int>(first_line) - 1, p.column};
  };
  try {
    return parse_program(chunk.source, chunk.label);
  } catch (const ParseError& e) {
    throw ParseError(shift(e.position()), "chunk '" + chunk.label + "': " + bare_message(e.what()));
  } catch (const LexError& e) {
    throw ParseError(shift(e.position()), "chunk '" + chunk.label + "': " + bare_message(e.what()));
  }
}

}  // namespace

LiterateDoc parse_document(std::string_view source) {
  LiterateDoc doc;
  auto lines = split_lines(source);
  std::size_t i = 0;

  if (!lines.empty() && trim(lines[0]) == "---") {
    std::size_t j = 1;
    for (; j < lines.size(); ++j) {
      std::string l = trim(lines[j]);
      if (l == "---" || l == "...") break;
      if (l.empty() || l[0] == '#') continue;
      auto colon = l.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw ParseError(at_line(j + 1), "front matter line must be 'key: value'");
      }
      std::string key = trim(l.substr(0, colon));
      std::string value = trim(l.substr(colon + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
          value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
      }
      doc.front_matter[key] = value;
    }
    if (j == lines.size()) throw ParseError(Position{1, 1}, "unclosed front matter");
    i = j + 1;
  }

  std::set<std::string> labels;
  std::size_t auto_n = 0;
  std::string text;
  std::size_t text_line = i + 1;
  auto flush_text = [&] {
    if (!text.empty()) doc.segments.push_back(TextSegment{text, text_line});
    text.clear();
  };

  while (i < lines.size()) {
    const std::string& line = lines[i];
    if (line.rfind("```{track", 0) == 0) {
      flush_text();
      Chunk chunk;
      chunk.line = i + 1;
      parse_header(line, i + 1, chunk);
      ++auto_n;
      if (chunk.label.empty()) chunk.label = "chunk-" + std::to_string(auto_n);
      if (!labels.insert(chunk.label).second) {
        throw ParseError(at_line(i + 1), "duplicate chunk label '" + chunk.label + "'");
      }
      std::size_t j = i + 1;
      while (j < lines.size() && trim(lines[j]) != "```") chunk.source += lines[j++] + "\n";
      if (j == lines.size()) throw ParseError(at_line(i + 1), "unclosed chunk '" + chunk.label + "'");
      chunk.code = parse_chunk_code(chunk, i + 2);
      doc.segments.push_back(std::move(chunk));
      i = j + 1;
      text_line = i + 1;
      continue;
    }
    if (is_fence(line)) {
      // Other fenced blocks are prose; keep them whole so their contents
      // are never mistaken for chunk headers.
      std::size_t j = i + 1;
      while (j < lines.size() && !is_fence(trim(lines[j]))) ++j;
      if (j == lines.size()) throw ParseError(at_line(i + 1), "unclosed code fence");
      if (text.empty()) text_line = i + 1;
      for (std::size_t k = i; k <= j; ++k) text += lines[k] + "\n";
      i = j + 1;
      continue;
    }
    if (text.empty()) text_line = i + 1;
    text += line + "\n";
    ++i;
  }
  flush_text();
  return doc;
}

std::string report_text(const LiterateDoc& doc) {
  std::string out;
  for (const auto& seg : doc.segments) {
    const auto* t = std::get_if<TextSegment>(&seg);
    if (!t) continue;
    for (char c : t->text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!out.empty() && out.back() != ' ') out.push_back(' ');
      } else {
        out.push_back(c);
      }
    }
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> doc_keywords(const LiterateDoc& doc) {
  std::vector<std::string> out;
  auto it = doc.front_matter.find("keywords");
  if (it == doc.front_matter.end()) return out;
  std::string v = it->second;
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::stringstream ss(v);
  std::string k;
  while (std::getline(ss, k, ',')) {
    k = trim(k);
    if (k.size() >= 2 && (k.front() == '"' || k.front() == '\'') && k.back() == k.front()) {
      k = k.substr(1, k.size() - 2);
    }
    if (!k.empty()) out.push_back(k);
  }
  return out;
}

namespace {

struct Displayed {
  ArtifactValue value;
  std::size_t history_index;
  std::size_t segment;
};

bool slices_overlap(const Program& hist, const std::vector<std::size_t>& a,
                    const std::vector<std::size_t>& b) {
  std::set<std::size_t> sa(a.begin(), a.end());
  for (std::size_t i : b) {
    if (sa.count(i) && !std::holds_alternative<ast::Load>(hist.exprs[i].kind)) return true;
  }
  return false;
}

std::string placeholder(const Record& r) {
  const auto& c = r.featureset.common;
  std::string what = c.klass;
  if (const auto* g = std::get_if<GenericFeatures>(&r.featureset.specific)) what = g->sketch;
  return "*[" + what + " " + r.uniqueid + "]*";
}

}  // namespace

WeaveResult weave(const LiterateDoc& doc, const WeaveOptions& options) {
  WeaveResult result;
  Env env;
  env.clock = options.env.clock;
  env.base_dir = options.base_dir;

  std::vector<Displayed> displayed;
  for (std::size_t s = 0; s < doc.segments.size(); ++s) {
    const auto* chunk = std::get_if<Chunk>(&doc.segments[s]);
    if (!chunk) continue;
    for (const auto& e : chunk->code.exprs) {
      ArtifactValue v;
      try {
        v = eval_top(e, env);
      } catch (const EvalError& err) {
        throw ChunkEvalError(chunk->label, err.what());
      }
      result.history.append(e, EvalStatus::Ok, Origin::weave(chunk->label), to_timestamp(env.clock()));
      if (chunk->displays() && std::holds_alternative<ast::ExprStmt>(e.kind) &&
          v.kind() != ValueKind::Unit) {
        displayed.push_back({std::move(v), result.history.size() - 1, s});
      }
    }
  }

  Program hist = result.history.snapshot();
  std::map<std::string, std::vector<std::size_t>> slices;
  std::map<std::size_t, std::vector<std::string>> ids_by_segment;
  std::map<std::string, std::size_t> position;
  std::size_t n_plots = 0;
  std::size_t n_models = 0;
  for (const auto& d : displayed) {
    ExtractionContext ctx;
    ctx.history = &hist;
    ctx.target_index = d.history_index;
    ctx.env = options.env;
    ctx.significance = options.significance;
    Record r = make_record(d.value, ctx, options.registry);
    ids_by_segment[d.segment].push_back(r.uniqueid);
    if (position.count(r.uniqueid)) continue;
    position[r.uniqueid] = result.records.size();
    slices[r.uniqueid] = backward_slice_from(hist, d.history_index);
    if (r.featureset.common.klass == "plot") ++n_plots;
    if (r.featureset.common.klass == "model") ++n_models;
    result.result_ids.push_back(r.uniqueid);
    result.records.push_back(std::move(r));
  }

  ReportFeatures rf;
  rf.n_results = result.result_ids.size();
  rf.n_plots = n_plots;
  rf.n_models = n_models;
  rf.result_ids = result.result_ids;
  for (std::size_t a = 0; a < result.result_ids.size() && !rf.results_interdependent; ++a) {
    for (std::size_t b = a + 1; b < result.result_ids.size(); ++b) {
      if (slices_overlap(hist, slices[result.result_ids[a]], slices[result.result_ids[b]])) {
        rf.results_interdependent = true;
        break;
      }
    }
  }
  rf.text = report_text(doc);
  rf.code = deparse(hist);
  rf.front_matter = doc.front_matter;

  FeatureSet report;
  report.common.klass = "report";
  report.common.tags = {"report"};
  for (auto& k : doc_keywords(doc)) report.common.tags.push_back(k);
  report.common.tags = normalize_tags(report.common.tags);
  report.common.user = options.env.user;
  report.common.timestamp = format_rfc3339(to_timestamp(options.env.clock()));
  report.common.tool_version = options.env.tool_version;
  report.common.platform = options.env.platform;
  report.common.source_file = options.env.source_file;
  report.common.project = options.env.project;
  std::vector<std::size_t> every(hist.exprs.size());
  for (std::size_t i = 0; i < every.size(); ++i) every[i] = i;
  report.common.code = extract_code_features(hist, every);
  report.common.session_code_ref = artifact_id(rf.code).str();
  report.specific = std::move(rf);

  Record rep;
  rep.uniqueid = record_id(report);
  report.common.uniqueid = rep.uniqueid;
  rep.featureset = std::move(report);
  rep.result_ids = result.result_ids;
  result.report_id = rep.uniqueid;
  for (auto& r : result.records) r.report_id = rep.uniqueid;
  result.records.push_back(std::move(rep));

  std::ostringstream out;
  if (!doc.front_matter.empty()) {
    out << "---\n";
    for (const auto& [k, v] : doc.front_matter) out << k << ": " << v << "\n";
    out << "---\n";
  }
  out << "<!-- trackr-report: " << result.report_id << " -->\n";
  for (std::size_t s = 0; s < doc.segments.size(); ++s) {
    if (const auto* t = std::get_if<TextSegment>(&doc.segments[s])) {
      out << t->text;
      continue;
    }
    const auto& chunk = std::get<Chunk>(doc.segments[s]);
    out << "```track\n" << chunk.source << "```\n";
    for (const auto& id : ids_by_segment[s]) {
      out << "<!-- trackr-id: " << id << " -->\n";
      out << placeholder(result.records[position[id]]) << "\n";
    }
  }
  result.rendered = out.str();
  return result;
}

WeaveResult weave_and_record(const LiterateDoc& doc, Backend& backend, const WeaveOptions& options) {
  WeaveResult result = weave(doc, options);
  backend.insert_all(result.records);
  return result;
}

}  // namespace trackr
