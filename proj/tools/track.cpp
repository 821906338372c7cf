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

// Command line front end: record, find, rm, slice, weave, serve, show.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "trackr/analysis.hpp"
#include "trackr/evaluator.hpp"
#include "trackr/history.hpp"
#include "trackr/parser.hpp"
#include "trackr/record.hpp"
#include "trackr/service.hpp"
#include "trackr/timeutil.hpp"
#include "trackr/weaver.hpp"

namespace fs = std::filesystem;
using namespace trackr;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Session {
  Program program;
  Env env;
  HistoryLog history;
};

/// Evaluates a script the way an interactive session would, logging the
/// expressions that succeed.
Session run_script(const fs::path& script) {
  Session s;
  s.program = parse_program(slurp(script), script.string());
  s.env.base_dir = fs::absolute(script).parent_path();
  for (const auto& e : s.program.exprs) {
    try {
      eval_top(e, s.env);
      s.history.append(e, EvalStatus::Ok, Origin::interactive(), to_timestamp(s.env.clock()));
    } catch (const EvalError& err) {
      std::cerr << script.string() << ":" << err.span().begin.line << ": " << err.what() << "\n";
    }
  }
  if (const char* path = std::getenv("TRACKR_HISTORY"); path && *path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << s.history.save();
  }
  return s;
}

EnvironmentInfo environment_for(const fs::path& source) {
  EnvironmentInfo env = EnvironmentInfo::capture();
  env.source_file = source.filename().string();
  if (const char* project = std::getenv("TRACKR_PROJECT"); project && *project) env.project = project;
  return env;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trackr: record, search and serve analysis artifacts"};
  app.require_subcommand(1);
  std::string db;
  std::string backend_kind = "jsonfile";
  app.add_option("--db", db, "Record store path (default $TRACKR_DB or ~/.trackr/records.json)");
  app.add_option("--backend", backend_kind, "Store kind")->check(CLI::IsMember({"jsonfile", "indexed", "memory"}));

  std::string script, target;
  bool show_record = false;
  auto* record_cmd = app.add_subcommand("record", "Evaluate a script and record a variable's value");
  record_cmd->add_option("script", script)->required();
  record_cmd->add_option("--target", target, "Variable to record")->required();
  record_cmd->add_flag("--show", show_record, "Print the extracted summary");

  std::string pattern;
  std::vector<std::string> fields;
  bool ids_only = false, count_only = false, as_json = false;
  auto* find_cmd = app.add_subcommand("find", "Search records with a regular expression");
  find_cmd->add_option("pattern", pattern)->required();
  find_cmd->add_option("--field", fields, "Restrict matching to a field path (repeatable)");
  auto* ids_flag = find_cmd->add_flag("--ids", ids_only, "Print ids only");
  find_cmd->add_flag("--count", count_only, "Print the number of matches")->excludes(ids_flag);
  find_cmd->add_flag("--json", as_json, "Print record documents");

  std::string id;
  auto* rm_cmd = app.add_subcommand("rm", "Remove a record by id");
  rm_cmd->add_option("id", id)->required();

  auto* show_cmd = app.add_subcommand("show", "Print a record summary");
  show_cmd->add_option("id", id)->required();

  auto* slice_cmd = app.add_subcommand("slice", "Print the code that produced a variable");
  slice_cmd->add_option("script", script)->required();
  slice_cmd->add_option("--target", target)->required();

  std::string doc_path, out_path;
  auto* weave_cmd = app.add_subcommand("weave", "Weave a literate document and record its results");
  weave_cmd->add_option("doc", doc_path)->required();
  weave_cmd->add_option("--out", out_path, "Write the rendered markdown here");

  int port = 7878;
  std::string host = "127.0.0.1", ui_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP discovery API");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--ui", ui_dir, "Directory served under /ui/");

  CLI11_PARSE(app, argc, argv);

  auto open_store = [&] {
    return open_backend(backend_kind, db.empty() ? default_store_path() : fs::path(db));
  };

  try {
    if (*slice_cmd) {
      Program p = parse_program(slurp(script), script);
      std::cout << deparse(subprogram(p, backward_slice(p, target)));
      return 0;
    }
    if (*record_cmd) {
      Session s = run_script(script);
      const ArtifactValue* v = s.env.lookup(target);
      if (!v) {
        std::cerr << "track: '" << target << "' is not defined after running " << script << "\n";
        return 1;
      }
      Program hist = s.history.snapshot();
      ExtractionContext ctx;
      ctx.history = &hist;
      ctx.target = target;
      ctx.env = environment_for(script);
      auto store = open_store();
      Record r = make_record(*v, ctx);
      bool replaced = store->insert(r);
      if (replaced) std::cerr << "track: replaced existing record with identical content\n";
      std::cout << r.uniqueid << "\n";
      if (show_record) std::cout << show(r.featureset);
      return 0;
    }
    if (*find_cmd) {
      auto store = open_store();
      auto found = find_records(*store, pattern, fields, count_only ? RetType::Count : RetType::Record);
      if (count_only) {
        std::cout << found.count << "\n";
      } else if (ids_only) {
        for (const auto& r : found.records) std::cout << r.uniqueid << "\n";
      } else if (as_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : found.records) arr.push_back(record_to_json(r));
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& r : found.records) {
          std::cout << r.uniqueid << "\t" << r.featureset.common.klass << "\t"
                    << r.featureset.common.timestamp << "\t" << record_label(r) << "\n";
        }
      }
      return 0;
    }
    if (*rm_cmd) {
      auto store = open_store();
      bool removed = rm_record(*store, id);
      std::cout << (removed ? "removed " : "not found ") << id << "\n";
      return removed ? 0 : 1;
    }
    if (*show_cmd) {
      auto store = open_store();
      auto r = store->get(id);
      if (!r) {
        std::cerr << "track: no record with id " << id << "\n";
        return 1;
      }
      std::cout << show(r->featureset);
      return 0;
    }
    if (*weave_cmd) {
      LiterateDoc doc = parse_document(slurp(doc_path));
      WeaveOptions opts;
      opts.env = environment_for(doc_path);
      opts.base_dir = fs::absolute(doc_path).parent_path();
      auto store = open_store();
      WeaveResult res = weave_and_record(doc, *store, opts);
      if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << res.rendered;
      }
      std::cout << "report " << res.report_id << "\n";
      for (const auto& rid : res.result_ids) std::cout << "result " << rid << "\n";
      return 0;
    }
    if (*serve_cmd) {
      auto store = open_store();
      ServiceOptions opts;
      opts.host = host;
      opts.port = port;
      if (!ui_dir.empty()) opts.ui_dir = fs::path(ui_dir);
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      Service service(*store, opts);
      service.start();
      std::cout << "serving on " << service.base_url() << "\n" << std::flush;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      service.stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "track: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
