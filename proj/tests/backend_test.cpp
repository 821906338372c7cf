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

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "support/checks.hpp"
#include "support/fixtures.hpp"
#include "trackr/backend.hpp"
#include "trackr/hash.hpp"
#include "trackr/record.hpp"

namespace trackr {
namespace {

using testing::RecordGenerator;
using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> ids_of_find(const Backend& b, const std::string& pattern) {
  return testing::ids_of(b.find({pattern, {}}));
}

class BackendTest : public ::testing::TestWithParam<std::string> {
 protected:
  std::unique_ptr<Backend> open() { return open_backend(GetParam(), dir_ / "records.json"); }

  TempDir dir_;
};

using PersistentBackendTest = BackendTest;

TEST_P(BackendTest, InsertFindRemove) {
  auto b = open();
  EXPECT_EQ(b->kind(), GetParam());
  Record r = RecordGenerator(1).next();
  EXPECT_FALSE(b->insert(r));
  EXPECT_EQ(b->size(), 1u);
  auto got = b->get(r.uniqueid);
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(*got, r);
  auto found = b->find({r.uniqueid, {"uniqueid"}});
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0], r);
  EXPECT_TRUE(b->remove(r.uniqueid));
  EXPECT_FALSE(b->remove(r.uniqueid));
  EXPECT_TRUE(b->find({r.uniqueid, {}}).empty());
  EXPECT_FALSE(b->get(r.uniqueid).has_value());
}

TEST_P(BackendTest, ReinsertReplaces) {
  auto b = open();
  Record r = RecordGenerator(2).next();
  EXPECT_FALSE(b->insert(r));
  r.preview = "/records/" + r.uniqueid + "/thumbnail.svg";
  EXPECT_TRUE(b->insert(r));
  EXPECT_EQ(b->size(), 1u);
  EXPECT_EQ(b->get(r.uniqueid)->preview, r.preview);
}

TEST_P(BackendTest, InsertAllReportsReplacements) {
  auto b = open();
  auto rs = RecordGenerator(3).unique(3);
  b->insert(rs[1]);
  EXPECT_EQ(b->insert_all(rs), (std::vector<bool>{false, true, false}));
  EXPECT_EQ(b->size(), 3u);
}

TEST_P(BackendTest, MatchAllCountsEverything) {
  auto b = open();
  auto rs = RecordGenerator(4).unique(25);
  b->insert_all(rs);
  EXPECT_EQ(b->find({"", {}}).size(), 25u);
  EXPECT_EQ(b->all().size(), 25u);
  EXPECT_EQ(find_records(*b, "", {}, RetType::Count).count, 25u);
}

TEST_P(BackendTest, OrderedByTimestampDescThenId) {
  auto b = open();
  b->insert_all(RecordGenerator(5).unique(80));
  auto all = b->find({"", {}});
  ASSERT_EQ(all.size(), 80u);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto& prev = all[i - 1];
    const auto& cur = all[i];
    auto tp = parse_rfc3339(prev.featureset.common.timestamp);
    auto tc = parse_rfc3339(cur.featureset.common.timestamp);
    ASSERT_TRUE(*tp > *tc || (*tp == *tc && prev.uniqueid < cur.uniqueid)) << i;
  }
}

TEST_P(BackendTest, CaseInsensitiveRegex) {
  auto b = open();
  auto rs = RecordGenerator(6).unique(40);
  b->insert_all(rs);
  auto lower = ids_of_find(*b, "gene");
  auto upper = ids_of_find(*b, "GENE");
  EXPECT_FALSE(lower.empty());
  EXPECT_EQ(lower, upper);
}

TEST_P(BackendTest, FieldRestriction) {
  auto b = open();
  auto rs = RecordGenerator(7).unique(60);
  b->insert_all(rs);
  auto hits = b->find({"^alice$", {"common.user"}});
  std::size_t alices = 0;
  for (const auto& r : rs) alices += r.featureset.common.user == "alice";
  ASSERT_GT(alices, 0u);
  EXPECT_EQ(hits.size(), alices);
  for (const auto& r : hits) EXPECT_EQ(r.featureset.common.user, "alice");
  EXPECT_TRUE(b->find({"alice", {"common.klass"}}).empty());
  EXPECT_TRUE(b->find({"alice", {"no.such.field"}}).empty());
}

TEST_P(BackendTest, InvalidPatternIsBadPattern) {
  auto b = open();
  b->insert(RecordGenerator(8).next());
  EXPECT_THROW(b->find({"(unclosed", {}}), BadPattern);
  EXPECT_THROW(b->find({"[z-a]", {}}), BadPattern);
}

TEST_P(BackendTest, ConcurrentReadersDuringWrites) {
  auto b = open();
  auto rs = RecordGenerator(9).unique(40);
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!done) {
      auto all = b->find({"", {}});
      for (const auto& r : all) {
        if (r.uniqueid.empty()) ++bad;
      }
    }
  });
  for (const auto& r : rs) b->insert(r);
  done = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(b->size(), 40u);
}

TEST_P(PersistentBackendTest, HundredInsertsSurviveReopen) {
  auto rs = RecordGenerator(10).unique(100);
  {
    auto b = open();
    for (const auto& r : rs) b->insert(r);
  }
  auto b = open();
  EXPECT_EQ(b->size(), 100u);
  for (const auto& r : rs) ASSERT_EQ(b->get(r.uniqueid), std::optional<Record>(r));
}

TEST_P(PersistentBackendTest, SecondHandleSeesWrites) {
  auto a = open();
  auto b = open();
  auto rs = RecordGenerator(11).unique(2);
  a->insert(rs[0]);
  b->insert(rs[1]);
  EXPECT_EQ(a->size(), 2u);
  EXPECT_EQ(b->size(), 2u);
  a->remove(rs[1].uniqueid);
  EXPECT_FALSE(b->get(rs[1].uniqueid).has_value());
}

TEST_P(PersistentBackendTest, StoreSchemaVersion) {
  auto b = open();
  b->insert(RecordGenerator(12).next());
  auto doc = nlohmann::json::parse(testing::read_text(dir_ / "records.json"));
  ASSERT_TRUE(doc.is_array());
  EXPECT_EQ(doc[0]["schema_version"], kSchemaVersion);
}

INSTANTIATE_TEST_SUITE_P(Kinds, BackendTest, ::testing::Values("memory", "jsonfile", "indexed"),
                         [](const auto& info) { return info.param; });
INSTANTIATE_TEST_SUITE_P(Kinds, PersistentBackendTest, ::testing::Values("jsonfile", "indexed"),
                         [](const auto& info) { return info.param; });

TEST(JsonFile, CrashBeforeRenameKeepsOldFile) {
  TempDir dir;
  auto path = dir / "records.json";
  auto rs = RecordGenerator(20).unique(3);
  {
    auto b = jsonfile_backend(path);
    b->insert(rs[0]);
  }
  std::string before = testing::read_text(path);
  JsonFileOptions crash;
  crash.before_rename = [](const std::filesystem::path& temp) {
    ASSERT_TRUE(std::filesystem::exists(temp));
    throw std::runtime_error("simulated crash");
  };
  auto b = jsonfile_backend(path, crash);
  EXPECT_THROW(b->insert(rs[1]), std::runtime_error);
  EXPECT_EQ(testing::read_text(path), before);
  EXPECT_EQ(b->size(), 1u);
  EXPECT_FALSE(b->get(rs[1].uniqueid).has_value());
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos) << entry.path();
  }
  EXPECT_EQ(jsonfile_backend(path)->size(), 1u);
}

TEST(JsonFile, MalformedFileReportsOffset) {
  TempDir dir;
  auto path = dir / "records.json";
  write_text(path, "[\n  {\"schema_version\": 1,\n  oops\n]");
  try {
    jsonfile_backend(path)->size();
    FAIL() << "expected CorruptStore";
  } catch (const CorruptStore& e) {
    EXPECT_GE(e.offset(), 26u);
    EXPECT_LE(e.offset(), 30u);
  }
}

TEST(JsonFile, InvalidRecordReportsItsOffset) {
  TempDir dir;
  auto path = dir / "records.json";
  Record r = RecordGenerator(21).next();
  std::string good = record_to_json(r).dump();
  std::string text = "[" + good + ",  {\"schema_version\": 1}]";
  write_text(path, text);
  try {
    jsonfile_backend(path)->size();
    FAIL() << "expected CorruptStore";
  } catch (const CorruptStore& e) {
    EXPECT_EQ(e.offset(), good.size() + 4);
  }
}

TEST(JsonFile, NotAnArray) {
  TempDir dir;
  write_text(dir / "records.json", "{}");
  EXPECT_THROW(jsonfile_backend(dir / "records.json")->size(), CorruptStore);
}

TEST(JsonFile, MissingFileIsEmptyAndParentsCreated) {
  TempDir dir;
  auto path = dir / "nested" / "deeper" / "records.json";
  auto b = jsonfile_backend(path);
  EXPECT_EQ(b->size(), 0u);
  b->insert(RecordGenerator(22).next());
  EXPECT_TRUE(std::filesystem::exists(path));
}

TEST(Indexed, IndexFileFormat) {
  TempDir dir;
  auto path = dir / "records.json";
  auto b = indexed_backend(path);
  b->insert_all(RecordGenerator(30).unique(5));
  b->find({"smooth", {}});
  std::string idx = testing::read_text(path.string() + ".idx");
  ASSERT_TRUE(idx.starts_with("TRKIDX1\nrecords "));
  std::string store_hash = spooky128(testing::read_text(path)).hex();
  EXPECT_NE(idx.find("records " + store_hash + "\n"), std::string::npos);
  std::istringstream in(idx);
  std::string line, prev;
  std::getline(in, line);
  std::getline(in, line);
  int postings = 0;
  while (std::getline(in, line)) {
    ASSERT_EQ(std::count(line.begin(), line.end(), '\t'), 2) << line;
    ASSERT_LE(prev, line);
    std::string token = line.substr(0, line.find('\t'));
    for (char c : token) ASSERT_TRUE(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) << token;
    prev = line;
    ++postings;
  }
  EXPECT_GT(postings, 20);
}

TEST(Indexed, StaleIndexIsRebuilt) {
  TempDir dir;
  auto path = dir / "records.json";
  auto rs = RecordGenerator(31).unique(6);
  auto idx = indexed_backend(path);
  idx->insert_all({rs[0], rs[1]});
  auto plain = jsonfile_backend(path);
  plain->insert_all({rs[2], rs[3], rs[4], rs[5]});
  auto fresh = jsonfile_backend(path);
  for (const char* pattern : {"smooth", "alice", "gene", "gaussian", "qc"}) {
    EXPECT_EQ(testing::ids_of(idx->find({pattern, {}})), testing::ids_of(fresh->find({pattern, {}})))
        << pattern;
  }
  write_text(path.string() + ".idx", "TRKIDX1\nrecords 00\ngarbage\n");
  auto reopened = indexed_backend(path);
  EXPECT_EQ(testing::ids_of(reopened->find({"smooth", {}})), testing::ids_of(fresh->find({"smooth", {}})));
}

TEST(Indexed, AgreesWithJsonFileOnRandomQueries) {
  TempDir dir;
  auto rs = RecordGenerator(32).unique(120);
  auto a = jsonfile_backend(dir / "a.json");
  auto b = indexed_backend(dir / "b.json");
  auto m = memory_backend();
  a->insert_all(rs);
  b->insert_all(rs);
  m->insert_all(rs);
  RecordGenerator qgen(33);
  for (int i = 0; i < 200; ++i) {
    FindQuery q = qgen.query();
    auto want = testing::ids_of(a->find(q));
    ASSERT_EQ(testing::ids_of(b->find(q)), want) << q.pattern;
    ASSERT_EQ(testing::ids_of(m->find(q)), want) << q.pattern;
  }
}

TEST(Indexed, Tokens) {
  EXPECT_EQ(index_tokens("Log(price) ~ x-ray, v1.2"),
            (std::vector<std::string>{"log", "price", "x", "ray", "v1", "2"}));
  EXPECT_TRUE(index_tokens("  ,, ").empty());
}

TEST(FieldSelects, ExactOrDottedPrefix) {
  EXPECT_TRUE(field_selects("common.code", "common.code.functions"));
  EXPECT_TRUE(field_selects("common.code.functions", "common.code.functions"));
  EXPECT_FALSE(field_selects("common.co", "common.code"));
  EXPECT_FALSE(field_selects("common.code.functions", "common.code"));
}

TEST(Paths, DefaultStoreHonoursEnvironment) {
  setenv("TRACKR_DB", "/tmp/somewhere/db.json", 1);
  EXPECT_EQ(default_store_path(), std::filesystem::path("/tmp/somewhere/db.json"));
  unsetenv("TRACKR_DB");
  const char* home = std::getenv("HOME");
  std::string saved = home ? home : "";
  setenv("HOME", "/home/tester", 1);
  EXPECT_EQ(default_store_path(), std::filesystem::path("/home/tester/.trackr/records.json"));
  setenv("HOME", saved.c_str(), 1);
  EXPECT_THROW(open_backend("solr", "x"), BackendError);
}

TEST(RecordJson, RoundTrip) {
  Record r = RecordGenerator(40).next();
  r.result_ids = {"SpkyV2_" + std::string(32, 'c')};
  nlohmann::json j = record_to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(record_from_json(j), r);
  j["schema_version"] = 2;
  EXPECT_THROW(record_from_json(j), std::invalid_argument);
}

// Recording through the public API.

struct Recorded {
  Env env;
  Program program;
  ExtractionContext ctx;
};

Recorded evaluate(const std::string& src, const std::string& target) {
  Recorded r;
  r.program = parse_program(src);
  r.env.base_dir = testing::fixture_dir();
  eval_program(r.program, r.env);
  r.ctx.history = &r.program;
  r.ctx.target = target;
  r.ctx.env.user = "alice";
  r.ctx.env.tool_version = "trackr test";
  r.ctx.env.platform = "Linux-x86_64";
  return r;
}

TEST(RecordApi, SameValueTwiceSameId) {
  auto b = memory_backend();
  Recorded s = evaluate("t <- read_csv(\"small.csv\")", "t");
  RecordOutcome first = record(*s.env.lookup("t"), s.ctx, *b);
  s.ctx.env.user = "bob";
  RecordOutcome second = record(*s.env.lookup("t"), s.ctx, *b);
  EXPECT_EQ(first.id, second.id);
  EXPECT_FALSE(first.replaced);
  EXPECT_TRUE(second.replaced);
  EXPECT_EQ(b->size(), 1u);
  EXPECT_EQ(b->get(first.id)->featureset.common.user, "bob");
}

TEST(RecordApi, ScalarRecordRetrievable) {
  auto b = memory_backend();
  Recorded s = evaluate("x <- 1", "x");
  RecordOutcome out = record(*s.env.lookup("x"), s.ctx, *b);
  auto r = b->get(out.id);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->featureset.common.klass, "generic");
  EXPECT_EQ(r->featureset.common.uniqueid, out.id);
  EXPECT_EQ(out.id, record_id(r->featureset));
}

TEST(RecordApi, FindAndRemoveByValue) {
  auto b = memory_backend();
  Recorded s = evaluate("library(vizlib)\nt <- read_csv(\"small.csv\")\n"
                        "d <- plot_spec(data = t, x = \"a\", y = \"b\", geoms = [\"point\", \"smooth\"])",
                        "d");
  RecordOutcome out = record(*s.env.lookup("d"), s.ctx, *b);
  FindResult ids = find_records(*b, "smooth");
  EXPECT_EQ(ids.ids, (std::vector<std::string>{out.id}));
  FindResult full = find_records(*b, "smooth", {}, RetType::Record);
  ASSERT_EQ(full.records.size(), 1u);
  EXPECT_EQ(full.records[0].uniqueid, out.id);
  EXPECT_EQ(find_records(*b, "smooth", {}, RetType::Count).count, 1u);
  EXPECT_TRUE(rm_record(*b, *s.env.lookup("d"), s.ctx));
  EXPECT_FALSE(rm_record(*b, *s.env.lookup("d"), s.ctx));
  EXPECT_TRUE(find_records(*b, "smooth").ids.empty());
  EXPECT_FALSE(rm_record(*b, "SpkyV2_" + std::string(32, '0')));
}

}  // namespace
}  // namespace trackr
