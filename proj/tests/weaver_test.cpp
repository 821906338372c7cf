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

#include "support/fixtures.hpp"
#include "trackr/backend.hpp"
#include "trackr/record.hpp"
#include "trackr/weaver.hpp"

namespace trackr {
namespace {

WeaveOptions options() {
  WeaveOptions o;
  o.env.user = "alice";
  o.env.tool_version = "trackr test";
  o.env.platform = "Linux-x86_64";
  o.base_dir = testing::fixture_dir() / "walkthrough";
  return o;
}

LiterateDoc walkthrough() {
  return parse_document(testing::read_text(testing::fixture("walkthrough/report.tmd")));
}

std::vector<const Chunk*> chunks(const LiterateDoc& d) {
  std::vector<const Chunk*> out;
  for (const auto& s : d.segments)
    if (auto* c = std::get_if<Chunk>(&s)) out.push_back(c);
  return out;
}

TEST(ParseDocument, FrontMatter) {
  LiterateDoc d = parse_document("---\ntitle: QC Report\nauthor: bob\n---\nHello\n");
  EXPECT_EQ(d.front_matter.at("title"), "QC Report");
  EXPECT_EQ(d.front_matter.at("author"), "bob");
  ASSERT_EQ(d.segments.size(), 1u);
  EXPECT_NE(std::get<TextSegment>(d.segments[0]).text.find("Hello"), std::string::npos);
}

TEST(ParseDocument, QuotedFrontMatterValues) {
  LiterateDoc d = parse_document("---\ntitle: \"A: B\"\nkeywords: genes, qc\n---\n");
  EXPECT_EQ(d.front_matter.at("title"), "A: B");
  EXPECT_EQ(doc_keywords(d), (std::vector<std::string>{"genes", "qc"}));
}

TEST(ParseDocument, AutoLabels) {
  LiterateDoc d = parse_document("intro\n```{track}\nx <- 1\n```\nmiddle\n```{track}\ny <- 2\n```\n");
  auto cs = chunks(d);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0]->label, "chunk-1");
  EXPECT_EQ(cs[1]->label, "chunk-2");
  EXPECT_EQ(cs[1]->code.size(), 1u);
  EXPECT_EQ(d.segments.size(), 4u);
}

TEST(ParseDocument, LabelsAndOptions) {
  LiterateDoc d = parse_document("```{track setup, display=false, fig.width=7}\nx <- 1\n```\n");
  auto cs = chunks(d);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0]->label, "setup");
  EXPECT_EQ(cs[0]->options.at("display"), "false");
  EXPECT_EQ(cs[0]->options.at("fig.width"), "7");
  EXPECT_FALSE(cs[0]->displays());
}

TEST(ParseDocument, UnclosedFence) {
  try {
    parse_document("text\n```{track}\nx <- 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position().line, 2);
  }
}

TEST(ParseDocument, BadChunkHeader) {
  EXPECT_THROW(parse_document("```{track a, =1}\nx <- 1\n```\n"), ParseError);
  EXPECT_THROW(parse_document("```{track a}\n```\n```{track a}\n```\n"), ParseError);
}

TEST(ParseDocument, ChunkSyntaxErrorUsesDocumentLine) {
  try {
    parse_document("# title\n\n```{track}\nx <- 1\ny <- (\n```\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.position().line, 5);
  }
}

TEST(ParseDocument, OtherFencesAreText) {
  LiterateDoc d = parse_document("```python\nprint(1)\n```\n");
  EXPECT_TRUE(chunks(d).empty());
  EXPECT_NE(report_text(d).find("print(1)"), std::string::npos);
}

TEST(ReportText, ExcludesCodeAndCollapsesWhitespace) {
  LiterateDoc d = walkthrough();
  std::string text = report_text(d);
  EXPECT_NE(text.find("gene X was upregulated"), std::string::npos);
  EXPECT_EQ(text.find("read_csv"), std::string::npos);
  EXPECT_EQ(text.find("\n"), std::string::npos);
  EXPECT_EQ(text.find("  "), std::string::npos);
}

TEST(ReportText, EmptyDocument) {
  LiterateDoc d = parse_document("");
  EXPECT_TRUE(d.segments.empty());
  EXPECT_EQ(report_text(d), "");
}

TEST(Weave, WalkthroughRecordsTwoPlotsAndReport) {
  auto backend = memory_backend();
  WeaveResult r = weave_and_record(walkthrough(), *backend, options());
  EXPECT_EQ(backend->size(), 3u);
  ASSERT_EQ(r.result_ids.size(), 2u);
  auto report = backend->get(r.report_id);
  ASSERT_TRUE(report.has_value());
  EXPECT_EQ(report->featureset.common.klass, "report");
  const auto& rf = std::get<ReportFeatures>(report->featureset.specific);
  EXPECT_EQ(rf.n_results, 2u);
  EXPECT_EQ(rf.n_plots, 2u);
  EXPECT_EQ(rf.n_models, 0u);
  EXPECT_EQ(rf.result_ids, r.result_ids);
  EXPECT_EQ(report->result_ids, r.result_ids);
  EXPECT_TRUE(rf.results_interdependent);
  EXPECT_EQ(rf.front_matter.at("title"), "Diamond price QC");
  auto& tags = report->featureset.common.tags;
  EXPECT_NE(std::find(tags.begin(), tags.end(), "diamonds"), tags.end());
  EXPECT_NE(std::find(tags.begin(), tags.end(), "report"), tags.end());
  for (const auto& id : r.result_ids) {
    auto a = backend->get(id);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->report_id, std::optional<std::string>(r.report_id));
    EXPECT_EQ(a->featureset.common.klass, "plot");
  }
  EXPECT_EQ(find_records(*backend, "upregulated").ids, (std::vector<std::string>{r.report_id}));
}

TEST(Weave, HistoryCarriesChunkLabels) {
  WeaveResult r = weave(walkthrough(), options());
  ASSERT_FALSE(r.history.entries().empty());
  EXPECT_EQ(r.history.entries().front().origin, Origin::weave("price-by-carat"));
  EXPECT_EQ(r.history.entries().back().origin, Origin::weave("depth-by-price"));
}

TEST(Weave, RenderedCarriesIds) {
  WeaveResult r = weave(walkthrough(), options());
  EXPECT_NE(r.rendered.find("<!-- trackr-report: " + r.report_id + " -->"), std::string::npos);
  for (const auto& id : r.result_ids) {
    EXPECT_NE(r.rendered.find("<!-- trackr-id: " + id + " -->"), std::string::npos);
  }
  EXPECT_NE(r.rendered.find("```track\n"), std::string::npos);
  EXPECT_NE(r.rendered.find("gene X was upregulated"), std::string::npos);
}

TEST(Weave, IndependentResults) {
  auto doc = parse_document(
      "```{track}\nlibrary(vizlib)\nt <- read_csv(\"small.csv\")\n"
      "plot_spec(data = t, x = \"a\", geoms = [\"point\"])\n```\n"
      "```{track}\nu <- read_csv(\"small.csv\")\nfit_lm(\"b ~ a\", u)\nnrow(read_csv(\"small.csv\"))\n```\n");
  WeaveOptions o = options();
  o.base_dir = testing::fixture_dir();
  WeaveResult r = weave(doc, o);
  const Record& report = r.records.back();
  const auto& rf = std::get<ReportFeatures>(report.featureset.specific);
  EXPECT_EQ(rf.n_results, 3u);
  EXPECT_EQ(rf.n_plots, 1u);
  EXPECT_EQ(rf.n_models, 1u);
  EXPECT_EQ(rf.n_results, rf.n_plots + rf.n_models + 1);
  EXPECT_FALSE(rf.results_interdependent);
}

TEST(Weave, DisplayFalseSuppressesCapture) {
  auto doc = parse_document(
      "```{track setup, display=false}\nt <- read_csv(\"small.csv\")\nnrow(t)\n```\n"
      "```{track}\nsummary(t)\n```\n");
  WeaveOptions o = options();
  o.base_dir = testing::fixture_dir();
  WeaveResult r = weave(doc, o);
  ASSERT_EQ(r.result_ids.size(), 1u);
  EXPECT_EQ(r.records.size(), 2u);
}

TEST(Weave, FailingChunkLeavesStoreUntouched) {
  auto backend = memory_backend();
  auto doc = parse_document(testing::read_text(testing::fixture("walkthrough/failing.tmd")));
  try {
    weave_and_record(doc, *backend, options());
    FAIL() << "expected ChunkEvalError";
  } catch (const ChunkEvalError& e) {
    EXPECT_EQ(e.label(), "broken");
  }
  EXPECT_EQ(backend->size(), 0u);
}

TEST(Weave, ReweaveIsStable) {
  auto backend = memory_backend();
  WeaveResult a = weave_and_record(walkthrough(), *backend, options());
  WeaveOptions later = options();
  later.env.clock = [] { return std::chrono::system_clock::now() + std::chrono::hours(5); };
  WeaveResult b = weave_and_record(walkthrough(), *backend, later);
  EXPECT_EQ(a.report_id, b.report_id);
  EXPECT_EQ(a.result_ids, b.result_ids);
  EXPECT_EQ(backend->size(), 3u);
}

}  // namespace
}  // namespace trackr
