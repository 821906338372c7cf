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

#include "trackr/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>

#include <httplib.h>

#include "trackr/evaluator.hpp"
#include "trackr/hash.hpp"
#include "trackr/record.hpp"
#include "trackr/timeutil.hpp"

namespace trackr {

using nlohmann::json;

const std::map<std::string, std::string>& query_aliases() {
  static const std::map<std::string, std::string> kAliases = {
      {"user", "common.user"},
      {"klass", "common.klass"},
      {"tag", "common.tags"},
      {"tags", "common.tags"},
      {"id", "uniqueid"},
      {"report", "report_id"},
      {"file", "common.source_file"},
      {"project", "common.project"},
      {"fn", "common.code.functions"},
      {"package", "common.code.packages"},
      {"code", "common.code.code"},
      {"geom", "specific.geoms"},
      {"stat", "specific.stats"},
      {"var", "specific.vars.column"},
      {"title", "specific.titles"},
      {"formula", "specific.formula"},
      {"term", "specific.significant_terms"},
      {"text", "specific.text"},
  };
  return kAliases;
}

FindQuery parse_q(const std::string& q) {
  auto colon = q.find(':');
  if (colon != std::string::npos) {
    auto it = query_aliases().find(q.substr(0, colon));
    if (it != query_aliases().end()) return FindQuery{q.substr(colon + 1), {it->second}};
  }
  return FindQuery{q, {}};
}

std::string record_label(const Record& r) {
  const auto& specific = r.featureset.specific;
  if (const auto* p = std::get_if<PlotFeatures>(&specific)) {
    if (!p->titles.empty()) return p->titles.front();
    if (!p->vars.empty()) return p->vars.front().column;
    return "untitled";
  }
  if (const auto* m = std::get_if<ModelFeatures>(&specific)) return m->formula;
  if (const auto* rep = std::get_if<ReportFeatures>(&specific)) {
    auto it = rep->front_matter.find("title");
    return it == rep->front_matter.end() ? "untitled" : it->second;
  }
  if (const auto* t = std::get_if<TableFeatures>(&specific)) {
    return std::to_string(t->nrow) + " rows, " + std::to_string(t->var_names.size()) + " columns";
  }
  return std::get<GenericFeatures>(specific).sketch;
}

QueryPage run_query(const Backend& backend, const ServiceQuery& q) {
  if (q.page == 0) throw BadQuery("page must be at least 1");
  if (q.page_size == 0 || q.page_size > kMaxPageSize) {
    throw BadQuery("page_size must be between 1 and " + std::to_string(kMaxPageSize));
  }
  std::vector<Record> matches = backend.find(q.find);
  if (!q.facets.empty()) {
    std::vector<Record> kept;
    for (auto& r : matches) {
      auto flat = flatten_record(r);
      bool ok = std::all_of(q.facets.begin(), q.facets.end(), [&](const auto& facet) {
        return std::any_of(flat.begin(), flat.end(), [&](const FlatField& f) {
          return field_selects(facet.first, f.first) && f.second == facet.second;
        });
      });
      if (ok) kept.push_back(std::move(r));
    }
    matches = std::move(kept);
  }

  QueryPage page;
  page.total = matches.size();
  page.page = q.page;
  page.page_size = q.page_size;
  page.pages = (page.total + q.page_size - 1) / q.page_size;
  static const std::pair<const char*, const char*> kFacetFields[] = {
      {"klass", "common.klass"}, {"user", "common.user"}, {"tags", "common.tags"}, {"geoms", "specific.geoms"}};
  for (const auto& r : matches) {
    auto flat = flatten_record(r);
    for (const auto& [name, path] : kFacetFields) {
      std::set<std::string> seen;
      for (const auto& [p, text] : flat) {
        if (p == path && seen.insert(text).second) ++page.facet_counts[name][text];
      }
    }
  }
  std::size_t begin = (q.page - 1) * q.page_size;
  for (std::size_t i = begin; i < matches.size() && i < begin + q.page_size; ++i) {
    page.records.push_back(std::move(matches[i]));
  }
  return page;
}

json page_json(const QueryPage& page) {
  json ids = json::array();
  json records = json::array();
  for (const auto& r : page.records) {
    ids.push_back(r.uniqueid);
    records.push_back(record_to_json(r));
  }
  return {{"total", page.total},   {"page", page.page},       {"page_size", page.page_size},
          {"pages", page.pages},   {"ids", ids},              {"records", records},
          {"facets", page.facet_counts}};
}

// ---------------------------------------------------------------------------
// RSS

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 && c != '\n' && c != '\t' && c != '\r') {
          out.push_back(' ');
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

std::string url_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

Timestamp record_time(const Record& r) {
  return parse_rfc3339(r.featureset.common.timestamp).value_or(Timestamp{});
}

}  // namespace

std::string rss_feed(const Backend& backend, const std::string& q, std::size_t limit,
                     const std::string& base_url) {
  auto matches = backend.find(parse_q(q));
  if (matches.size() > limit) matches.resize(limit);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rss version=\"2.0\">\n<channel>\n";
  out += "<title>" + xml_escape(q.empty() ? "trackr: all records" : "trackr: " + q) + "</title>\n";
  out += "<link>" + xml_escape(base_url + "/records?q=" + url_encode(q)) + "</link>\n";
  out += "<description>" + xml_escape("Records matching '" + q + "'") + "</description>\n";
  out += "<generator>trackr</generator>\n";
  if (!matches.empty()) {
    out += "<lastBuildDate>" + format_rfc822(record_time(matches.front())) + "</lastBuildDate>\n";
  }
  for (const auto& r : matches) {
    const auto& c = r.featureset.common;
    out += "<item>\n";
    out += "<title>" + xml_escape(c.klass + ": " + record_label(r)) + "</title>\n";
    out += "<link>" + xml_escape(base_url + "/records/" + r.uniqueid) + "</link>\n";
    out += "<guid isPermaLink=\"false\">" + xml_escape(r.uniqueid) + "</guid>\n";
    out += "<pubDate>" + format_rfc822(record_time(r)) + "</pubDate>\n";
    out += "<author>" + xml_escape(c.user + "@localhost (" + c.user + ")") + "</author>\n";
    out += "<description>" + xml_escape(c.klass + " recorded by " + c.user + " at " + c.timestamp) +
           "</description>\n";
    for (const auto& t : c.tags) out += "<category>" + xml_escape(t) + "</category>\n";
    out += "</item>\n";
  }
  out += "</channel>\n</rss>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Thumbnails

namespace {

constexpr int kWidth = 160;
constexpr int kHeight = 120;
constexpr double kLeft = 22, kTop = 18, kRight = 152, kBottom = 104;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string short_num(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const NumericSummary* summary_for(const PlotFeatures& p, const std::string& role) {
  for (const auto& v : p.vars) {
    if (v.role != role) continue;
    for (const auto& s : p.data_summary.numeric_summaries) {
      if (s.name == v.column) return &s;
    }
  }
  return nullptr;
}

std::string svg_open(const std::string& label) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
         std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
         std::to_string(kHeight) + "\" role=\"img\" aria-label=\"" + xml_escape(label) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string plot_svg(const Record& r, const PlotFeatures& p) {
  std::string title = p.titles.empty() ? record_label(r) : p.titles.front();
  std::string out = svg_open(title);
  out += "<title>" + xml_escape(title) + "</title>\n";
  out += "<text x=\"80\" y=\"12\" font-size=\"9\" text-anchor=\"middle\">" + xml_escape(title) + "</text>\n";
  out += "<rect class=\"axes\" x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
         fmt(kRight - kLeft) + "\" height=\"" + fmt(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\"/>\n";
  const NumericSummary* xs = summary_for(p, "x");
  const NumericSummary* ys = summary_for(p, "y");
  if (xs) {
    out += "<text x=\"" + fmt(kLeft) + "\" y=\"114\" font-size=\"7\">" + short_num(xs->min) + "</text>\n";
    out += "<text x=\"" + fmt(kRight) + "\" y=\"114\" font-size=\"7\" text-anchor=\"end\">" +
           short_num(xs->max) + "</text>\n";
  }
  if (ys) {
    out += "<text x=\"2\" y=\"" + fmt(kBottom) + "\" font-size=\"7\">" + short_num(ys->min) + "</text>\n";
    out += "<text x=\"2\" y=\"" + fmt(kTop + 6) + "\" font-size=\"7\">" + short_num(ys->max) + "</text>\n";
  }

  auto digest = spooky128(r.uniqueid, 0, 0);
  Minstd rng(digest.lo % Minstd::kModulus);
  auto unit = [&] { return static_cast<double>(rng.next() - 1) / static_cast<double>(Minstd::kModulus - 2); };
  // Medians place the bulk of the cloud relative to the range.
  auto centre = [](const NumericSummary* s) {
    if (!s || !std::isfinite(s->min) || !std::isfinite(s->max) || s->max <= s->min) return 0.5;
    return std::clamp((s->median - s->min) / (s->max - s->min), 0.05, 0.95);
  };
  double cx = centre(xs);
  double cy = centre(ys);
  auto px = [&](double u) { return kLeft + 4 + u * (kRight - kLeft - 8); };
  auto py = [&](double v) { return kBottom - 4 - v * (kBottom - kTop - 8); };

  for (const auto& geom : p.geoms) {
    if (geom == "point") {
      std::size_t n = std::min<std::size_t>(100, p.nobs);
      out += "<g class=\"geom-point\" fill=\"#1f77b4\" fill-opacity=\"0.6\">\n";
      for (std::size_t i = 0; i < n; ++i) {
        double u = unit();
        double skew = std::pow(u, std::log(cx) / std::log(0.5));
        double noise = (unit() - 0.5) * 0.3;
        double v = std::clamp(std::pow(skew, std::log(cy) / std::log(0.5)) + noise, 0.0, 1.0);
        out += "<circle cx=\"" + fmt(px(skew)) + "\" cy=\"" + fmt(py(v)) + "\" r=\"1.4\"/>\n";
      }
      out += "</g>\n";
    } else if (geom == "smooth") {
      out += "<path class=\"geom-smooth\" d=\"M" + fmt(px(0)) + " " + fmt(py(0.1)) + " C" + fmt(px(0.35)) +
             " " + fmt(py(0.3)) + " " + fmt(px(0.6)) + " " + fmt(py(0.75)) + " " + fmt(px(1)) + " " +
             fmt(py(0.85)) + "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.6\"/>\n";
    } else if (geom == "line") {
      std::string d;
      for (int i = 0; i <= 10; ++i) {
        d += (i ? " L" : "M") + fmt(px(i / 10.0)) + " " + fmt(py(0.2 + 0.6 * unit()));
      }
      out += "<path class=\"geom-line\" d=\"" + d + "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.2\"/>\n";
    } else if (geom == "bar" || geom == "histogram") {
      out += "<g class=\"geom-" + geom + "\" fill=\"#9467bd\" fill-opacity=\"0.7\">\n";
      int bars = geom == "bar" ? 5 : 10;
      double w = (kRight - kLeft - 8) / bars;
      for (int i = 0; i < bars; ++i) {
        double h = 0.15 + 0.8 * unit();
        out += "<rect x=\"" + fmt(kLeft + 4 + i * w + 0.5) + "\" y=\"" + fmt(py(h)) + "\" width=\"" +
               fmt(w - 1) + "\" height=\"" + fmt(py(0) - py(h)) + "\"/>\n";
      }
      out += "</g>\n";
    } else if (geom == "boxplot") {
      out += "<g class=\"geom-boxplot\" fill=\"none\" stroke=\"#8c564b\">\n";
      for (int i = 0; i < 3; ++i) {
        double x = px(0.2 + 0.3 * i);
        double lo = 0.2 + 0.2 * unit();
        double hi = 0.6 + 0.2 * unit();
        out += "<rect x=\"" + fmt(x - 8) + "\" y=\"" + fmt(py(hi)) + "\" width=\"16\" height=\"" +
               fmt(py(lo) - py(hi)) + "\"/>\n";
        out += "<line x1=\"" + fmt(x - 8) + "\" x2=\"" + fmt(x + 8) + "\" y1=\"" + fmt(py((lo + hi) / 2)) +
               "\" y2=\"" + fmt(py((lo + hi) / 2)) + "\"/>\n";
      }
      out += "</g>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::string placeholder_svg(const Record& r) {
  const std::string& klass = r.featureset.common.klass;
  std::string label = klass + ": " + record_label(r);
  std::string out = svg_open(label);
  out += "<title>" + xml_escape(label) + "</title>\n";
  out += "<g class=\"placeholder klass-" + xml_escape(klass) + "\">\n";
  out += "<rect x=\"40\" y=\"20\" width=\"80\" height=\"60\" rx=\"6\" fill=\"#eeeeee\" stroke=\"#999999\"/>\n";
  out += "<text x=\"80\" y=\"56\" font-size=\"14\" text-anchor=\"middle\">" + xml_escape(klass) + "</text>\n";
  out += "</g>\n";
  out += "<text x=\"80\" y=\"100\" font-size=\"8\" text-anchor=\"middle\">" +
         xml_escape(label.substr(0, 40)) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string thumbnail_svg(const Record& r) {
  if (const auto* p = std::get_if<PlotFeatures>(&r.featureset.specific)) return plot_svg(r, *p);
  return placeholder_svg(r);
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  res.status = status;
  json body = {{"error", {{"code", code}, {"message", message}}}};
  res.set_content(body.dump(), "application/json");
}

std::size_t parse_count(const std::string& name, const std::string& text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw BadQuery(name + " must be a non-negative integer");
  }
  return v;
}

std::vector<std::string> param_values(const httplib::Request& req, const std::string& key) {
  std::vector<std::string> out;
  auto range = req.params.equal_range(key);
  for (auto it = range.first; it != range.second; ++it) {
    std::string v = it->second;
    std::size_t start = 0;
    while (start <= v.size()) {
      auto comma = v.find(',', start);
      if (comma == std::string::npos) comma = v.size();
      if (comma > start) out.push_back(v.substr(start, comma - start));
      start = comma + 1;
    }
  }
  return out;
}

ServiceQuery query_from(const httplib::Request& req) {
  ServiceQuery q;
  q.find = parse_q(req.has_param("q") ? req.get_param_value("q") : "");
  for (auto& f : param_values(req, "field")) q.find.fields.push_back(f);
  if (req.has_param("page")) q.page = parse_count("page", req.get_param_value("page"));
  if (req.has_param("page_size")) q.page_size = parse_count("page_size", req.get_param_value("page_size"));
  for (const auto& [k, v] : req.params) {
    if (k.rfind("facet.", 0) == 0 && k.size() > 6) q.facets[k.substr(6)] = v;
  }
  if (req.has_param("format") && req.get_param_value("format") != "json") {
    throw BadQuery("unsupported format '" + req.get_param_value("format") + "'");
  }
  return q;
}

}  // namespace

struct Service::Impl {
  Backend& backend;
  ServiceOptions options;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  Impl(Backend& b, ServiceOptions o) : backend(b), options(std::move(o)) {}

  std::string base() const {
    return options.base_url.value_or("http://" + options.host + ":" + std::to_string(port));
  }

  template <class F>
  void guarded(httplib::Response& res, F body) {
    try {
      body();
    } catch (const BadPattern& e) {
      send_error(res, 400, "bad_pattern", e.what());
    } catch (const BadQuery& e) {
      send_error(res, 400, "bad_query", e.what());
    } catch (const BackendError& e) {
      send_error(res, 500, "backend_error", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  }

  std::optional<Record> lookup(const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto r = backend.get(id);
    if (!r) send_error(res, 404, "not_found", "no record with id " + id);
    return r;
  }

  void routes() {
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server.Get("/records", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto page = run_query(backend, query_from(req));
        res.set_content(page_json(page).dump(), "application/json");
      });
    });
    server.Get(R"(/records/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (auto r = lookup(req, res)) res.set_content(record_to_json(*r).dump(), "application/json");
      });
    });
    server.Get(R"(/records/([^/]+)/code)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (auto r = lookup(req, res)) {
          res.set_content(r->featureset.common.code.code, "text/plain; charset=utf-8");
        }
      });
    });
    server.Get(R"(/records/([^/]+)/thumbnail\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (auto r = lookup(req, res)) res.set_content(thumbnail_svg(*r), "image/svg+xml");
      });
    });
    server.Get("/feed.rss", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::size_t limit = req.has_param("limit") ? parse_count("limit", req.get_param_value("limit")) : 20;
        std::string q = req.has_param("q") ? req.get_param_value("q") : "";
        res.set_content(rss_feed(backend, q, limit, base()), "application/rss+xml; charset=utf-8");
      });
    });
    server.Post("/records", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        Record r;
        try {
          r = record_from_json(json::parse(req.body));
        } catch (const std::exception& e) {
          throw BadQuery(std::string("invalid record document: ") + e.what());
        }
        r.uniqueid = record_id(r.featureset);
        r.featureset.common.uniqueid = r.uniqueid;
        bool replaced = backend.insert(r);
        res.status = replaced ? 200 : 201;
        res.set_content(json({{"id", r.uniqueid}, {"replaced", replaced}}).dump(), "application/json");
      });
    });
    server.Delete(R"(/records/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string id = req.matches[1];
        if (!rm_record(backend, id)) {
          send_error(res, 404, "not_found", "no record with id " + id);
          return;
        }
        res.set_content(json({{"removed", true}, {"id", id}}).dump(), "application/json");
      });
    });
    if (options.ui_dir) {
      server.set_mount_point("/ui", options.ui_dir->string());
    }
  }

  void bind() {
    routes();
    if (options.port == 0) {
      port = server.bind_to_any_port(options.host);
    } else {
      port = server.bind_to_port(options.host, options.port) ? options.port : -1;
    }
    if (port < 0) {
      throw BindError("cannot bind " + options.host + ":" + std::to_string(options.port));
    }
  }
};

Service::Service(Backend& backend, ServiceOptions options)
    : impl_(std::make_unique<Impl>(backend, std::move(options))) {}

Service::~Service() { stop(); }

void Service::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::run() {
  impl_->bind();
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const { return impl_->port; }

std::string Service::base_url() const { return impl_->base(); }

}  // namespace trackr
