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

#include "trackr/backend.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <shared_mutex>
#include <sstream>

#include "trackr/error.hpp"
#include "trackr/hash.hpp"
#include "trackr/timeutil.hpp"

namespace trackr {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> index_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {

std::regex compile_pattern(const std::string& pattern) {
  try {
    return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw BadPattern("invalid pattern '" + pattern + "': " + e.what());
  }
}

bool selected(const std::vector<std::string>& fields, const std::string& path) {
  if (fields.empty()) return true;
  return std::any_of(fields.begin(), fields.end(),
                     [&](const std::string& f) { return field_selects(f, path); });
}

std::int64_t sort_time(const Record& r) {
  auto t = parse_rfc3339(r.featureset.common.timestamp);
  return t ? t->time_since_epoch().count() : std::numeric_limits<std::int64_t>::min();
}

/// Records keyed by id with their flattened text and result ordering.
class RecordSet {
 public:
  struct Entry {
    Record record;
    std::vector<FlatField> flat;
    std::int64_t time;
  };

  bool put(const Record& r) {
    Entry e{r, flatten_record(r), sort_time(r)};
    auto [it, inserted] = entries_.insert_or_assign(r.uniqueid, std::move(e));
    (void)it;
    return !inserted;
  }

  bool erase(const std::string& id) { return entries_.erase(id) > 0; }
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

  const Entry* lookup(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::vector<Record> ordered(const std::vector<const Entry*>& picked) const {
    std::vector<const Entry*> v = picked;
    std::sort(v.begin(), v.end(), [](const Entry* a, const Entry* b) {
      if (a->time != b->time) return a->time > b->time;
      return a->record.uniqueid < b->record.uniqueid;
    });
    std::vector<Record> out;
    out.reserve(v.size());
    for (const Entry* e : v) out.push_back(e->record);
    return out;
  }

  std::vector<Record> all() const {
    std::vector<const Entry*> v;
    for (const auto& [id, e] : entries_) v.push_back(&e);
    return ordered(v);
  }

  std::vector<Record> scan(const FindQuery& q) const {
    std::regex re = compile_pattern(q.pattern);
    std::vector<const Entry*> hits;
    for (const auto& [id, e] : entries_) {
      for (const auto& [path, text] : e.flat) {
        if (selected(q.fields, path) && std::regex_search(text, re)) {
          hits.push_back(&e);
          break;
        }
      }
    }
    return ordered(hits);
  }

 private:
  std::map<std::string, Entry> entries_;
};

class MemoryBackend : public Backend {
 public:
  std::string kind() const override { return "memory"; }

  bool insert(const Record& r) override {
    std::unique_lock lock(mu_);
    return set_.put(r);
  }

  std::vector<bool> insert_all(const std::vector<Record>& rs) override {
    std::unique_lock lock(mu_);
    std::vector<bool> out;
    for (const auto& r : rs) out.push_back(set_.put(r));
    return out;
  }

  bool remove(const std::string& id) override {
    std::unique_lock lock(mu_);
    return set_.erase(id);
  }

  std::vector<Record> find(const FindQuery& q) const override {
    std::shared_lock lock(mu_);
    return set_.scan(q);
  }

  std::optional<Record> get(const std::string& id) const override {
    std::shared_lock lock(mu_);
    const auto* e = set_.lookup(id);
    return e ? std::optional<Record>(e->record) : std::nullopt;
  }

  std::vector<Record> all() const override {
    std::shared_lock lock(mu_);
    return set_.all();
  }

  std::size_t size() const override {
    std::shared_lock lock(mu_);
    return set_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  RecordSet set_;
};

struct FileSignature {
  bool exists = false;
  std::uint64_t size = 0;
  std::int64_t mtime_ns = 0;
  std::uint64_t inode = 0;
  friend bool operator==(const FileSignature&, const FileSignature&) = default;
};

FileSignature signature_of(const fs::path& p) {
  struct stat st {};
  if (::stat(p.c_str(), &st) != 0) return {};
  return {true, static_cast<std::uint64_t>(st.st_size),
          static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000000000 + st.st_mtim.tv_nsec,
          static_cast<std::uint64_t>(st.st_ino)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw BackendError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_synced(const fs::path& p, const std::string& bytes) {
  int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw BackendError("cannot write " + p.string());
  std::size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::write(fd, bytes.data() + off, bytes.size() - off);
    if (n <= 0) {
      ::close(fd);
      throw BackendError("short write to " + p.string());
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

/// Exclusive advisory lock on `<store>.lock` for the lifetime of the object.
class FileLock {
 public:
  explicit FileLock(const fs::path& store) {
    if (store.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(store.parent_path(), ec);
    }
    fs::path lock = store;
    lock += ".lock";
    fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw BackendError("cannot open lock file " + lock.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw BackendError("cannot lock " + lock.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

// Byte offset of the n-th element of the top-level JSON array in `bytes`.
std::size_t element_offset(const std::string& bytes, std::size_t n) {
  int depth = 0;
  bool in_string = false;
  bool expecting = false;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    char c = bytes[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') continue;
    if (expecting) {
      if (seen++ == n) return i;
      expecting = false;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      if (++depth == 1) expecting = true;
    } else if (c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 1) {
      expecting = true;
    }
  }
  return 0;
}

class JsonFileBackend : public Backend {
 public:
  JsonFileBackend(fs::path path, JsonFileOptions options)
      : path_(std::move(path)), options_(std::move(options)) {}

  /// Loads the store; split from the constructor so subclasses' hooks run.
  void open() {
    std::unique_lock lock(mu_);
    reload();
  }

  std::string kind() const override { return "jsonfile"; }

  bool insert(const Record& r) override {
    return mutate([&] { return std::vector<bool>{set_.put(r)}; }).front();
  }

  std::vector<bool> insert_all(const std::vector<Record>& rs) override {
    return mutate([&] {
      std::vector<bool> out;
      for (const auto& r : rs) out.push_back(set_.put(r));
      return out;
    });
  }

  bool remove(const std::string& id) override {
    std::unique_lock lock(mu_);
    FileLock file_lock(path_);
    refresh();
    if (!set_.lookup(id)) return false;
    set_.erase(id);
    commit();
    return true;
  }

  std::vector<Record> find(const FindQuery& q) const override {
    auto lock = read_lock();
    return search(q);
  }

  std::optional<Record> get(const std::string& id) const override {
    auto lock = read_lock();
    const auto* e = set_.lookup(id);
    return e ? std::optional<Record>(e->record) : std::nullopt;
  }

  std::vector<Record> all() const override {
    auto lock = read_lock();
    return set_.all();
  }

  std::size_t size() const override {
    auto lock = read_lock();
    return set_.size();
  }

 protected:
  virtual std::vector<Record> search(const FindQuery& q) const { return set_.scan(q); }
  /// Called with the store bytes after every load or write.
  virtual void on_synced(const std::string& bytes) { (void)bytes; }

  const RecordSet& records() const { return set_; }
  const fs::path& path() const { return path_; }

 private:
  template <class F>
  std::vector<bool> mutate(F apply) {
    std::unique_lock lock(mu_);
    FileLock file_lock(path_);
    refresh();
    auto out = apply();
    commit();
    return out;
  }

  std::shared_lock<std::shared_mutex> read_lock() const {
    {
      std::shared_lock lock(mu_);
      if (signature_of(path_) == loaded_) return lock;
    }
    {
      std::unique_lock lock(mu_);
      const_cast<JsonFileBackend*>(this)->refresh();
    }
    return std::shared_lock(mu_);
  }

  void refresh() {
    if (signature_of(path_) != loaded_) reload();
  }

  void reload() {
    set_.clear();
    FileSignature sig = signature_of(path_);
    std::string bytes;
    if (sig.exists) {
      bytes = read_file(path_);
      parse(bytes);
    }
    loaded_ = sig;
    on_synced(bytes);
  }

  void parse(const std::string& bytes) {
    json doc;
    try {
      doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
      set_.clear();
      throw CorruptStore(e.byte, e.what());
    }
    if (!doc.is_array()) throw CorruptStore(0, "store is not a JSON array");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      try {
        set_.put(record_from_json(doc[i]));
      } catch (const std::invalid_argument& e) {
        set_.clear();
        throw CorruptStore(element_offset(bytes, i), "record " + std::to_string(i) + ": " + e.what());
      }
    }
  }

  std::string serialize() const {
    json doc = json::array();
    for (const auto& [id, e] : set_.entries()) doc.push_back(record_to_json(e.record));
    return doc.dump(1) + "\n";
  }

  void commit() {
    std::string bytes = serialize();
    fs::path temp = path_;
    temp += ".tmp." + std::to_string(::getpid());
    try {
      if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
      write_file_synced(temp, bytes);
      if (options_.before_rename) options_.before_rename(temp);
      fs::rename(temp, path_);
    } catch (...) {
      std::error_code ec;
      fs::remove(temp, ec);
      try {
        reload();
      } catch (...) {
      }
      throw;
    }
    loaded_ = signature_of(path_);
    on_synced(bytes);
  }

  fs::path path_;
  JsonFileOptions options_;
  mutable std::shared_mutex mu_;
  RecordSet set_;
  FileSignature loaded_;
};

constexpr std::string_view kIndexMagic = "TRKIDX1";

bool plain_token(const std::string& pattern) {
  return !pattern.empty() && std::all_of(pattern.begin(), pattern.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return c < 0x80 && std::isalnum(c);
  });
}

class IndexedBackend : public JsonFileBackend {
 public:
  using JsonFileBackend::JsonFileBackend;

  std::string kind() const override { return "indexed"; }

  fs::path index_path() const {
    fs::path p = path();
    p += ".idx";
    return p;
  }

 protected:
  std::vector<Record> search(const FindQuery& q) const override {
    if (!plain_token(q.pattern)) return JsonFileBackend::search(q);
    std::string needle;
    for (char c : q.pattern) needle.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::set<std::string> ids;
    for (const auto& [token, postings] : postings_) {
      if (token.find(needle) == std::string::npos) continue;
      for (const auto& [id, field] : postings) {
        if (selected(q.fields, field)) ids.insert(id);
      }
    }
    std::vector<const RecordSet::Entry*> hits;
    for (const auto& id : ids) {
      if (const auto* e = records().lookup(id)) hits.push_back(e);
    }
    return records().ordered(hits);
  }

  void on_synced(const std::string& bytes) override {
    std::string digest = spooky128(bytes, 0, 0).hex();
    if (load_index(digest)) return;
    rebuild();
    write_index(digest);
  }

 private:
  using Posting = std::pair<std::string, std::string>;

  void rebuild() {
    postings_.clear();
    for (const auto& [id, e] : records().entries()) {
      for (const auto& [field, text] : e.flat) {
        for (auto& tok : index_tokens(text)) postings_[tok].insert({id, field});
      }
    }
  }

  bool load_index(const std::string& digest) {
    std::ifstream in(index_path(), std::ios::binary);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != kIndexMagic) return false;
    if (!std::getline(in, line) || line != "records " + digest) return false;
    std::map<std::string, std::set<Posting>> loaded;
    while (std::getline(in, line)) {
      auto t1 = line.find('\t');
      auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) return false;
      loaded[line.substr(0, t1)].insert({line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
    }
    postings_ = std::move(loaded);
    return true;
  }

  void write_index(const std::string& digest) const {
    std::string out;
    out += kIndexMagic;
    out += "\nrecords " + digest + "\n";
    for (const auto& [token, postings] : postings_) {
      for (const auto& [id, field] : postings) out += token + "\t" + id + "\t" + field + "\n";
    }
    fs::path temp = index_path();
    temp += ".tmp." + std::to_string(::getpid());
    try {
      write_file_synced(temp, out);
      fs::rename(temp, index_path());
    } catch (...) {
      std::error_code ec;
      fs::remove(temp, ec);
    }
  }

  std::map<std::string, std::set<Posting>> postings_;
};

}  // namespace

std::unique_ptr<Backend> memory_backend() { return std::make_unique<MemoryBackend>(); }

std::unique_ptr<Backend> jsonfile_backend(const fs::path& path, JsonFileOptions options) {
  auto b = std::make_unique<JsonFileBackend>(path, std::move(options));
  b->open();
  return b;
}

std::unique_ptr<Backend> indexed_backend(const fs::path& path, JsonFileOptions options) {
  auto b = std::make_unique<IndexedBackend>(path, std::move(options));
  b->open();
  return b;
}

fs::path default_store_path() {
  if (const char* db = std::getenv("TRACKR_DB"); db && *db) return db;
  const char* home = std::getenv("HOME");
  return fs::path(home && *home ? home : ".") / ".trackr" / "records.json";
}

std::unique_ptr<Backend> open_backend(const std::string& kind, const fs::path& path) {
  if (kind == "memory") return memory_backend();
  if (kind == "jsonfile" || kind == "json") return jsonfile_backend(path);
  if (kind == "indexed") return indexed_backend(path);
  throw BackendError("unknown backend '" + kind + "'");
}

}  // namespace trackr
