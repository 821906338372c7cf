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
#include <span>
#include <string>
#include <string_view>

namespace trackr {

/// 128-bit SpookyHash V2 digest. `hi` is the first output word of the
/// reference algorithm, `lo` the second.
struct Hash128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const Hash128&, const Hash128&) = default;

  /// 32 lowercase hex characters, hi word first.
  std::string hex() const;
};

/// SpookyHash V2 (Bob Jenkins, public domain), byte-compatible with the
/// reference `SpookyHash::Hash128`. Inputs shorter than 192 bytes take the
/// short path. Output assumes a little-endian host, like the reference.
Hash128 spooky128(std::span<const std::uint8_t> data, std::uint64_t seed1, std::uint64_t seed2);
Hash128 spooky128(std::string_view data, std::uint64_t seed1 = 0, std::uint64_t seed2 = 0);

inline constexpr std::string_view kArtifactIdPrefix = "SpkyV2_";

/// Content identifier, `SpkyV2_` followed by 32 lowercase hex digits.
class ArtifactId {
 public:
  ArtifactId() = default;

  /// Throws std::invalid_argument unless `text` is a well-formed id.
  static ArtifactId parse(std::string_view text);
  static bool is_valid(std::string_view text);
  static ArtifactId from_hash(const Hash128& h);

  const std::string& str() const { return text_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const ArtifactId&, const ArtifactId&) = default;
  friend auto operator<=>(const ArtifactId&, const ArtifactId&) = default;

 private:
  explicit ArtifactId(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// Id of a canonical byte serialization, hashed with seeds (0, 0).
ArtifactId artifact_id(std::string_view canonical);

}  // namespace trackr
