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

#include "trackr/hash.hpp"

#include <array>
#include <cstring>
#include <stdexcept>

namespace trackr {
namespace {

constexpr std::uint64_t kConst = 0xdeadbeefdeadbeefULL;
constexpr std::size_t kNumVars = 12;
constexpr std::size_t kBlockSize = kNumVars * 8;  // 96
constexpr std::size_t kBufSize = 2 * kBlockSize;  // 192

constexpr std::uint64_t rot64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t load64(const std::uint8_t* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return v;
}

std::uint32_t load32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

using State = std::array<std::uint64_t, kNumVars>;

void mix(const std::uint64_t* d, State& s) {
  // Rotation constants of the V2 reference.
  s[0] += d[0];   s[2] ^= s[10]; s[11] ^= s[0];  s[0] = rot64(s[0], 11);   s[11] += s[1];
  s[1] += d[1];   s[3] ^= s[11]; s[0] ^= s[1];   s[1] = rot64(s[1], 32);   s[0] += s[2];
  s[2] += d[2];   s[4] ^= s[0];  s[1] ^= s[2];   s[2] = rot64(s[2], 43);   s[1] += s[3];
  s[3] += d[3];   s[5] ^= s[1];  s[2] ^= s[3];   s[3] = rot64(s[3], 31);   s[2] += s[4];
  s[4] += d[4];   s[6] ^= s[2];  s[3] ^= s[4];   s[4] = rot64(s[4], 17);   s[3] += s[5];
  s[5] += d[5];   s[7] ^= s[3];  s[4] ^= s[5];   s[5] = rot64(s[5], 28);   s[4] += s[6];
  s[6] += d[6];   s[8] ^= s[4];  s[5] ^= s[6];   s[6] = rot64(s[6], 39);   s[5] += s[7];
  s[7] += d[7];   s[9] ^= s[5];  s[6] ^= s[7];   s[7] = rot64(s[7], 57);   s[6] += s[8];
  s[8] += d[8];   s[10] ^= s[6]; s[7] ^= s[8];   s[8] = rot64(s[8], 55);   s[7] += s[9];
  s[9] += d[9];   s[11] ^= s[7]; s[8] ^= s[9];   s[9] = rot64(s[9], 54);   s[8] += s[10];
  s[10] += d[10]; s[0] ^= s[8];  s[9] ^= s[10];  s[10] = rot64(s[10], 22); s[9] += s[11];
  s[11] += d[11]; s[1] ^= s[9];  s[10] ^= s[11]; s[11] = rot64(s[11], 46); s[10] += s[0];
}

void end_partial(State& h) {
  h[11] += h[1];  h[2] ^= h[11];  h[1] = rot64(h[1], 44);
  h[0] += h[2];   h[3] ^= h[0];   h[2] = rot64(h[2], 15);
  h[1] += h[3];   h[4] ^= h[1];   h[3] = rot64(h[3], 34);
  h[2] += h[4];   h[5] ^= h[2];   h[4] = rot64(h[4], 21);
  h[3] += h[5];   h[6] ^= h[3];   h[5] = rot64(h[5], 38);
  h[4] += h[6];   h[7] ^= h[4];   h[6] = rot64(h[6], 33);
  h[5] += h[7];   h[8] ^= h[5];   h[7] = rot64(h[7], 10);
  h[6] += h[8];   h[9] ^= h[6];   h[8] = rot64(h[8], 13);
  h[7] += h[9];   h[10] ^= h[7];  h[9] = rot64(h[9], 38);
  h[8] += h[10];  h[11] ^= h[8];  h[10] = rot64(h[10], 53);
  h[9] += h[11];  h[0] ^= h[9];   h[11] = rot64(h[11], 42);
  h[10] += h[0];  h[1] ^= h[10];  h[0] = rot64(h[0], 54);
}

void end_block(const std::uint64_t* d, State& h) {
  for (std::size_t i = 0; i < kNumVars; ++i) h[i] += d[i];
  end_partial(h);
  end_partial(h);
  end_partial(h);
}

void short_mix(std::uint64_t& h0, std::uint64_t& h1, std::uint64_t& h2, std::uint64_t& h3) {
  h2 = rot64(h2, 50);  h2 += h3;  h0 ^= h2;
  h3 = rot64(h3, 52);  h3 += h0;  h1 ^= h3;
  h0 = rot64(h0, 30);  h0 += h1;  h2 ^= h0;
  h1 = rot64(h1, 41);  h1 += h2;  h3 ^= h1;
  h2 = rot64(h2, 54);  h2 += h3;  h0 ^= h2;
  h3 = rot64(h3, 48);  h3 += h0;  h1 ^= h3;
  h0 = rot64(h0, 38);  h0 += h1;  h2 ^= h0;
  h1 = rot64(h1, 37);  h1 += h2;  h3 ^= h1;
  h2 = rot64(h2, 62);  h2 += h3;  h0 ^= h2;
  h3 = rot64(h3, 34);  h3 += h0;  h1 ^= h3;
  h0 = rot64(h0, 5);   h0 += h1;  h2 ^= h0;
  h1 = rot64(h1, 36);  h1 += h2;  h3 ^= h1;
}

void short_end(std::uint64_t& h0, std::uint64_t& h1, std::uint64_t& h2, std::uint64_t& h3) {
  h3 ^= h2;  h2 = rot64(h2, 15);  h3 += h2;
  h0 ^= h3;  h3 = rot64(h3, 52);  h0 += h3;
  h1 ^= h0;  h0 = rot64(h0, 26);  h1 += h0;
  h2 ^= h1;  h1 = rot64(h1, 51);  h2 += h1;
  h3 ^= h2;  h2 = rot64(h2, 28);  h3 += h2;
  h0 ^= h3;  h3 = rot64(h3, 9);   h0 += h3;
  h1 ^= h0;  h0 = rot64(h0, 47);  h1 += h0;
  h2 ^= h1;  h1 = rot64(h1, 54);  h2 += h1;
  h3 ^= h2;  h2 = rot64(h2, 32);  h3 += h2;
  h0 ^= h3;  h3 = rot64(h3, 25);  h0 += h3;
  h1 ^= h0;  h0 = rot64(h0, 63);  h1 += h0;
}

Hash128 short_hash(const std::uint8_t* p, std::size_t length, std::uint64_t seed1,
                   std::uint64_t seed2) {
  std::size_t remainder = length % 32;
  std::uint64_t a = seed1;
  std::uint64_t b = seed2;
  std::uint64_t c = kConst;
  std::uint64_t d = kConst;

  if (length > 15) {
    const std::uint8_t* end = p + (length / 32) * 32;
    for (; p < end; p += 32) {
      c += load64(p);
      d += load64(p + 8);
      short_mix(a, b, c, d);
      a += load64(p + 16);
      b += load64(p + 24);
    }
    if (remainder >= 16) {
      c += load64(p);
      d += load64(p + 8);
      short_mix(a, b, c, d);
      p += 16;
      remainder -= 16;
    }
  }

  d += static_cast<std::uint64_t>(length) << 56;
  switch (remainder) {
    case 15: d += static_cast<std::uint64_t>(p[14]) << 48; [[fallthrough]];
    case 14: d += static_cast<std::uint64_t>(p[13]) << 40; [[fallthrough]];
    case 13: d += static_cast<std::uint64_t>(p[12]) << 32; [[fallthrough]];
    case 12:
      d += load32(p + 8);
      c += load64(p);
      break;
    case 11: d += static_cast<std::uint64_t>(p[10]) << 16; [[fallthrough]];
    case 10: d += static_cast<std::uint64_t>(p[9]) << 8; [[fallthrough]];
    case 9: d += static_cast<std::uint64_t>(p[8]); [[fallthrough]];
    case 8:
      c += load64(p);
      break;
    case 7: c += static_cast<std::uint64_t>(p[6]) << 48; [[fallthrough]];
    case 6: c += static_cast<std::uint64_t>(p[5]) << 40; [[fallthrough]];
    case 5: c += static_cast<std::uint64_t>(p[4]) << 32; [[fallthrough]];
    case 4:
      c += load32(p);
      break;
    case 3: c += static_cast<std::uint64_t>(p[2]) << 16; [[fallthrough]];
    case 2: c += static_cast<std::uint64_t>(p[1]) << 8; [[fallthrough]];
    case 1:
      c += static_cast<std::uint64_t>(p[0]);
      break;
    case 0:
      c += kConst;
      d += kConst;
      break;
  }
  short_end(a, b, c, d);
  return {a, b};
}

}  // namespace

Hash128 spooky128(std::span<const std::uint8_t> data, std::uint64_t seed1, std::uint64_t seed2) {
  const std::size_t length = data.size();
  if (length < kBufSize) return short_hash(data.data(), length, seed1, seed2);

  State h;
  h[0] = h[3] = h[6] = h[9] = seed1;
  h[1] = h[4] = h[7] = h[10] = seed2;
  h[2] = h[5] = h[8] = h[11] = kConst;

  std::array<std::uint64_t, kNumVars> block;
  const std::uint8_t* p = data.data();
  const std::size_t whole = (length / kBlockSize) * kBlockSize;
  for (std::size_t off = 0; off < whole; off += kBlockSize) {
    std::memcpy(block.data(), p + off, kBlockSize);
    mix(block.data(), h);
  }

  const std::size_t remainder = length - whole;
  std::array<std::uint8_t, kBlockSize> tail{};
  std::memcpy(tail.data(), p + whole, remainder);
  tail[kBlockSize - 1] = static_cast<std::uint8_t>(remainder);
  std::memcpy(block.data(), tail.data(), kBlockSize);
  end_block(block.data(), h);
  return {h[0], h[1]};
}

Hash128 spooky128(std::string_view data, std::uint64_t seed1, std::uint64_t seed2) {
  return spooky128(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()),
                   seed1, seed2);
}

std::string Hash128::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(hi >> (4 * i)) & 0xf];
    out[31 - i] = kDigits[(lo >> (4 * i)) & 0xf];
  }
  return out;
}

bool ArtifactId::is_valid(std::string_view text) {
  if (text.size() != kArtifactIdPrefix.size() + 32) return false;
  if (!text.starts_with(kArtifactIdPrefix)) return false;
  for (char c : text.substr(kArtifactIdPrefix.size())) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

ArtifactId ArtifactId::parse(std::string_view text) {
  if (!is_valid(text)) throw std::invalid_argument("malformed artifact id: " + std::string(text));
  return ArtifactId(std::string(text));
}

ArtifactId ArtifactId::from_hash(const Hash128& h) {
  return ArtifactId(std::string(kArtifactIdPrefix) + h.hex());
}

ArtifactId artifact_id(std::string_view canonical) {
  return ArtifactId::from_hash(spooky128(canonical, 0, 0));
}

}  // namespace trackr
