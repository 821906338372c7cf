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

#include <optional>
#include <string_view>

namespace trackr {

/// Package whose functions are available without `library()`.
inline constexpr std::string_view kBasePackage = "base";

struct BuiltinInfo {
  std::string_view name;
  std::string_view package;
  bool reads_rng = false;   // draws from the session random stream
  bool writes_rng = false;  // replaces or advances the random stream
};

/// Static description of a builtin, or nullopt for unknown functions.
std::optional<BuiltinInfo> builtin_info(std::string_view name);

}  // namespace trackr
