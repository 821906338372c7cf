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

#include <filesystem>
#include <string_view>

#include "trackr/value.hpp"

namespace trackr {

/// RFC 4180 subset: a header row is required, fields may be double-quoted
/// with `""` as an escaped quote, LF or CRLF line ends. A column is numeric
/// when every cell parses as a finite decimal number, otherwise it holds
/// strings. Throws EvalError(FileError) on malformed input.
Table parse_csv(std::string_view text);
Table read_csv_file(const std::filesystem::path& path);

}  // namespace trackr
