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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace trackr {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp to_timestamp(std::chrono::system_clock::time_point tp);

/// `YYYY-MM-DDTHH:MM:SS.mmmZ`, always UTC with millisecond precision, so
/// lexicographic order equals chronological order.
std::string format_rfc3339(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fraction](Z|±HH:MM)`.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// RFC 822 date as used by RSS, e.g. `Wed, 14 Oct 2026 09:30:00 GMT`.
std::string format_rfc822(Timestamp t);

}  // namespace trackr
