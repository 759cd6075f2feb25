#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace classlab {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// ISO-8601 UTC with millisecond precision: 2024-03-05T09:30:00.000Z
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

}  // namespace classlab
