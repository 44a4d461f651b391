#include "cdrb/schedule.hpp"

#include <cmath>

namespace cdrb {

ScheduleKind schedule_kind_from_string(std::string_view s) {
    if (s == "linear") return ScheduleKind::linear;
    if (s == "log") return ScheduleKind::log;
    throw ConfigError("unknown schedule kind '" + std::string(s) + "' (linear|log)");
}

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear ? "linear" : "log";
}

}  // namespace cdrb
