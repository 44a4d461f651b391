#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "cdrb/errors.hpp"

namespace cdrb {

enum class ScheduleKind { linear, log };

/// Ball-radius schedule for the degradation operator: eps_0 = 0 and
/// eps_t = d_max exactly, nondecreasing in k.
///   linear: eps_k = (k/t) * d_max
///   log:    eps_k = d_max * ln(1+k) / ln(1+t)
struct DistanceSchedule {
    ScheduleKind kind = ScheduleKind::linear;
    double d_max = 1.0;
    int t = 50;

    double epsilon(int k) const {
        if (d_max <= 0.0) throw ConfigError("DistanceSchedule: d_max must be positive");
        if (t < 1) throw ConfigError("DistanceSchedule: t must be at least 1");
        if (k < 0 || k > t)
            throw ConfigError("DistanceSchedule: step " + std::to_string(k) +
                              " outside [0, " + std::to_string(t) + "]");
        if (kind == ScheduleKind::linear)
            return (static_cast<double>(k) / static_cast<double>(t)) * d_max;
        return d_max * (std::log1p(static_cast<double>(k)) /
                        std::log1p(static_cast<double>(t)));
    }
};

ScheduleKind schedule_kind_from_string(std::string_view s);
std::string to_string(ScheduleKind kind);

}  // namespace cdrb
