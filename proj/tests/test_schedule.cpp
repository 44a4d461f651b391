#include <doctest.h>

#include <cmath>

#include "cdrb/errors.hpp"
#include "cdrb/schedule.hpp"

using namespace cdrb;

TEST_CASE("linear schedule endpoints and spacing") {
    const DistanceSchedule s{ScheduleKind::linear, 2.0, 50};
    CHECK(s.epsilon(0) == 0.0);
    CHECK(s.epsilon(50) == 2.0);
    CHECK(s.epsilon(25) == doctest::Approx(1.0));
    // Uniform increments.
    const double step = s.epsilon(1) - s.epsilon(0);
    for (int k = 1; k <= 50; ++k)
        CHECK(s.epsilon(k) - s.epsilon(k - 1) == doctest::Approx(step));
}

TEST_CASE("log schedule endpoints, monotonicity, concavity") {
    const DistanceSchedule s{ScheduleKind::log, 3.0, 40};
    CHECK(s.epsilon(0) == 0.0);
    CHECK(s.epsilon(40) == 3.0);
    for (int k = 1; k <= 40; ++k) CHECK(s.epsilon(k) > s.epsilon(k - 1));
    // Log grows fastest early: first increment beats the last one.
    CHECK(s.epsilon(1) - s.epsilon(0) > s.epsilon(40) - s.epsilon(39));
    // Closed form at one interior point.
    CHECK(s.epsilon(7) == doctest::Approx(3.0 * std::log1p(7.0) / std::log1p(40.0)));
}

TEST_CASE("log schedule dominates linear in the interior") {
    const DistanceSchedule lin{ScheduleKind::linear, 1.0, 30};
    const DistanceSchedule lg{ScheduleKind::log, 1.0, 30};
    for (int k = 1; k < 30; ++k) CHECK(lg.epsilon(k) > lin.epsilon(k));
}

TEST_CASE("schedule rejects out-of-range steps and bad parameters") {
    const DistanceSchedule s{ScheduleKind::linear, 1.0, 10};
    CHECK_THROWS_AS(s.epsilon(-1), ConfigError);
    CHECK_THROWS_AS(s.epsilon(11), ConfigError);
    const DistanceSchedule bad{ScheduleKind::linear, 0.0, 10};
    CHECK_THROWS_AS(bad.epsilon(1), ConfigError);
}

TEST_CASE("schedule kind string round-trip") {
    CHECK(schedule_kind_from_string("linear") == ScheduleKind::linear);
    CHECK(schedule_kind_from_string("log") == ScheduleKind::log);
    CHECK(to_string(ScheduleKind::linear) == "linear");
    CHECK(to_string(ScheduleKind::log) == "log");
    CHECK_THROWS_AS(schedule_kind_from_string("cubic"), ConfigError);
}
