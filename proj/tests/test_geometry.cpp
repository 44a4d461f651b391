#include <doctest.h>

#include <vector>

#include "cdrb/geometry.hpp"
#include "cdrb/rng.hpp"

using namespace cdrb;

namespace {

// Dense point-sampling stand-in for the exact segment/rectangle test.
// Sampling can only under-detect (a thin graze can slip between samples),
// so a sampled hit must always imply an exact hit.
bool sampled_hit(const Vec2& a, const Vec2& b, const RectObstacle& r, int samples) {
    for (int i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        if (r.contains(a + t * (b - a))) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("segment/rect agrees with a dense sampling oracle") {
    Rng rng(101);
    int exact_hits = 0, sampled_hits = 0;
    for (int c = 0; c < 2000; ++c) {
        const Vec2 lo{rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0)};
        const RectObstacle r{lo, lo + Vec2{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)}};
        const Vec2 a{rng.uniform(-1.0, 11.0), rng.uniform(-1.0, 11.0)};
        const Vec2 b{rng.uniform(-1.0, 11.0), rng.uniform(-1.0, 11.0)};
        const bool exact = segment_intersects_rect(a, b, r);
        const bool sampled = sampled_hit(a, b, r, 10000);
        if (sampled) {
            REQUIRE(exact);  // oracle hit missed by the exact test
            ++sampled_hits;
        }
        if (exact) ++exact_hits;
    }
    // The two must agree on all but thin grazes; random segments make those
    // vanishingly rare, so the counts should match almost everywhere.
    CHECK(exact_hits >= sampled_hits);
    CHECK(exact_hits - sampled_hits <= 20);
    CHECK(sampled_hits > 150);  // the case mix was not degenerate
}

TEST_CASE("segment clipping a corner by 1e-3 units is detected") {
    const RectObstacle r{{4.0, 4.0}, {6.0, 6.0}};
    // The line y = x + 2 - e clips the (4, 6) corner: it enters through the
    // x = 4 edge at y = 6 - e and leaves through the y = 6 edge at x = 4 + e.
    const double e = 1e-3;
    CHECK(segment_intersects_rect({3.0, 5.0 - e}, {5.0, 7.0 - e}, r));
    // Nudged to the far side of the corner (y = x + 2 + e) it must miss.
    CHECK_FALSE(segment_intersects_rect({3.0, 5.0 + e}, {5.0, 7.0 + e}, r));
}

TEST_CASE("segment/rect closed-set boundary semantics") {
    const RectObstacle r{{1.0, 1.0}, {2.0, 2.0}};
    // Sliding along an edge counts as intersection.
    CHECK(segment_intersects_rect({0.0, 1.0}, {3.0, 1.0}, r));
    // Touching a single corner counts.
    CHECK(segment_intersects_rect({0.0, 0.0}, {1.0, 1.0}, r));
    // Fully inside counts.
    CHECK(segment_intersects_rect({1.2, 1.2}, {1.8, 1.8}, r));
    // Degenerate segment on the boundary counts.
    CHECK(segment_intersects_rect({2.0, 1.5}, {2.0, 1.5}, r));
    // Near miss does not.
    CHECK_FALSE(segment_intersects_rect({0.0, 0.999}, {3.0, 0.999}, r));
}

TEST_CASE("segment_rect_entry reports first contact point and axis") {
    const RectObstacle r{{2.0, 2.0}, {4.0, 4.0}};
    RectHit hit;

    // Horizontal approach hits the x = 2 face at t = 0.25.
    REQUIRE(segment_rect_entry({0.0, 3.0}, {8.0, 3.0}, r, hit));
    CHECK(hit.t == doctest::Approx(0.25));
    CHECK(hit.axis == 0);

    // Vertical approach hits the y = 4 face.
    REQUIRE(segment_rect_entry({3.0, 6.0}, {3.0, 2.5}, r, hit));
    CHECK(hit.t == doctest::Approx(2.0 / 3.5));
    CHECK(hit.axis == 1);

    // Miss.
    CHECK_FALSE(segment_rect_entry({0.0, 0.0}, {1.0, 5.0}, r, hit));
}

TEST_CASE("segment_box_exit reports where motion leaves the bounds") {
    const RectObstacle box{{0.0, 0.0}, {10.0, 10.0}};
    RectHit hit;

    REQUIRE(segment_box_exit({9.0, 5.0}, {11.0, 5.0}, box, hit));
    CHECK(hit.t == doctest::Approx(0.5));
    CHECK(hit.axis == 0);

    REQUIRE(segment_box_exit({5.0, 1.0}, {5.0, -3.0}, box, hit));
    CHECK(hit.t == doctest::Approx(0.25));
    CHECK(hit.axis == 1);

    // Whole segment inside: no exit.
    CHECK_FALSE(segment_box_exit({1.0, 1.0}, {9.0, 9.0}, box, hit));
}

TEST_CASE("Vec2 and RectObstacle basics") {
    const Vec2 v{3.0, 4.0};
    CHECK(v.norm() == doctest::Approx(5.0));
    CHECK(v.norm2() == doctest::Approx(25.0));
    CHECK(v.dot({1.0, 1.0}) == doctest::Approx(7.0));

    const RectObstacle r{{1.0, 2.0}, {3.0, 6.0}};
    CHECK(r.valid());
    CHECK(r.center() == Vec2{2.0, 4.0});
    CHECK(r.area() == doctest::Approx(8.0));
    CHECK(r.contains({1.0, 2.0}));  // boundary is inside
    CHECK_FALSE(r.contains({0.999, 2.0}));
    CHECK_FALSE(RectObstacle{{1.0, 1.0}, {1.0, 2.0}}.valid());
}
