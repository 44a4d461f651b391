#pragma once

#include <cmath>

namespace cdrb {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Axis-aligned rectangle, treated as a closed set: boundary points are
/// members.
struct RectObstacle {
    Vec2 min;
    Vec2 max;

    bool valid() const { return min.x < max.x && min.y < max.y; }

    bool contains(const Vec2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }

    Vec2 extent() const { return max - min; }
    Vec2 center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
    double area() const { return (max.x - min.x) * (max.y - min.y); }
};

/// True iff the closed segment ab intersects the closed rectangle r.
/// Exact slab clipping; grazing an edge or corner counts as a hit.
bool segment_intersects_rect(const Vec2& a, const Vec2& b, const RectObstacle& r);

/// Earliest parameter t in [0,1] at which the segment a + t*(b-a) enters the
/// closed rectangle, together with the axis (0=x, 1=y) of the face crossed.
/// Returns false when the segment misses the rectangle. Assumes a is outside.
struct RectHit {
    double t = 0.0;
    int axis = 0;
};
bool segment_rect_entry(const Vec2& a, const Vec2& b, const RectObstacle& r,
                        RectHit& hit);

/// Earliest parameter t in [0,1] at which the segment leaves the closed box
/// (for world-bounds clamping), with the axis of the face crossed. Returns
/// false when the whole segment stays inside. Assumes a is inside.
bool segment_box_exit(const Vec2& a, const Vec2& b, const RectObstacle& box,
                      RectHit& hit);

}  // namespace cdrb
