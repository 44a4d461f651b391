#include "cdrb/geometry.hpp"

#include <algorithm>

namespace cdrb {

bool segment_intersects_rect(const Vec2& a, const Vec2& b, const RectObstacle& r) {
    const double d[2] = {b.x - a.x, b.y - a.y};
    const double p[2] = {a.x, a.y};
    const double lo[2] = {r.min.x, r.min.y};
    const double hi[2] = {r.max.x, r.max.y};

    double tmin = 0.0;
    double tmax = 1.0;
    for (int ax = 0; ax < 2; ++ax) {
        if (d[ax] == 0.0) {
            if (p[ax] < lo[ax] || p[ax] > hi[ax]) return false;
            continue;
        }
        double t1 = (lo[ax] - p[ax]) / d[ax];
        double t2 = (hi[ax] - p[ax]) / d[ax];
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return false;
    }
    return true;
}

bool segment_rect_entry(const Vec2& a, const Vec2& b, const RectObstacle& r,
                        RectHit& hit) {
    const double d[2] = {b.x - a.x, b.y - a.y};
    const double p[2] = {a.x, a.y};
    const double lo[2] = {r.min.x, r.min.y};
    const double hi[2] = {r.max.x, r.max.y};

    double tmin = 0.0;
    double tmax = 1.0;
    int enter_axis = -1;
    for (int ax = 0; ax < 2; ++ax) {
        if (d[ax] == 0.0) {
            if (p[ax] < lo[ax] || p[ax] > hi[ax]) return false;
            continue;
        }
        double t1 = (lo[ax] - p[ax]) / d[ax];
        double t2 = (hi[ax] - p[ax]) / d[ax];
        if (t1 > t2) std::swap(t1, t2);
        if (t1 > tmin) {
            tmin = t1;
            enter_axis = ax;
        }
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return false;
    }
    // enter_axis == -1 means the segment starts on/inside the rectangle; the
    // callers guarantee a feasible start, so treat it as an immediate hit on
    // both axes and let the caller zero everything.
    hit.t = tmin;
    hit.axis = enter_axis < 0 ? -1 : enter_axis;
    return true;
}

bool segment_box_exit(const Vec2& a, const Vec2& b, const RectObstacle& box,
                      RectHit& hit) {
    const double d[2] = {b.x - a.x, b.y - a.y};
    const double p[2] = {a.x, a.y};
    const double lo[2] = {box.min.x, box.min.y};
    const double hi[2] = {box.max.x, box.max.y};

    double tmax = 2.0;  // beyond the segment
    int exit_axis = -1;
    for (int ax = 0; ax < 2; ++ax) {
        if (d[ax] == 0.0) continue;
        const double t = d[ax] > 0.0 ? (hi[ax] - p[ax]) / d[ax]
                                     : (lo[ax] - p[ax]) / d[ax];
        if (t < tmax) {
            tmax = t;
            exit_axis = ax;
        }
    }
    if (exit_axis < 0 || tmax > 1.0) return false;
    hit.t = std::max(0.0, tmax);
    hit.axis = exit_axis;
    return true;
}

}  // namespace cdrb
