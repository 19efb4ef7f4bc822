#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace portflow {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
};

inline double norm(const Point& p) { return std::hypot(p.x, p.y); }

enum class Axis { X = 0, Y = 1 };

inline double coord(const Point& p, Axis a) { return a == Axis::X ? p.x : p.y; }
inline double& coord(Point& p, Axis a) { return a == Axis::X ? p.x : p.y; }

/// Axis-aligned rectangle stored by centre and full extents.
struct Rect {
    Point centre;
    double width = 0.0;
    double height = 0.0;

    double min_x() const { return centre.x - width / 2; }
    double max_x() const { return centre.x + width / 2; }
    double min_y() const { return centre.y - height / 2; }
    double max_y() const { return centre.y + height / 2; }
    double half(Axis a) const { return a == Axis::X ? width / 2 : height / 2; }
    double lo(Axis a) const { return coord(centre, a) - half(a); }
    double hi(Axis a) const { return coord(centre, a) + half(a); }

    Rect inflated(double by) const { return {centre, width + 2 * by, height + 2 * by}; }

    static Rect from_bounds(double x0, double y0, double x1, double y1)
    {
        return {{(x0 + x1) / 2, (y0 + y1) / 2}, x1 - x0, y1 - y0};
    }

    bool contains(const Point& p, double tol = 0.0) const
    {
        return p.x >= min_x() - tol && p.x <= max_x() + tol && p.y >= min_y() - tol &&
               p.y <= max_y() + tol;
    }
    bool strictly_contains(const Point& p, double tol = 0.0) const
    {
        return p.x > min_x() + tol && p.x < max_x() - tol && p.y > min_y() + tol &&
               p.y < max_y() - tol;
    }
    bool on_boundary(const Point& p, double tol) const
    {
        if (!contains(p, tol)) return false;
        return std::abs(p.x - min_x()) <= tol || std::abs(p.x - max_x()) <= tol ||
               std::abs(p.y - min_y()) <= tol || std::abs(p.y - max_y()) <= tol;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// True when the open interiors intersect, treating a margin as extra required clearance.
inline bool rects_overlap(const Rect& a, const Rect& b, double margin = 0.0)
{
    return std::abs(a.centre.x - b.centre.x) < (a.width + b.width) / 2 + margin &&
           std::abs(a.centre.y - b.centre.y) < (a.height + b.height) / 2 + margin;
}

/// Distance from the centre of r to its boundary along direction d (d need not be unit).
/// Returned in units of |d|, i.e. the boundary is hit at centre + t*d.
inline double boundary_ray_param(const Rect& r, const Point& d)
{
    double t = INFINITY;
    if (d.x != 0.0) t = std::min(t, (r.width / 2) / std::abs(d.x));
    if (d.y != 0.0) t = std::min(t, (r.height / 2) / std::abs(d.y));
    return t;
}

inline constexpr double kCoincidentDistance = 1e-3;

/// Euclidean distance between the boundaries of two rectangles measured along the
/// segment joining their centres; 0 when they overlap along it.
inline double boundary_distance(const Rect& u, const Rect& v)
{
    Point d = v.centre - u.centre;
    double len = norm(d);
    if (len == 0.0) return kCoincidentDistance;
    double inside = (boundary_ray_param(u, d) + boundary_ray_param(v, d)) * len;
    return std::max(0.0, len - inside);
}

using Polyline = std::vector<Point>;

inline double polyline_length(const Polyline& pts)
{
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += norm(pts[i] - pts[i - 1]);
    return s;
}

}  // namespace portflow
