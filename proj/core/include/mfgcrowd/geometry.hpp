#pragma once

#include <cmath>

namespace mfgcrowd {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
    Vec2 lo;
    Vec2 hi;

    constexpr bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    constexpr double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
    constexpr bool operator==(const Rect&) const = default;
};

/// Cell coordinates (i along x1, j along x2).
struct Cell {
    int i = 0;
    int j = 0;
    constexpr bool operator==(const Cell&) const = default;
};

}  // namespace mfgcrowd
