#pragma once

#include <cmath>

namespace swarmfence {

// 2D point/vector in metres. Components must stay finite; simulation code
// asserts this at the boundaries where state is created or mutated.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }

    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace swarmfence
