#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmcov/errors.hpp"

namespace swarmcov {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& z) const {
        return z.x >= x0 && z.x <= x1 && z.y >= y0 && z.y <= y1;
    }
};

// Axis-aligned rectangular workspace [0,w] x [0,h], lengths in inches.
struct Domain {
    double width = 0.0;
    double height = 0.0;

    Domain() = default;
    Domain(double w, double h) : width(w), height(h) {
        if (!(w > 0.0) || !(h > 0.0))
            throw parameter_error("Domain: width and height must be positive");
    }

    double area() const { return width * height; }
    Vec2 center() const { return {width / 2.0, height / 2.0}; }
    Rect rect() const { return {0.0, 0.0, width, height}; }

    bool contains(const Vec2& z) const {
        return z.x >= 0.0 && z.x <= width && z.y >= 0.0 && z.y <= height;
    }
    Vec2 clamp(const Vec2& z) const {
        return {std::clamp(z.x, 0.0, width), std::clamp(z.y, 0.0, height)};
    }
    bool operator==(const Domain& o) const {
        return width == o.width && height == o.height;
    }
};

} // namespace swarmcov
