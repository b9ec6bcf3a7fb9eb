#pragma once

#include <cmath>
#include <numbers>

namespace antnav {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 &operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2 &operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2 &) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }
};

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Wraps into (-pi, pi].
inline double wrap_angle(double a)
{
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi)
        w += 2.0 * kPi;
    return w;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Headings are counter-clockwise from +x. The robot's left is heading + pi/2.
enum class Side { left, right };

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }
inline const char *to_string(Side s) { return s == Side::left ? "left" : "right"; }

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // (-pi, pi]

    Vec2 position() const { return {x, y}; }
    bool operator==(const Pose &) const = default;
};

}  // namespace antnav
