#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace logsob {

// Error kinds used across the library. Domain violations use
// std::domain_error, malformed input std::invalid_argument.
struct unsupported_error : std::logic_error {
    using std::logic_error::logic_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
// 90-degree counterclockwise rotation; maps a unit tangent to the
// leftward unit normal and keeps <t, rot90(t)> = 0 exactly in floating point.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }

// Volume of the Euclidean unit ball, via the Gamma function rather than a
// per-dimension table.
inline double unit_ball_volume(int k) {
    if (k < 0) throw std::domain_error("unit_ball_volume: negative dimension");
    return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

// All emitted numbers carry 12 significant digits so that reruns diff cleanly.
inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// FNV-1a over raw bytes; used to echo a checksum of parsed shapes.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::vector<double>& v, std::uint64_t h = 1469598103934665603ull) {
    return v.empty() ? h : fnv1a(v.data(), v.size() * sizeof(double), h);
}

inline std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace logsob
