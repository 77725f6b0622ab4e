// SPDX-License-Identifier: Apache-2.0
//
// v2vray - ray-optical vehicle-to-vehicle channel simulation and analysis
// Copyright (C) 2026 The v2vray authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace v2v
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double pi = 3.14159265358979323846;

inline constexpr double planarity_tolerance = 1e-6;     // m
inline constexpr double intersection_tolerance = 1e-9;  // m

struct Aabb
{
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    static Aabb infinite();

    bool empty() const { return (lo.array() > hi.array()).any(); }
    void expand(const Vec3 &p);
    void expand(const Aabb &b);
    Aabb padded(double margin) const;
    bool contains(const Vec3 &p, double tol = 0.0) const;
    bool contains(const Aabb &b, double tol = 0.0) const;

    // Slab test for the closed segment a->b.
    bool intersects_segment(const Vec3 &a, const Vec3 &b) const;

    bool operator==(const Aabb &) const = default;
};

// Signed area of a 2D polygon (positive for counter-clockwise).
double signed_area(std::span<const Vec2> poly);

// Even-odd crossing test. Points exactly on an edge may go either way.
bool point_in_polygon(std::span<const Vec2> poly, const Vec2 &p);

// Smallest distance from p to any polygon edge.
double distance_to_boundary(std::span<const Vec2> poly, const Vec2 &p);

// True if the closed segments [a,b] and [c,d] share at least one point.
bool segments_intersect(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d);

// True if any two non-adjacent edges of the closed polygon touch.
bool is_self_intersecting(std::span<const Vec2> poly);

// Sutherland-Hodgman clip of `poly` against the axis-aligned rectangle [lo,hi].
std::vector<Vec2> clip_to_rect(std::span<const Vec2> poly, const Vec2 &lo, const Vec2 &hi);

// Area-weighted centroid of a simple polygon; falls back to the vertex mean for zero area.
Vec2 polygon_centroid(std::span<const Vec2> poly);

// Reflect p across the plane n.x = d (n unit length).
inline Vec3 mirror_point(const Vec3 &p, const Vec3 &n, double d)
{
    return p - 2.0 * (n.dot(p) - d) * n;
}

} // namespace v2v
