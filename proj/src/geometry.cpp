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

#include "v2v/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace v2v
{

Aabb Aabb::infinite()
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {Vec3::Constant(-inf), Vec3::Constant(inf)};
}

void Aabb::expand(const Vec3 &p)
{
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
}

void Aabb::expand(const Aabb &b)
{
    if (b.empty())
        return;
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
}

Aabb Aabb::padded(double margin) const
{
    if (empty())
        return *this;
    return {lo.array() - margin, hi.array() + margin};
}

bool Aabb::contains(const Vec3 &p, double tol) const
{
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
}

bool Aabb::contains(const Aabb &b, double tol) const
{
    return b.empty() || (contains(b.lo, tol) && contains(b.hi, tol));
}

bool Aabb::intersects_segment(const Vec3 &a, const Vec3 &b) const
{
    double t0 = 0.0, t1 = 1.0;
    const Vec3 d = b - a;
    for (int k = 0; k < 3; ++k)
    {
        if (std::abs(d[k]) < 1e-300)
        {
            if (a[k] < lo[k] || a[k] > hi[k])
                return false;
            continue;
        }
        double inv = 1.0 / d[k];
        double ta = (lo[k] - a[k]) * inv;
        double tb = (hi[k] - a[k]) * inv;
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1)
            return false;
    }
    return true;
}

double signed_area(std::span<const Vec2> poly)
{
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &p = poly[i];
        const Vec2 &q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

bool point_in_polygon(std::span<const Vec2> poly, const Vec2 &p)
{
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y()))
        {
            double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                inside = !inside;
        }
    }
    return inside;
}

double distance_to_boundary(std::span<const Vec2> poly, const Vec2 &p)
{
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[(i + 1) % n];
        const Vec2 ab = b - a;
        double len2 = ab.squaredNorm();
        double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (a + s * ab - p).norm());
    }
    return best;
}

namespace
{
double cross2(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2 &a, const Vec2 &b, const Vec2 &p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

int orientation(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
    double v = cross2(b - a, c - a);
    double scale = (b - a).norm() * (c - a).norm();
    if (std::abs(v) <= 1e-14 * scale)
        return 0;
    return v > 0 ? 1 : -1;
}
} // namespace

bool segments_intersect(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
{
    int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
    int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(a, b, c))
        return true;
    if (o2 == 0 && on_segment(a, b, d))
        return true;
    if (o3 == 0 && on_segment(c, d, a))
        return true;
    if (o4 == 0 && on_segment(c, d, b))
        return true;
    return false;
}

bool is_self_intersecting(std::span<const Vec2> poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &a = poly[i];
        const Vec2 &b = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j)
        {
            // adjacent edges share a vertex by construction
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(a, b, poly[j], poly[(j + 1) % n]))
                return true;
        }
    }
    // repeated vertices make adjacent edges fold back onto each other
    for (std::size_t i = 0; i < n; ++i)
        if ((poly[i] - poly[(i + 1) % n]).norm() == 0.0)
            return true;
    return false;
}

std::vector<Vec2> clip_to_rect(std::span<const Vec2> poly, const Vec2 &lo, const Vec2 &hi)
{
    std::vector<Vec2> out(poly.begin(), poly.end());
    // clip against x >= lo, x <= hi, y >= lo, y <= hi in turn
    for (int edge = 0; edge < 4 && !out.empty(); ++edge)
    {
        const int axis = edge / 2;
        const bool keep_above = (edge % 2) == 0;
        const double bound = keep_above ? lo[axis] : hi[axis];
        auto inside = [&](const Vec2 &p) { return keep_above ? p[axis] >= bound : p[axis] <= bound; };

        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t i = 0; i < in.size(); ++i)
        {
            const Vec2 &cur = in[i];
            const Vec2 &prev = in[(i + in.size() - 1) % in.size()];
            bool ci = inside(cur), pi = inside(prev);
            if (ci != pi)
            {
                double s = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                Vec2 x = prev + s * (cur - prev);
                x[axis] = bound;
                out.push_back(x);
            }
            if (ci)
                out.push_back(cur);
        }
    }
    return out;
}

Vec2 polygon_centroid(std::span<const Vec2> poly)
{
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &p = poly[i];
        const Vec2 &q = poly[(i + 1) % n];
        double w = p.x() * q.y() - q.x() * p.y();
        a += w;
        c += w * (p + q);
    }
    if (std::abs(a) < 1e-300)
    {
        Vec2 m = Vec2::Zero();
        for (const auto &p : poly)
            m += p;
        return n ? Vec2(m / double(n)) : m;
    }
    return c / (3.0 * a);
}

} // namespace v2v
