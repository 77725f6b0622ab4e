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


#include "v2v/raytracer.hpp"

#include "v2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>

namespace v2v
{

const char *to_string(PathKind kind)
{
    switch (kind)
    {
    case PathKind::los:
        return "los";
    case PathKind::specular:
        return "specular";
    case PathKind::diffuse:
        return "diffuse";
    }
    return "?";
}

double wavelength(double frequency)
{
    if (!(frequency > 0.0))
        throw std::invalid_argument("frequency must be > 0");
    return speed_of_light / frequency;
}

std::optional<PropagationPath> trace_los(const Scene &scene, const Vec3 &tx, const Vec3 &rx, double frequency)
{
    const double d = (rx - tx).norm();
    if (!(d > 0.0))
        throw std::invalid_argument("trace_los: tx and rx coincide");
    const double lambda = wavelength(frequency);
    if (occlusion_test(scene, tx, rx))
        return std::nullopt;
    PropagationPath p;
    p.kind = PathKind::los;
    p.length = d;
    p.delay = d / speed_of_light;
    p.amplitude = Eigen::Matrix2cd::Identity() * (lambda / (4.0 * pi * d));
    p.departure = (rx - tx) / d;
    p.arrival = p.departure;
    return p;
}

// ---------------------------------------------------------------------------
// specular

namespace
{

struct ImageSearch
{
    const Scene &scene;
    Vec3 tx, rx;
    int max_order;
    double frequency;
    double lambda;

    std::vector<std::size_t> seq;
    std::vector<Vec3> images; // images[0] = tx
    std::vector<PropagationPath> out;

    void descend()
    {
        const auto &surfaces = scene.surfaces();
        for (std::size_t s = 0; s < surfaces.size(); ++s)
        {
            if (!seq.empty() && seq.back() == s)
                continue;
            const Surface &S = surfaces[s];
            if (std::abs(S.signed_distance(images.back())) < intersection_tolerance)
                continue; // source on the plane, no image
            seq.push_back(s);
            images.push_back(mirror_point(images.back(), S.normal(), S.offset()));
            try_sequence();
            if (int(seq.size()) < max_order)
                descend();
            seq.pop_back();
            images.pop_back();
        }
    }

    void try_sequence()
    {
        const std::size_t K = seq.size();
        std::vector<Vec3> pts(K);
        Vec3 target = rx;
        for (std::size_t j = K; j-- > 0;)
        {
            const Surface &S = scene.surface(seq[j]);
            const Vec3 &image = images[j + 1];
            const double da = S.signed_distance(image);
            const double db = S.signed_distance(target);
            if (std::abs(db) < intersection_tolerance || (da > 0.0) == (db > 0.0))
                return;
            const Vec3 p = image + (da / (da - db)) * (target - image);
            if (!S.strictly_contains(p))
                return;
            pts[j] = p;
            target = p;
        }

        // every leg must be clear of everything but its own end surfaces
        for (std::size_t j = 0; j <= K; ++j)
        {
            const Vec3 &a = j == 0 ? tx : pts[j - 1];
            const Vec3 &b = j == K ? rx : pts[j];
            std::size_t ignore[2];
            std::size_t n = 0;
            if (j > 0)
                ignore[n++] = seq[j - 1];
            if (j < K)
                ignore[n++] = seq[j];
            if ((b - a).norm() < intersection_tolerance)
                return;
            if (occlusion_test(scene, a, b, std::span<const std::size_t>(ignore, n)))
                return;
        }

        PropagationPath p;
        p.kind = PathKind::specular;
        p.order = int(K);
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
        double length = 0.0;
        Vec3 prev = tx;
        for (std::size_t j = 0; j < K; ++j)
        {
            const Surface &S = scene.surface(seq[j]);
            const Vec3 leg = pts[j] - prev;
            length += leg.norm();
            const Vec3 k = leg.normalized();
            const double c = std::min(1.0, std::abs(k.dot(S.normal())));
            const auto gamma = fresnel_coefficients(scene.material_of(seq[j]), std::acos(c), frequency);
            m = reflection_matrix(k, S.normal(), gamma) * m;
            p.interactions.push_back({seq[j], pts[j], -1});
            prev = pts[j];
        }
        length += (rx - prev).norm();
        p.length = length;
        p.delay = length / speed_of_light;
        p.amplitude = m * (lambda / (4.0 * pi * length));
        p.departure = (pts.front() - tx).normalized();
        p.arrival = (rx - pts.back()).normalized();
        out.push_back(std::move(p));
    }
};

bool sequence_less(const PropagationPath &a, const PropagationPath &b)
{
    return std::lexicographical_compare(
        a.interactions.begin(), a.interactions.end(), b.interactions.begin(), b.interactions.end(),
        [](const Interaction &x, const Interaction &y) { return std::tie(x.surface, x.tile) < std::tie(y.surface, y.tile); });
}

} // namespace

std::vector<PropagationPath> image_method_specular(const Scene &scene, const Vec3 &tx, const Vec3 &rx, int max_order,
                                                   double frequency)
{
    if (max_order < 1)
        throw std::invalid_argument("image_method_specular: max_order must be >= 1");
    if (max_order > max_specular_order)
        throw ComplexityError("image_method_specular: max_order " + std::to_string(max_order) +
                              " exceeds the cap of " + std::to_string(max_specular_order));
    if (!((rx - tx).norm() > 0.0))
        throw std::invalid_argument("image_method_specular: tx and rx coincide");

    ImageSearch search{scene, tx, rx, max_order, frequency, wavelength(frequency), {}, {tx}, {}};
    search.descend();
    std::sort(search.out.begin(), search.out.end(), [](const PropagationPath &a, const PropagationPath &b) {
        if (a.order != b.order)
            return a.order < b.order;
        if (a.length != b.length)
            return a.length < b.length;
        return sequence_less(a, b);
    });
    return std::move(search.out);
}

// ---------------------------------------------------------------------------
// diffuse

DiffuseTiling::DiffuseTiling(const Scene &scene, double tile_size) : tile_size_(tile_size)
{
    if (!(tile_size > 0.0) || !std::isfinite(tile_size))
        throw std::invalid_argument("tile_size must be > 0");
    for (std::size_t s = 0; s < scene.surfaces().size(); ++s)
    {
        if (scene.material_of(s).scattering_coefficient <= 0.0)
            continue;
        const Surface &S = scene.surface(s);
        const auto &poly = S.polygon2d();
        Vec2 lo = poly.front(), hi = poly.front();
        for (const auto &q : poly)
        {
            lo = lo.cwiseMin(q);
            hi = hi.cwiseMax(q);
        }
        const long nu = std::max(1L, long(std::ceil((hi.x() - lo.x()) / tile_size - 1e-9)));
        const long nv = std::max(1L, long(std::ceil((hi.y() - lo.y()) / tile_size - 1e-9)));
        long index = 0;
        for (long iv = 0; iv < nv; ++iv)
            for (long iu = 0; iu < nu; ++iu)
            {
                const Vec2 c_lo(lo.x() + iu * tile_size, lo.y() + iv * tile_size);
                const Vec2 c_hi(std::min(hi.x(), c_lo.x() + tile_size), std::min(hi.y(), c_lo.y() + tile_size));
                auto cell = clip_to_rect(poly, c_lo, c_hi);
                if (cell.size() < 3)
                    continue;
                const double area = std::abs(signed_area(cell));
                if (area < 1e-12)
                    continue;
                tiles_.push_back({s, index++, S.to_world(polygon_centroid(cell)), area});
            }
    }
}

namespace
{

struct DiffuseCandidate
{
    double power;
    std::size_t tile;
    double r1, r2, amp;
};

std::vector<PropagationPath> diffuse_impl(const Scene &scene, const DiffuseTiling &tiling, const Vec3 &tx,
                                          const Vec3 &rx, double frequency, double min_power, double strongest,
                                          double cull_ratio)
{
    if (!((rx - tx).norm() > 0.0))
        throw std::invalid_argument("lambertian_diffuse: tx and rx coincide");
    const double lambda = wavelength(frequency);
    const double k = lambda / (4.0 * pi);

    std::vector<DiffuseCandidate> cand;
    const auto &tiles = tiling.tiles();
    for (std::size_t i = 0; i < tiles.size(); ++i)
    {
        const DiffuseTile &t = tiles[i];
        const Surface &S = scene.surface(t.surface);
        const double d1 = S.signed_distance(tx);
        const double d2 = S.signed_distance(rx);
        if (d1 <= intersection_tolerance || d2 <= intersection_tolerance)
            continue; // both ends must be in front of the surface
        const double r1 = (t.center - tx).norm();
        const double r2 = (t.center - rx).norm();
        const double cos_i = d1 / r1;
        const double cos_s = d2 / r2;
        const double S_coef = scene.material_of(t.surface).scattering_coefficient;
        double amp = S_coef * std::sqrt(cos_i * cos_s / pi) * std::sqrt(t.area) / (r1 * r2) * k;
        amp = std::min(amp, k / (r1 + r2));
        const double power = amp * amp;
        if (power <= 0.0 || power < min_power)
            continue;
        cand.push_back({power, i, r1, r2, amp});
    }
    std::sort(cand.begin(), cand.end(), [](const DiffuseCandidate &a, const DiffuseCandidate &b) {
        return a.power != b.power ? a.power > b.power : a.tile < b.tile;
    });

    std::vector<PropagationPath> out;
    for (const auto &c : cand)
    {
        if (c.power < strongest * cull_ratio)
            break;
        const DiffuseTile &t = tiles[c.tile];
        const std::size_t ignore[1] = {t.surface};
        if (occlusion_test(scene, tx, t.center, ignore) || occlusion_test(scene, t.center, rx, ignore))
            continue;
        PropagationPath p;
        p.kind = PathKind::diffuse;
        p.order = 1;
        p.interactions.push_back({t.surface, t.center, t.index});
        p.length = c.r1 + c.r2;
        p.delay = p.length / speed_of_light;
        p.amplitude = Eigen::Matrix2cd::Identity() * c.amp;
        p.departure = (t.center - tx) / c.r1;
        p.arrival = (rx - t.center) / c.r2;
        strongest = std::max(strongest, c.power);
        out.push_back(std::move(p));
    }
    if (cull_ratio > 0.0)
        std::erase_if(out, [&](const PropagationPath &p) { return p.power_gain() < strongest * cull_ratio; });
    std::sort(out.begin(), out.end(), [](const PropagationPath &a, const PropagationPath &b) {
        return a.length != b.length ? a.length < b.length : sequence_less(a, b);
    });
    return out;
}

double cull_ratio_of(double cull_db)
{
    if (std::isinf(cull_db))
        return 0.0;
    return std::pow(10.0, -cull_db / 10.0);
}

} // namespace

std::vector<PropagationPath> lambertian_diffuse(const Scene &scene, const DiffuseTiling &tiling, const Vec3 &tx,
                                                const Vec3 &rx, double frequency, double min_power)
{
    return diffuse_impl(scene, tiling, tx, rx, frequency, min_power, 0.0, 0.0);
}

std::vector<PropagationPath> lambertian_diffuse(const Scene &scene, const Vec3 &tx, const Vec3 &rx, double tile_size,
                                                double frequency)
{
    return lambertian_diffuse(scene, DiffuseTiling(scene, tile_size), tx, rx, frequency);
}

// ---------------------------------------------------------------------------

Tracer::Tracer(const Scene &scene, TracerConfig config) : scene_(&scene), config_(config)
{
    wavelength(config_.frequency);
    if (config_.max_order < 1)
        throw std::invalid_argument("max_order must be >= 1");
    if (config_.max_order > max_specular_order)
        throw ComplexityError("max_order " + std::to_string(config_.max_order) + " exceeds the cap of " +
                              std::to_string(max_specular_order));
    if (!(config_.cull_db >= 0.0))
        throw std::invalid_argument("cull_db must be >= 0");
    if (config_.enable_diffuse)
        tiling_ = DiffuseTiling(scene, config_.tile_size);
    else if (!(config_.tile_size > 0.0))
        throw std::invalid_argument("tile_size must be > 0");
}

std::vector<PropagationPath> Tracer::trace(const Vec3 &tx, const Vec3 &rx) const
{
    std::vector<PropagationPath> out;
    if (auto los = trace_los(*scene_, tx, rx, config_.frequency))
        out.push_back(std::move(*los));
    auto spec = image_method_specular(*scene_, tx, rx, config_.max_order, config_.frequency);
    std::move(spec.begin(), spec.end(), std::back_inserter(out));
    if (config_.enable_diffuse)
    {
        double strongest = 0.0;
        for (const auto &p : out)
            strongest = std::max(strongest, p.power_gain());
        auto diff = diffuse_impl(*scene_, tiling_, tx, rx, config_.frequency, 0.0, strongest,
                                 cull_ratio_of(config_.cull_db));
        std::move(diff.begin(), diff.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<PropagationPath> trace_snapshot(const Scene &scene, const Vec3 &tx, const Vec3 &rx,
                                            const TracerConfig &config)
{
    return Tracer(scene, config).trace(tx, rx);
}

// ---------------------------------------------------------------------------

void write_path_dump_header(std::ostream &out, int max_interactions)
{
    out << "snapshot_t,kind,order,length_m,delay_s,gain_db,n_interactions";
    for (int i = 1; i <= max_interactions; ++i)
        out << ",p" << i << "_x,p" << i << "_y,p" << i << "_z";
    out << '\n';
}

void write_path_dump(std::ostream &out, double t, const std::vector<PropagationPath> &paths)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    for (const auto &p : paths)
    {
        out << num(t) << ',' << to_string(p.kind) << ',' << p.order << ',';
        out << num(p.length) << ',';
        out << num(p.delay) << ',';
        out << num(10.0 * std::log10(p.power_gain())) << ',' << p.interactions.size();
        for (const auto &ia : p.interactions)
        {
            out << ',' << num(ia.point.x());
            out << ',' << num(ia.point.y());
            out << ',' << num(ia.point.z());
        }
        out << '\n';
    }
}

} // namespace v2v
