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


#include "fixtures.hpp"
#include "oracles.hpp"

#include "v2v/errors.hpp"
#include "v2v/raytracer.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

using namespace v2v;
using Catch::Approx;

namespace
{

constexpr double f59 = 5.9e9;

double db(double p) { return 10.0 * std::log10(p); }

// Lengths of the canyon paths from the image lattice y_n = n w + (-1)^n y_tx,
// |n| = order, for walls at y = +-w/2 that are tall and long enough.
std::vector<double> lattice_lengths(const Vec3 &tx, const Vec3 &rx, double w, int max_order)
{
    std::vector<double> out;
    for (int k = 1; k <= max_order; ++k)
        for (int n : {k, -k})
        {
            const double yi = n * w + ((n % 2 == 0) ? tx.y() : -tx.y());
            out.push_back(std::hypot(rx.x() - tx.x(), rx.y() - yi, rx.z() - tx.z()));
        }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("trace_los: examples", "[raytracer]")
{
    const Scene empty = fixture::empty_scene();
    const auto p = trace_los(empty, Vec3::Zero(), Vec3(299.792458, 0, 0), f59);
    REQUIRE(p);
    CHECK(std::abs(p->delay - 1e-6) <= 1e-15 * 1e-6);
    CHECK(p->kind == PathKind::los);
    CHECK(p->interactions.empty());

    const auto q = trace_los(empty, Vec3::Zero(), Vec3(100, 0, 0), f59);
    REQUIRE(q);
    CHECK(db(q->power_gain()) == Approx(oracle::friis_db(f59, 100.0)).margin(0.01));
    CHECK(db(q->power_gain()) == Approx(-87.86).margin(0.01));
    CHECK(std::abs(q->amplitude(0, 1)) == 0.0);
    CHECK(q->amplitude(0, 0) == q->amplitude(1, 1));

    const auto metal = fixture::material_index("metal");
    const Scene wall = fixture::scene_of({fixture::wall_y(0.0, -10, 10, 10, metal, true)});
    CHECK_FALSE(trace_los(wall, Vec3(0, -5, 1), Vec3(0, 5, 1), f59));
    CHECK_THROWS_AS(trace_los(empty, Vec3(1, 2, 3), Vec3(1, 2, 3), f59), std::invalid_argument);
}

TEST_CASE("fresnel_coefficients: examples", "[raytracer]")
{
    const auto mats = default_materials();
    const Material &concrete = mats[fixture::material_index("concrete")];
    const Material &metal = mats[fixture::material_index("metal")];

    for (double th : {0.0, 0.3, 1.0, 1.5})
    {
        const auto g = fresnel_coefficients(metal, th, f59);
        CHECK(g.perpendicular == std::complex<double>(-1.0, 0.0));
        CHECK(g.parallel == std::complex<double>(1.0, 0.0));
    }

    const auto g = fresnel_coefficients(concrete, pi / 4, f59);
    const auto [rs, rp] = oracle::fresnel(5.0, 0.01, pi / 4, f59);
    CHECK(std::abs(g.perpendicular - rs) <= 1e-12 * std::abs(rs));
    CHECK(std::abs(g.parallel - rp) <= 1e-12 * std::abs(rp));

    // grazing: 1 - |G_perp| ~ cos(theta) for this material
    const auto g899 = fresnel_coefficients(concrete, 89.9 * pi / 180.0, f59);
    const auto o899 = oracle::fresnel(5.0, 0.01, 89.9 * pi / 180.0, f59);
    CHECK(std::abs(g899.perpendicular - o899.first) < 1e-12);
    CHECK(1.0 - std::abs(g899.perpendicular) < 2e-3);
    CHECK(1.0 - std::abs(fresnel_coefficients(concrete, 89.95 * pi / 180.0, f59).perpendicular) < 1e-3);

    CHECK_THROWS_AS(fresnel_coefficients(concrete, pi / 2, f59), std::invalid_argument);
    CHECK_THROWS_AS(fresnel_coefficients(concrete, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("fresnel_coefficients: oracle over angles and materials", "[raytracer]")
{
    fixture::Gen g(21);
    for (int i = 0; i < 300; ++i)
    {
        Material m{"m", g.uniform(1.0, 20.0), g.uniform(0.0, 1.0), false, 0.0};
        const double th = g.uniform(0.0, 1.55);
        const double f = g.uniform(1e9, 10e9);
        const auto a = fresnel_coefficients(m, th, f);
        const auto [rs, rp] = oracle::fresnel(m.relative_permittivity, m.conductivity, th, f);
        CHECK(std::abs(a.perpendicular - rs) <= 1e-11);
        CHECK(std::abs(a.parallel - rp) <= 1e-11);
    }
}

TEST_CASE("image_method_specular: single wall mirror geometry", "[raytracer]")
{
    const auto concrete = fixture::material_index("concrete");
    const Scene s = fixture::scene_of({fixture::wall_y(0.0, -10, 20, 5, concrete, true)});
    // wall spans z in [0, 5]; lift the points so the reflection is interior
    const Vec3 tx(0, 1, 2), rx(10, 1, 2);
    const auto paths = image_method_specular(s, tx, rx, 1, f59);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].length == Approx(std::sqrt(104.0)).epsilon(1e-14));
    CHECK((paths[0].interactions[0].point - Vec3(5, 0, 2)).norm() < 1e-12);
    CHECK(paths[0].order == 1);
    CHECK(paths[0].kind == PathKind::specular);
    CHECK(paths[0].delay == paths[0].length / speed_of_light);
}

TEST_CASE("image_method_specular: PEC wall reflects with unit magnitude", "[raytracer]")
{
    const auto metal = fixture::material_index("metal");
    const Scene s = fixture::scene_of({fixture::wall_y(0.0, -10, 20, 5, metal, true)});
    const auto paths = image_method_specular(s, Vec3(0, 1, 2), Vec3(10, 3, 2.5), 1, f59);
    REQUIRE(paths.size() == 1);
    const double fs = wavelength(f59) / (4.0 * pi * paths[0].length);
    const Eigen::Matrix2cd r = paths[0].amplitude / fs;
    CHECK(std::abs(r(0, 0)) == Approx(1.0).epsilon(1e-12));
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(r);
    CHECK(svd.singularValues()(0) == Approx(1.0).epsilon(1e-12));
    CHECK(svd.singularValues()(1) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("image_method_specular: canyon matches the image lattice", "[raytracer]")
{
    const double w = 16.0;
    const Scene s = fixture::pec_canyon(w, 2000.0, 60.0);
    fixture::Gen g(8);
    for (int i = 0; i < 50; ++i)
    {
        const Vec3 tx(g.uniform(-100, 100), g.uniform(-7.5, 7.5), g.uniform(1, 3));
        const Vec3 rx(g.uniform(-100, 100), g.uniform(-7.5, 7.5), g.uniform(1, 3));
        const auto paths = image_method_specular(s, tx, rx, 2, f59);
        std::vector<double> got;
        for (const auto &p : paths)
            got.push_back(p.length);
        std::sort(got.begin(), got.end());
        const auto want = lattice_lengths(tx, rx, w, 2);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(std::abs(got[k] - want[k]) < 1e-9);
    }
}

TEST_CASE("image_method_specular: order limits", "[raytracer]")
{
    const Scene s = fixture::pec_canyon(16.0, 200.0, 20.0);
    CHECK_THROWS_AS(image_method_specular(s, Vec3(0, 0, 1), Vec3(5, 0, 1), 5, f59), ComplexityError);
    CHECK_THROWS_AS(image_method_specular(s, Vec3(0, 0, 1), Vec3(5, 0, 1), 0, f59), std::invalid_argument);
    CHECK_THROWS_AS(image_method_specular(s, Vec3(0, 0, 1), Vec3(0, 0, 1), 1, f59), std::invalid_argument);
    const auto p4 = image_method_specular(s, Vec3(0, 1, 1), Vec3(30, -2, 1.5), 4, f59);
    CHECK(p4.size() == 8);
    for (std::size_t i = 1; i < p4.size(); ++i)
        CHECK(p4[i - 1].order <= p4[i].order);
    TracerConfig c;
    c.max_order = 5;
    CHECK_THROWS_AS(Tracer(s, c), ComplexityError);
}

TEST_CASE("lambertian_diffuse: grazing receiver and occluded tiles", "[raytracer]")
{
    const auto concrete = fixture::material_index("concrete");
    SECTION("receiver in the surface plane contributes nothing")
    {
        const Scene s = fixture::scene_of({fixture::wall_y(0.0, 0, 10, 15, concrete, true)});
        const auto paths = lambertian_diffuse(s, Vec3(5, 20, 2), Vec3(30, 0, 2), 1.0, f59);
        double total = 0.0;
        for (const auto &p : paths)
            total += p.power_gain();
        CHECK(total == 0.0);
    }
    SECTION("hidden tiles give no path")
    {
        auto mats = default_materials();
        mats.push_back({"absorber", 3.0, 0.0, false, 0.0});
        const std::size_t absorber = mats.size() - 1;
        const Scene s(mats,
                      {fixture::wall_y(0.0, 0, 10, 15, concrete, true),
                       fixture::rect({4, 5, 0}, {3, 0, 0}, {0, 0, 20}, absorber, "screen")},
                      std::nullopt);
        const Vec3 tx(-10, 20, 2), rx(5, 12, 2);
        const DiffuseTiling tiling(s, 1.0);
        const auto paths = lambertian_diffuse(s, tiling, tx, rx, f59);
        std::size_t visible = 0, hidden = 0;
        for (const auto &t : tiling.tiles())
        {
            const bool blocked = occlusion_test(s, t.center, rx) || occlusion_test(s, tx, t.center);
            const bool present = std::any_of(paths.begin(), paths.end(), [&](const PropagationPath &p) {
                return p.interactions[0].tile == t.index && p.interactions[0].surface == t.surface;
            });
            CHECK(present == !blocked);
            (blocked ? hidden : visible) += 1;
        }
        CHECK(hidden > 0);
        CHECK(visible > 0);
        CHECK(tiling.tiles().size() == 150);
    }
    SECTION("tile size must be positive")
    {
        const Scene s = fixture::scene_of({fixture::wall_y(0.0, 0, 10, 15, concrete, true)});
        CHECK_THROWS_AS(lambertian_diffuse(s, Vec3(5, 20, 2), Vec3(6, 20, 2), 0.0, f59), std::invalid_argument);
        CHECK_THROWS_AS(lambertian_diffuse(s, Vec3(5, 20, 2), Vec3(6, 20, 2), -1.0, f59), std::invalid_argument);
    }
}

TEST_CASE("lambertian_diffuse: amplitude of a single tile", "[raytracer]")
{
    const auto concrete = fixture::material_index("concrete");
    const Scene s = fixture::scene_of({fixture::wall_y(0.0, 0, 1, 1, concrete, true)});
    const Vec3 tx(-3, 4, 0.5), rx(6, 8, 0.5);
    const auto paths = lambertian_diffuse(s, tx, rx, 1.0, f59);
    REQUIRE(paths.size() == 1);
    const Vec3 c(0.5, 0, 0.5);
    const double r1 = (c - tx).norm(), r2 = (c - rx).norm();
    const double ci = 4.0 / r1, cs = 8.0 / r2;
    const double want = 0.4 * std::sqrt(ci * cs / pi) / (r1 * r2) * wavelength(f59) / (4 * pi);
    CHECK(std::abs(paths[0].amplitude(0, 0)) == Approx(want).epsilon(1e-12));
    CHECK(std::abs(paths[0].amplitude(0, 1)) == 0.0);
    CHECK(paths[0].length == Approx(r1 + r2).epsilon(1e-14));
}

TEST_CASE("lambertian_diffuse: tile refinement converges", "[raytracer]")
{
    const auto concrete = fixture::material_index("concrete");
    const Scene s = fixture::scene_of({fixture::wall_y(0.0, -5, 5, 15, concrete, true)});
    const Vec3 tx(-10, 20, 2), rx(10, 20, 2);
    std::vector<double> totals;
    for (double ts : {2.0, 1.0, 0.5, 0.25})
    {
        double t = 0.0;
        for (const auto &p : lambertian_diffuse(s, tx, rx, ts, f59))
            t += p.power_gain();
        totals.push_back(t);
    }
    CHECK(std::abs(totals[2] - totals[1]) / totals[1] < 0.01);
    for (std::size_t i = 2; i < totals.size(); ++i)
        CHECK(std::abs(totals[i] - totals[i - 1]) < std::abs(totals[i - 1] - totals[i - 2]));
}

TEST_CASE("trace_snapshot: examples", "[raytracer]")
{
    TracerConfig cfg;
    SECTION("empty scene gives exactly one LOS path")
    {
        const auto p = trace_snapshot(fixture::empty_scene(), Vec3(0, 0, 1), Vec3(50, 3, 1), cfg);
        REQUIRE(p.size() == 1);
        CHECK(p[0].kind == PathKind::los);
    }
    SECTION("NLOS corner")
    {
        const auto concrete = fixture::material_index("concrete");
        const std::vector<Vec2> block{{-50, -50}, {-5, -50}, {-5, -5}, {-50, -5}};
        auto surfaces = extrude_footprint(block, 15.0, concrete);
        const std::size_t far = surfaces.size();
        surfaces.push_back(fixture::rect({10, -50, 0}, {0, 0, 15}, {0, 100, 0}, concrete, "far wall"));
        const Scene s = fixture::scene_of(surfaces);
        REQUIRE(s.surface(far).normal().isApprox(Vec3(-1, 0, 0)));
        const Vec3 tx(-8, 0, 1.5), rx(0, -30, 1.5);

        cfg.enable_diffuse = false;
        const auto spec = trace_snapshot(s, tx, rx, cfg);
        CHECK(std::none_of(spec.begin(), spec.end(), [](const PropagationPath &p) { return p.kind == PathKind::los; }));
        // the single-bounce oracle: mirror tx in x = 10
        const double want = (Vec3(28, 0, 1.5) - rx).norm();
        const auto it = std::find_if(spec.begin(), spec.end(), [&](const PropagationPath &p) {
            return p.order == 1 && p.interactions[0].surface == far;
        });
        REQUIRE(it != spec.end());
        CHECK(it->length == Approx(want).epsilon(1e-12));

        cfg.enable_diffuse = true;
        const auto all = trace_snapshot(s, tx, rx, cfg);
        CHECK(all.size() > spec.size());
        // ordering: LOS, specular by (order, length), diffuse by length
        for (std::size_t i = 1; i < all.size(); ++i)
        {
            const auto &a = all[i - 1], &b = all[i];
            CHECK(int(a.kind) <= int(b.kind));
            if (a.kind == PathKind::specular && b.kind == PathKind::specular)
                CHECK((a.order < b.order || (a.order == b.order && a.length <= b.length)));
            if (a.kind == PathKind::diffuse && b.kind == PathKind::diffuse)
                CHECK(a.length <= b.length);
        }
    }
    SECTION("configuration errors")
    {
        cfg.tile_size = 0.0;
        CHECK_THROWS_AS(Tracer(fixture::empty_scene(), cfg), std::invalid_argument);
        cfg.tile_size = 1.0;
        cfg.max_order = 0;
        CHECK_THROWS_AS(Tracer(fixture::empty_scene(), cfg), std::invalid_argument);
    }
}

TEST_CASE("path dump format", "[raytracer]")
{
    std::ostringstream out;
    write_path_dump_header(out, 2);
    const auto p = trace_snapshot(fixture::empty_scene(), Vec3(0, 0, 0), Vec3(299.792458, 0, 0), TracerConfig{});
    write_path_dump(out, 0.5, p);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "snapshot_t,kind,order,length_m,delay_s,gain_db,n_interactions,p1_x,p1_y,p1_z,p2_x,p2_y,p2_z");
    CHECK(row.rfind("0.5,los,0,", 0) == 0);
    std::vector<std::string> cells;
    std::istringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');)
        cells.push_back(c);
    REQUIRE(cells.size() == 7);
    CHECK(std::stod(cells[3]) == 299.792458);
    CHECK(std::stod(cells[4]) == p[0].delay);
    CHECK(row.ends_with(",0"));
}
