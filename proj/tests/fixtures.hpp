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


// Scene builders and generators shared by the test programs.

#pragma once

#include "v2v/channel.hpp"
#include "v2v/scene.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixture
{

using v2v::Vec2;
using v2v::Vec3;

// Rectangle p0, p0+e1, p0+e1+e2, p0+e2; normal along e1 x e2.
inline v2v::Surface rect(const Vec3 &p0, const Vec3 &e1, const Vec3 &e2, std::size_t material,
                         const std::string &tag = "wall")
{
    return v2v::Surface::make({p0, p0 + e1, p0 + e1 + e2, p0 + e2}, material, tag);
}

inline std::size_t material_index(const std::string &name)
{
    const auto mats = v2v::default_materials();
    for (std::size_t i = 0; i < mats.size(); ++i)
        if (mats[i].name == name)
            return i;
    return 0;
}

// Wall in the plane y = y0 spanning [x0, x1] x [0, h], normal +y or -y.
inline v2v::Surface wall_y(double y0, double x0, double x1, double h, std::size_t material, bool normal_plus_y)
{
    if (normal_plus_y)
        return rect({x0, y0, 0.0}, {0.0, 0.0, h}, {x1 - x0, 0.0, 0.0}, material);
    return rect({x0, y0, 0.0}, {x1 - x0, 0.0, 0.0}, {0.0, 0.0, h}, material);
}

inline v2v::Scene scene_of(std::vector<v2v::Surface> surfaces, std::vector<v2v::Material> mats = v2v::default_materials())
{
    return v2v::Scene(std::move(mats), std::move(surfaces), std::nullopt);
}

inline v2v::Scene empty_scene() { return v2v::Scene(v2v::default_materials(), {}, std::nullopt); }

// Two parallel PEC walls y = -w/2 (normal +y) and y = +w/2 (normal -y).
inline v2v::Scene pec_canyon(double width, double length, double height)
{
    const auto metal = material_index("metal");
    return scene_of({wall_y(-0.5 * width, -0.5 * length, 0.5 * length, height, metal, true),
                     wall_y(0.5 * width, -0.5 * length, 0.5 * length, height, metal, false)});
}

// Large PEC ground square centred on the origin, normal up.
inline v2v::Scene pec_ground(double half)
{
    const auto metal = material_index("metal");
    auto g = rect({-half, -half, 0.0}, {2 * half, 0.0, 0.0}, {0.0, 2 * half, 0.0}, metal, "ground");
    return v2v::Scene(v2v::default_materials(), {g}, 0);
}

inline std::filesystem::path temp_dir(const std::string &name)
{
    auto p = std::filesystem::temp_directory_path() / ("v2vray_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// Uniform draws for the property generators.
struct Gen
{
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    std::complex<double> gauss()
    {
        std::normal_distribution<double> d(0.0, 1.0);
        return {d(rng), d(rng)};
    }
    Vec3 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    Vec3 unit()
    {
        std::normal_distribution<double> d(0.0, 1.0);
        Vec3 v(d(rng), d(rng), d(rng));
        return v.normalized();
    }
};

inline v2v::ChannelTensor random_tensor(Gen &g, v2v::Domain domain, std::size_t n_time, std::size_t n_rx,
                                        std::size_t n_tx, std::size_t n_bin, v2v::TensorAxes axes = {})
{
    v2v::ChannelTensor t(domain, n_time, n_rx, n_tx, n_bin, axes);
    for (auto &v : t.data())
        v = g.gauss();
    return t;
}

} // namespace fixture
