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

#include "v2v/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace v2v
{

struct Material
{
    std::string name;
    double relative_permittivity = 1.0; // >= 1
    double conductivity = 0.0;          // S/m, >= 0
    bool is_pec = false;
    double scattering_coefficient = 0.0; // Lambertian S in [0,1]

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;

    bool operator==(const Material &) const = default;
};

// Concrete, glass, metal (PEC) and asphalt. Scene files may override any of them by name.
std::vector<Material> default_materials();

// Planar polygon with a material. Vertices are counter-clockwise seen from the
// outward (front) side; the normal is derived from the vertex order.
class Surface
{
  public:
    // Validates and precomputes the plane frame. Throws GeometryError naming `label`.
    static Surface make(std::vector<Vec3> vertices, std::size_t material, std::string tag,
                        const std::string &label = "surface");

    const std::vector<Vec3> &vertices() const { return vertices_; }
    std::size_t material() const { return material_; }
    const std::string &tag() const { return tag_; }

    const Vec3 &normal() const { return normal_; }
    double offset() const { return offset_; } // plane: normal . x = offset
    const Vec3 &origin() const { return origin_; }
    const Vec3 &u_axis() const { return u_; }
    const Vec3 &v_axis() const { return v_; }
    const std::vector<Vec2> &polygon2d() const { return poly_; }
    const Aabb &bounds() const { return box_; }
    double area() const { return area_; }

    Vec2 to_local(const Vec3 &p) const;
    Vec3 to_world(const Vec2 &q) const;
    double signed_distance(const Vec3 &p) const { return normal_.dot(p) - offset_; }

    // Parameter s in (0,1) where the open segment a->b crosses the polygon,
    // ignoring crossings within intersection_tolerance of either endpoint.
    std::optional<double> crossing(const Vec3 &a, const Vec3 &b) const;

    // In-plane point strictly inside the polygon (at least `margin` from every edge).
    bool strictly_contains(const Vec3 &p, double margin = intersection_tolerance) const;

    bool operator==(const Surface &o) const
    {
        return vertices_ == o.vertices_ && material_ == o.material_ && tag_ == o.tag_;
    }

  private:
    std::vector<Vec3> vertices_;
    std::size_t material_ = 0;
    std::string tag_;
    Vec3 normal_ = Vec3::UnitZ();
    double offset_ = 0.0;
    Vec3 origin_ = Vec3::Zero();
    Vec3 u_ = Vec3::UnitX();
    Vec3 v_ = Vec3::UnitY();
    std::vector<Vec2> poly_;
    Aabb box_;
    double area_ = 0.0;
};

struct GeoOrigin
{
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;

    bool operator==(const GeoOrigin &) const = default;
};

// Equirectangular projection of (lat, lon) to local east/north meters around `origin`.
Vec2 project_latlon(const GeoOrigin &origin, double latitude_deg, double longitude_deg);

// Immutable after construction; safe for concurrent reads.
class Scene
{
  public:
    Scene() = default;

    // `bounds` may be empty, in which case the box is derived from the surfaces
    // (padded by 1 m) or left infinite for a scene without surfaces.
    Scene(std::vector<Material> materials, std::vector<Surface> surfaces, std::optional<std::size_t> ground_id,
          GeoOrigin origin = {}, std::optional<Aabb> bounds = std::nullopt);

    const std::vector<Material> &materials() const { return materials_; }
    const std::vector<Surface> &surfaces() const { return surfaces_; }
    const Surface &surface(std::size_t id) const { return surfaces_.at(id); }
    const Material &material_of(std::size_t surface_id) const { return materials_.at(surfaces_.at(surface_id).material()); }
    std::optional<std::size_t> ground_id() const { return ground_id_; }
    const Surface *ground() const { return ground_id_ ? &surfaces_[*ground_id_] : nullptr; }
    const GeoOrigin &origin() const { return origin_; }
    const Aabb &bounding_box() const { return box_; }
    const std::optional<Aabb> &declared_bounds() const { return declared_bounds_; }

    std::optional<std::size_t> find_material(const std::string &name) const;

    bool operator==(const Scene &o) const
    {
        return materials_ == o.materials_ && surfaces_ == o.surfaces_ && ground_id_ == o.ground_id_ &&
               origin_ == o.origin_ && box_ == o.box_;
    }

  private:
    std::vector<Material> materials_;
    std::vector<Surface> surfaces_;
    std::optional<std::size_t> ground_id_;
    GeoOrigin origin_;
    std::optional<Aabb> declared_bounds_;
    Aabb box_ = Aabb::infinite();
};

// True iff some surface not listed in `ignore` crosses the open segment a->b.
// Crossings within intersection_tolerance of either endpoint do not count.
bool occlusion_test(const Scene &scene, const Vec3 &a, const Vec3 &b, std::span<const std::size_t> ignore = {});

// One wall per footprint edge plus a roof. The footprint may be given in either
// winding; walls always face away from the interior.
std::vector<Surface> extrude_footprint(std::span<const Vec2> footprint, double height, std::size_t material,
                                       const std::string &tag = "building", double base = 0.0);

// Scene file I/O (JSON). Errors: FormatError (syntax / field, with location),
// ReferenceError (unknown material), GeometryError (names the offending surface).
Scene parse_scene(const std::string &text);
Scene load_scene(const std::filesystem::path &path);
// Both writers require the ground, if any, to be the last surface (as loaded).
std::string serialize_scene(const Scene &scene);
void save_scene(const Scene &scene, const std::filesystem::path &path);

struct TrajectorySample
{
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
};

class Trajectory
{
  public:
    Trajectory() = default;
    // Throws std::invalid_argument unless t is strictly increasing and uniform within 1e-9 s,
    // and antenna_height > 0.
    Trajectory(std::vector<TrajectorySample> samples, double antenna_height);

    const std::vector<TrajectorySample> &samples() const { return samples_; }
    double antenna_height() const { return antenna_height_; }
    double start() const { return samples_.front().t; }
    double end() const { return samples_.back().t; }

    // Antenna phase-centre position (track position + antenna height) and
    // velocity, linearly interpolated. Clamped outside the sampled interval.
    Vec3 antenna_position(double t) const;
    Vec3 velocity(double t) const;

  private:
    std::vector<TrajectorySample> samples_;
    double antenna_height_ = 1.73;
};

// CSV with header t,x,y,z,vx,vy,vz.
Trajectory load_trajectory(const std::filesystem::path &path, double antenna_height);
void save_trajectory(const Trajectory &trajectory, const std::filesystem::path &path);

} // namespace v2v
