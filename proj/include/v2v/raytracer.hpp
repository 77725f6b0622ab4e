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

#include "v2v/fresnel.hpp"
#include "v2v/geometry.hpp"
#include "v2v/scene.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace v2v
{

enum class PathKind
{
    los,
    specular,
    diffuse
};

const char *to_string(PathKind kind);

struct Interaction
{
    std::size_t surface = 0;
    Vec3 point = Vec3::Zero();
    long tile = -1; // diffuse tile index within the surface, -1 for reflections

    bool operator==(const Interaction &) const = default;
};

struct PropagationPath
{
    PathKind kind = PathKind::los;
    int order = 0; // number of interactions
    std::vector<Interaction> interactions;
    double length = 0.0; // m
    double delay = 0.0;  // s

    // Maps (v,h) field components along `departure` to (v,h) components along
    // `arrival`. Antenna gains are not included.
    Eigen::Matrix2cd amplitude = Eigen::Matrix2cd::Zero();

    Vec3 departure = Vec3::UnitX(); // unit direction leaving the TX
    Vec3 arrival = Vec3::UnitX();   // unit propagation direction at the RX

    // |a|^2 averaged over the two polarizations
    double power_gain() const { return 0.5 * amplitude.squaredNorm(); }
};

struct TracerConfig
{
    double frequency = 5.9e9;
    int max_order = 2;
    double tile_size = 1.0;
    bool enable_diffuse = true;
    // Diffuse paths weaker than the strongest path by more than this many dB
    // are dropped. Infinity keeps everything.
    double cull_db = 40.0;
};

inline constexpr int max_specular_order = 4;

double wavelength(double frequency);

// Throws std::invalid_argument when tx == rx.
std::optional<PropagationPath> trace_los(const Scene &scene, const Vec3 &tx, const Vec3 &rx, double frequency);

// All valid specular paths of order 1..max_order, sorted by (order, length).
// Throws std::invalid_argument for max_order < 1 and ComplexityError above 4.
std::vector<PropagationPath> image_method_specular(const Scene &scene, const Vec3 &tx, const Vec3 &rx, int max_order,
                                                   double frequency);

struct DiffuseTile
{
    std::size_t surface = 0;
    long index = 0;
    Vec3 center = Vec3::Zero();
    double area = 0.0;
};

// Every surface with a nonzero scattering coefficient cut into square cells
// of side tile_size in its own (u,v) frame, clipped to the polygon.
class DiffuseTiling
{
  public:
    DiffuseTiling() = default;
    DiffuseTiling(const Scene &scene, double tile_size);

    double tile_size() const { return tile_size_; }
    const std::vector<DiffuseTile> &tiles() const { return tiles_; }

  private:
    double tile_size_ = 1.0;
    std::vector<DiffuseTile> tiles_;
};

// Single-bounce Lambertian paths over all tiles visible from both ends,
// sorted by length. Paths with power below `min_power` are skipped.
std::vector<PropagationPath> lambertian_diffuse(const Scene &scene, const DiffuseTiling &tiling, const Vec3 &tx,
                                                const Vec3 &rx, double frequency, double min_power = 0.0);

// Convenience overload that tiles the scene on the fly.
std::vector<PropagationPath> lambertian_diffuse(const Scene &scene, const Vec3 &tx, const Vec3 &rx, double tile_size,
                                                double frequency);

// Reusable tracer for one scene: validates the config once and keeps the tiling.
class Tracer
{
  public:
    Tracer(const Scene &scene, TracerConfig config);

    const Scene &scene() const { return *scene_; }
    const TracerConfig &config() const { return config_; }

    // LOS, then specular by (order, length), then diffuse by length.
    std::vector<PropagationPath> trace(const Vec3 &tx, const Vec3 &rx) const;

  private:
    const Scene *scene_;
    TracerConfig config_;
    DiffuseTiling tiling_;
};

std::vector<PropagationPath> trace_snapshot(const Scene &scene, const Vec3 &tx, const Vec3 &rx,
                                            const TracerConfig &config);

// CSV rows snapshot_t,kind,order,length_m,delay_s,gain_db,n_interactions followed
// by x,y,z per interaction point.
void write_path_dump_header(std::ostream &out, int max_interactions);
void write_path_dump(std::ostream &out, double t, const std::vector<PropagationPath> &paths);

} // namespace v2v
