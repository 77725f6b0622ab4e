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

#include <complex>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace v2v
{

// Complex field gain split into (vertical, horizontal) polarization components.
// Vertical/horizontal are taken w.r.t. the global z axis for the propagation
// direction in question (see polarization_basis in raytracer.hpp).
using PolarizedGain = Eigen::Vector2cd;

// Far-field gain samples on a uniform (azimuth, elevation) grid in the antenna frame.
// Azimuth theta in [0, 360) measured from +x toward +y; elevation phi in [-90, 90]
// measured from the xy plane. Azimuth wraps.
class AntennaPattern
{
  public:
    AntennaPattern() = default;

    // `sample(theta_deg, phi_deg)` is evaluated at every grid node.
    static AntennaPattern from_function(double step_deg, const std::function<PolarizedGain(double, double)> &sample);

    // Unit vertically polarized gain in every direction.
    static AntennaPattern isotropic(double step_deg = 2.0);

    // g(psi) = (1 + cos psi) / 2 around boresight +x, scaled to the given peak gain,
    // vertically polarized.
    static AntennaPattern cardioid(double peak_gain_dbi = 5.0, double step_deg = 2.0);

    double step_deg() const { return step_; }
    std::size_t n_azimuth() const { return n_az_; }
    std::size_t n_elevation() const { return n_el_; }
    double max_gain() const { return max_gain_; }

    const PolarizedGain &node(std::size_t az_index, std::size_t el_index) const
    {
        return samples_[el_index * n_az_ + (az_index % n_az_)];
    }

    // Bilinear interpolation at a unit direction in the antenna frame.
    // Throws std::invalid_argument if |direction| deviates from 1 by more than 1e-9.
    PolarizedGain gain(const Vec3 &direction) const;

    // Pattern turned about z by `delta_deg`: rotated.gain(d) == gain(Rz(-delta) d).
    AntennaPattern rotated(double delta_deg) const;

  private:
    double step_ = 2.0;
    std::size_t n_az_ = 0;
    std::size_t n_el_ = 0;
    double max_gain_ = 0.0;
    std::vector<PolarizedGain> samples_; // elevation-major
};

// CSV theta_deg,phi_deg,re_v,im_v,re_h,im_h on a uniform grid. A 360 degree
// column is accepted if it repeats the 0 degree column.
AntennaPattern load_pattern(const std::filesystem::path &path);
void save_pattern(const AntennaPattern &pattern, const std::filesystem::path &path);

struct ArrayElement
{
    std::string label;
    Vec3 offset = Vec3::Zero(); // vehicle frame (x forward, y left, z up), meters
    double boresight_deg = 0.0; // azimuth in the vehicle frame
    std::shared_ptr<const AntennaPattern> pattern;
};

class ArrayLayout
{
  public:
    ArrayLayout() = default;
    // Throws std::invalid_argument for an empty array, a missing pattern, or an
    // offset further than 1 m from the array origin.
    explicit ArrayLayout(std::vector<ArrayElement> elements);

    std::size_t size() const { return elements_.size(); }
    const ArrayElement &element(std::size_t i) const { return elements_.at(i); }
    const std::vector<ArrayElement> &elements() const { return elements_; }

    // Gain of element i toward a world-frame unit direction for a vehicle whose
    // heading (azimuth of its forward axis) is `heading_rad`.
    PolarizedGain gain(std::size_t i, const Vec3 &world_direction, double heading_rad) const;

    // World-frame offset of element i.
    Vec3 world_offset(std::size_t i, double heading_rad) const;

  private:
    std::vector<ArrayElement> elements_;
};

// Four roof-mounted cardioid elements pointing left, back, front and right
// (boresight azimuths 90, 180, 0 and 270 degrees), 0.05 m apart along the
// vehicle axis.
ArrayLayout default_sharkfin_array(double peak_gain_dbi = 5.0, double step_deg = 2.0, double spacing = 0.05);

// Single isotropic element at the array origin.
ArrayLayout isotropic_array();

// Heading of a vehicle moving with `velocity`; 0 when it is (horizontally) at rest.
double heading_from_velocity(const Vec3 &velocity);

} // namespace v2v
