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
#include "v2v/scene.hpp"

#include <complex>
#include <utility>

namespace v2v
{

struct FresnelCoefficients
{
    std::complex<double> perpendicular;
    std::complex<double> parallel;
};

// Reflection coefficients of a half-space with complex permittivity
// eps = eps_r - j sigma / (2 pi f eps0), for an incidence angle measured from
// the surface normal.
//
// Sign convention: with e_perp = k_i x n / |k_i x n| and e_par = e_perp x k for
// both the incident and the reflected wave, the reflected field is
// Gamma_perp * a_perp * e_perp + Gamma_par * a_par * e_par_r. At a perfect
// conductor the tangential field must vanish, which in this basis gives
// Gamma_perp = -1 and Gamma_par = +1 (at normal incidence e_par_r = -e_par_i).
//
// Throws std::invalid_argument unless 0 <= angle < pi/2 and frequency > 0.
FresnelCoefficients fresnel_coefficients(const Material &material, double incidence_angle, double frequency);

// Vertical/horizontal unit vectors for a wave travelling along unit vector k:
// h = z x k / |z x k| (x axis when k is vertical), v = k x h.
std::pair<Vec3, Vec3> polarization_basis(const Vec3 &k);

// 2x2 transfer matrix of a specular bounce from incident direction k_in to
// k_out = mirror(k_in) on a plane with unit normal n, mapping (v,h) field
// components of the incident wave to (v,h) components of the reflected wave.
Eigen::Matrix2cd reflection_matrix(const Vec3 &k_in, const Vec3 &normal, const FresnelCoefficients &gamma);

} // namespace v2v
