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


#include "v2v/fresnel.hpp"

#include <cmath>
#include <stdexcept>

namespace v2v
{

FresnelCoefficients fresnel_coefficients(const Material &m, double theta, double frequency)
{
    if (!(theta >= 0.0 && theta < pi / 2))
        throw std::invalid_argument("fresnel_coefficients: incidence angle must be in [0, pi/2)");
    if (!(frequency > 0.0))
        throw std::invalid_argument("fresnel_coefficients: frequency must be > 0");
    if (m.is_pec)
        return {-1.0, 1.0};

    using C = std::complex<double>;
    const C eps(m.relative_permittivity, -m.conductivity / (2.0 * pi * frequency * vacuum_permittivity));
    const double c = std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const C root = std::sqrt(eps - s2);
    return {(c - root) / (c + root), (eps * c - root) / (eps * c + root)};
}

std::pair<Vec3, Vec3> polarization_basis(const Vec3 &k)
{
    Vec3 h = Vec3::UnitZ().cross(k);
    const double n = h.norm();
    h = n < 1e-12 ? Vec3(Vec3::UnitX()) : Vec3(h / n);
    return {k.cross(h), h};
}

Eigen::Matrix2cd reflection_matrix(const Vec3 &k_in, const Vec3 &normal, const FresnelCoefficients &g)
{
    const Vec3 k_out = k_in - 2.0 * k_in.dot(normal) * normal;
    Vec3 e_perp = k_in.cross(normal);
    const double n = e_perp.norm();
    if (n < 1e-12)
        e_perp = polarization_basis(k_in).second; // normal incidence: any transverse choice
    else
        e_perp /= n;
    const Vec3 par_in = e_perp.cross(k_in);
    const Vec3 par_out = e_perp.cross(k_out);

    const auto [v_in, h_in] = polarization_basis(k_in);
    const auto [v_out, h_out] = polarization_basis(k_out);

    Eigen::Matrix2d to_local; // (v,h) -> (perp, par)
    to_local << e_perp.dot(v_in), e_perp.dot(h_in), par_in.dot(v_in), par_in.dot(h_in);
    Eigen::Matrix2d from_local; // (perp, par_out) -> (v,h)
    from_local << v_out.dot(e_perp), v_out.dot(par_out), h_out.dot(e_perp), h_out.dot(par_out);

    Eigen::Matrix2cd gamma = Eigen::Matrix2cd::Zero();
    gamma(0, 0) = g.perpendicular;
    gamma(1, 1) = g.parallel;
    return from_local.cast<std::complex<double>>() * gamma * to_local.cast<std::complex<double>>();
}

} // namespace v2v
