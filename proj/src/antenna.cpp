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

#include "v2v/antenna.hpp"

#include "v2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace v2v
{

namespace
{
constexpr double deg = pi / 180.0;

std::size_t grid_count(double span, double step)
{
    const double n = span / step;
    const double r = std::round(n);
    if (!(step > 0.0) || std::abs(n - r) > 1e-9 || r < 1.0)
        throw std::invalid_argument("antenna pattern: grid step must divide 180 degrees");
    return static_cast<std::size_t>(r);
}

// Split a fractional grid coordinate into (index, weight), snapping near-integer values.
std::pair<long, double> split(double x)
{
    double f = std::floor(x);
    double w = x - f;
    if (w > 1.0 - 1e-9)
    {
        f += 1.0;
        w = 0.0;
    }
    else if (w < 1e-9)
    {
        w = 0.0;
    }
    return {static_cast<long>(f), w};
}
} // namespace

AntennaPattern AntennaPattern::from_function(double step_deg,
                                             const std::function<PolarizedGain(double, double)> &sample)
{
    AntennaPattern p;
    p.step_ = step_deg;
    p.n_az_ = grid_count(360.0, step_deg);
    p.n_el_ = grid_count(180.0, step_deg) + 1;
    p.samples_.resize(p.n_az_ * p.n_el_);
    for (std::size_t j = 0; j < p.n_el_; ++j)
        for (std::size_t i = 0; i < p.n_az_; ++i)
        {
            PolarizedGain g = sample(double(i) * step_deg, -90.0 + double(j) * step_deg);
            if (!g.allFinite())
                throw std::invalid_argument("antenna pattern: non-finite sample");
            p.samples_[j * p.n_az_ + i] = g;
            p.max_gain_ = std::max(p.max_gain_, g.norm());
        }
    return p;
}

AntennaPattern AntennaPattern::isotropic(double step_deg)
{
    return from_function(step_deg, [](double, double) { return PolarizedGain(1.0, 0.0); });
}

AntennaPattern AntennaPattern::cardioid(double peak_gain_dbi, double step_deg)
{
    const double peak = std::sqrt(std::pow(10.0, peak_gain_dbi / 10.0));
    return from_function(step_deg, [peak](double theta, double phi) {
        const double cos_psi = std::cos(phi * deg) * std::cos(theta * deg);
        return PolarizedGain(peak * 0.5 * (1.0 + cos_psi), 0.0);
    });
}

PolarizedGain AntennaPattern::gain(const Vec3 &d) const
{
    if (samples_.empty())
        throw std::logic_error("antenna pattern: empty grid");
    if (std::abs(d.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("antenna pattern: direction must be a unit vector");

    double theta = std::atan2(d.y(), d.x()) / deg;
    if (theta < 0.0)
        theta += 360.0;
    const double phi = std::asin(std::clamp(d.z(), -1.0, 1.0)) / deg;

    auto [i0, a] = split(theta / step_);
    auto [j0, b] = split((phi + 90.0) / step_);
    const long last = static_cast<long>(n_el_) - 1;
    if (j0 >= last)
    {
        j0 = last;
        b = 0.0;
    }
    j0 = std::max(j0, 0L);
    const std::size_t ia = static_cast<std::size_t>(((i0 % long(n_az_)) + long(n_az_)) % long(n_az_));
    const std::size_t ib = (ia + 1) % n_az_;
    const std::size_t ja = static_cast<std::size_t>(j0);
    const std::size_t jb = std::min<std::size_t>(ja + 1, n_el_ - 1);

    // nested lerps keep constant patterns exact
    auto lerp = [](const PolarizedGain &x, const PolarizedGain &y, double w) -> PolarizedGain {
        return w == 0.0 ? x : PolarizedGain(x + w * (y - x));
    };
    const PolarizedGain lo = lerp(node(ia, ja), node(ib, ja), a);
    const PolarizedGain v = b == 0.0 ? lo : lerp(lo, lerp(node(ia, jb), node(ib, jb), a), b);
    return v;
}

AntennaPattern AntennaPattern::rotated(double delta_deg) const
{
    return from_function(step_, [&](double theta, double phi) {
        const double t = (theta - delta_deg) * deg;
        const double p = phi * deg;
        if (std::abs(phi) == 90.0)
        {
            // poles: keep the stored column for the rotated azimuth
            Vec3 d(std::cos(t), std::sin(t), 0.0);
            double th = std::atan2(d.y(), d.x()) / deg;
            if (th < 0.0)
                th += 360.0;
            auto [i0, a] = split(th / step_);
            const std::size_t j = phi > 0 ? n_el_ - 1 : 0;
            const std::size_t ia = static_cast<std::size_t>(((i0 % long(n_az_)) + long(n_az_)) % long(n_az_));
            return PolarizedGain((1.0 - a) * node(ia, j) + a * node(ia + 1, j));
        }
        return gain(Vec3(std::cos(p) * std::cos(t), std::cos(p) * std::sin(t), std::sin(p)).normalized());
    });
}

AntennaPattern load_pattern(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open pattern file '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line != "theta_deg,phi_deg,re_v,im_v,re_h,im_h")
        throw FormatError(path.string() + ":1: expected header 'theta_deg,phi_deg,re_v,im_v,re_h,im_h'");

    std::map<std::pair<long, long>, PolarizedGain> cells; // keyed in millidegrees
    std::vector<double> phis;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::stringstream ss(line);
        std::string cell;
        double v[6];
        int k = 0;
        while (std::getline(ss, cell, ','))
        {
            if (k == 6)
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 6 columns");
            try
            {
                v[k] = std::stod(cell);
            }
            catch (const std::exception &)
            {
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number");
            }
            ++k;
        }
        if (k != 6)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 6 columns");
        cells[{std::lround(v[0] * 1000.0), std::lround(v[1] * 1000.0)}] =
            PolarizedGain(std::complex<double>(v[2], v[3]), std::complex<double>(v[4], v[5]));
        phis.push_back(v[1]);
    }
    if (cells.empty())
        throw FormatError(path.string() + ": no samples");
    std::sort(phis.begin(), phis.end());
    phis.erase(std::unique(phis.begin(), phis.end()), phis.end());
    if (phis.size() < 2)
        throw FormatError(path.string() + ": need at least two elevation rows");
    const double step = phis[1] - phis[0];

    for (const auto &[key, g] : cells)
        if (key.first == 360000)
        {
            auto it = cells.find({0, key.second});
            if (it == cells.end() || (it->second - g).norm() > 1e-12)
                throw FormatError(path.string() + ": sample at 360 degrees differs from 0 degrees");
        }

    try
    {
        return AntennaPattern::from_function(step, [&](double theta, double phi) {
            auto it = cells.find({std::lround(theta * 1000.0), std::lround(phi * 1000.0)});
            if (it == cells.end())
                throw FormatError(path.string() + ": grid node missing");
            return it->second;
        });
    }
    catch (const std::invalid_argument &e)
    {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_pattern(const AntennaPattern &p, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write pattern file '" + path.string() + "'");
    out << "theta_deg,phi_deg,re_v,im_v,re_h,im_h\n" << std::setprecision(17);
    for (std::size_t j = 0; j < p.n_elevation(); ++j)
        for (std::size_t i = 0; i < p.n_azimuth(); ++i)
        {
            const auto &g = p.node(i, j);
            out << double(i) * p.step_deg() << ',' << -90.0 + double(j) * p.step_deg() << ',' << g[0].real() << ','
                << g[0].imag() << ',' << g[1].real() << ',' << g[1].imag() << '\n';
        }
}

// ---------------------------------------------------------------------------

ArrayLayout::ArrayLayout(std::vector<ArrayElement> elements) : elements_(std::move(elements))
{
    if (elements_.empty())
        throw std::invalid_argument("antenna array: at least one element is required");
    for (const auto &e : elements_)
    {
        if (!e.pattern)
            throw std::invalid_argument("antenna array: element '" + e.label + "' has no pattern");
        if (e.offset.norm() > 1.0)
            throw std::invalid_argument("antenna array: element '" + e.label + "' is more than 1 m from the origin");
    }
}

namespace
{
Vec3 rotate_z(const Vec3 &v, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}
} // namespace

PolarizedGain ArrayLayout::gain(std::size_t i, const Vec3 &world_direction, double heading_rad) const
{
    const ArrayElement &e = elements_.at(i);
    return e.pattern->gain(rotate_z(world_direction, -(heading_rad + e.boresight_deg * deg)));
}

Vec3 ArrayLayout::world_offset(std::size_t i, double heading_rad) const
{
    return rotate_z(elements_.at(i).offset, heading_rad);
}

ArrayLayout default_sharkfin_array(double peak_gain_dbi, double step_deg, double spacing)
{
    auto pattern = std::make_shared<const AntennaPattern>(AntennaPattern::cardioid(peak_gain_dbi, step_deg));
    const char *labels[4] = {"left", "back", "front", "right"};
    const double boresight[4] = {90.0, 180.0, 0.0, 270.0};
    std::vector<ArrayElement> elems;
    for (int i = 0; i < 4; ++i)
        elems.push_back({labels[i], Vec3((1.5 - i) * spacing, 0.0, 0.0), boresight[i], pattern});
    return ArrayLayout(std::move(elems));
}

ArrayLayout isotropic_array()
{
    return ArrayLayout({{"iso", Vec3::Zero(), 0.0, std::make_shared<const AntennaPattern>(AntennaPattern::isotropic())}});
}

double heading_from_velocity(const Vec3 &v)
{
    if (std::hypot(v.x(), v.y()) < 1e-9)
        return 0.0;
    return std::atan2(v.y(), v.x());
}

} // namespace v2v
