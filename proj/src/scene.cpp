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

#include "v2v/scene.hpp"

#include "v2v/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace v2v
{

using nlohmann::json;

void Material::validate() const
{
    if (!(relative_permittivity >= 1.0))
        throw std::invalid_argument("material '" + name + "': relative_permittivity must be >= 1");
    if (!(conductivity >= 0.0))
        throw std::invalid_argument("material '" + name + "': conductivity must be >= 0");
    if (!(scattering_coefficient >= 0.0 && scattering_coefficient <= 1.0))
        throw std::invalid_argument("material '" + name + "': scattering_coefficient must be in [0,1]");
}

std::vector<Material> default_materials()
{
    return {
        {"concrete", 5.0, 0.01, false, 0.4},
        {"glass", 6.0, 0.005, false, 0.2},
        {"metal", 1.0, 0.0, true, 0.1},
        {"asphalt", 4.0, 0.02, false, 0.5},
    };
}

// ---------------------------------------------------------------------------
// Surface

Surface Surface::make(std::vector<Vec3> vertices, std::size_t material, std::string tag, const std::string &label)
{
    if (vertices.size() < 3)
        throw GeometryError(label + ": a surface needs at least 3 vertices, got " + std::to_string(vertices.size()));
    for (const auto &p : vertices)
        if (!p.allFinite())
            throw GeometryError(label + ": non-finite vertex coordinate");

    Surface s;
    const std::size_t n = vertices.size();

    // Newell's method; |normal| = 2 * area for planar polygons
    Vec3 nrm = Vec3::Zero();
    Vec3 centroid = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec3 &a = vertices[i];
        const Vec3 &b = vertices[(i + 1) % n];
        nrm.x() += (a.y() - b.y()) * (a.z() + b.z());
        nrm.y() += (a.z() - b.z()) * (a.x() + b.x());
        nrm.z() += (a.x() - b.x()) * (a.y() + b.y());
        centroid += a;
    }
    centroid /= double(n);
    const double nlen = nrm.norm();
    if (!(nlen > 1e-12))
        throw GeometryError(label + ": degenerate polygon (zero area)");
    s.normal_ = nrm / nlen;
    s.offset_ = s.normal_.dot(centroid);

    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(s.signed_distance(vertices[i])) > planarity_tolerance)
            throw GeometryError(label + ": vertices are not coplanar within 1e-6 m");

    s.origin_ = vertices[0];
    Vec3 u = Vec3::Zero();
    for (std::size_t i = 1; i < n && u.norm() < 1e-12; ++i)
    {
        Vec3 e = vertices[i] - vertices[0];
        u = e - s.normal_ * s.normal_.dot(e);
    }
    s.u_ = u.normalized();
    s.v_ = s.normal_.cross(s.u_);

    s.poly_.reserve(n);
    for (const auto &p : vertices)
    {
        s.poly_.push_back(s.to_local(p));
        s.box_.expand(p);
    }
    s.area_ = signed_area(s.poly_);
    if (!(s.area_ > 1e-12))
        throw GeometryError(label + ": degenerate polygon (zero area)");
    if (is_self_intersecting(s.poly_))
        throw GeometryError(label + ": polygon is self-intersecting");

    s.vertices_ = std::move(vertices);
    s.material_ = material;
    s.tag_ = std::move(tag);
    return s;
}

Vec2 Surface::to_local(const Vec3 &p) const
{
    const Vec3 d = p - origin_;
    return {d.dot(u_), d.dot(v_)};
}

Vec3 Surface::to_world(const Vec2 &q) const
{
    return origin_ + q.x() * u_ + q.y() * v_;
}

std::optional<double> Surface::crossing(const Vec3 &a, const Vec3 &b) const
{
    const double da = signed_distance(a);
    const double db = signed_distance(b);
    if ((da > 0.0 && db > 0.0) || (da < 0.0 && db < 0.0) || da == db)
        return std::nullopt;
    const double s = da / (da - db);
    const double len = (b - a).norm();
    if (s * len <= intersection_tolerance || (1.0 - s) * len <= intersection_tolerance)
        return std::nullopt;
    const Vec3 p = a + s * (b - a);
    if (!box_.contains(p, 1e-6))
        return std::nullopt;
    if (!point_in_polygon(poly_, to_local(p)))
        return std::nullopt;
    return s;
}

bool Surface::strictly_contains(const Vec3 &p, double margin) const
{
    const Vec2 q = to_local(p);
    return point_in_polygon(poly_, q) && distance_to_boundary(poly_, q) >= margin;
}

// ---------------------------------------------------------------------------
// Scene

Vec2 project_latlon(const GeoOrigin &origin, double latitude_deg, double longitude_deg)
{
    constexpr double earth_radius = 6371008.8; // mean radius, m
    constexpr double deg = pi / 180.0;
    const double x = earth_radius * (longitude_deg - origin.longitude_deg) * deg * std::cos(origin.latitude_deg * deg);
    const double y = earth_radius * (latitude_deg - origin.latitude_deg) * deg;
    return {x, y};
}

Scene::Scene(std::vector<Material> materials, std::vector<Surface> surfaces, std::optional<std::size_t> ground_id,
             GeoOrigin origin, std::optional<Aabb> bounds)
    : materials_(std::move(materials)), surfaces_(std::move(surfaces)), ground_id_(ground_id), origin_(origin),
      declared_bounds_(bounds)
{
    for (const auto &m : materials_)
        m.validate();
    for (std::size_t i = 0; i < surfaces_.size(); ++i)
        if (surfaces_[i].material() >= materials_.size())
            throw ReferenceError("surface " + std::to_string(i) + ": material index out of range");
    if (ground_id_ && *ground_id_ >= surfaces_.size())
        throw std::invalid_argument("ground id out of range");

    Aabb content;
    for (const auto &s : surfaces_)
        content.expand(s.bounds());

    if (bounds)
    {
        if (bounds->empty())
            throw GeometryError("scene bounds are empty");
        for (std::size_t i = 0; i < surfaces_.size(); ++i)
            if (!bounds->contains(surfaces_[i].bounds(), intersection_tolerance))
                throw GeometryError("surface " + std::to_string(i) + " (" + surfaces_[i].tag() +
                                    ") lies outside the declared scene bounds");
        box_ = *bounds;
    }
    else if (!surfaces_.empty())
    {
        box_ = content.padded(10.0);
    }
}

std::optional<std::size_t> Scene::find_material(const std::string &name) const
{
    for (std::size_t i = 0; i < materials_.size(); ++i)
        if (materials_[i].name == name)
            return i;
    return std::nullopt;
}

bool occlusion_test(const Scene &scene, const Vec3 &a_in, const Vec3 &b_in, std::span<const std::size_t> ignore)
{
    // canonical orientation keeps the test exactly symmetric in its endpoints
    const bool swap = std::lexicographical_compare(b_in.data(), b_in.data() + 3, a_in.data(), a_in.data() + 3);
    const Vec3 &a = swap ? b_in : a_in;
    const Vec3 &b = swap ? a_in : b_in;

    const auto &surfaces = scene.surfaces();
    for (std::size_t i = 0; i < surfaces.size(); ++i)
    {
        if (std::find(ignore.begin(), ignore.end(), i) != ignore.end())
            continue;
        const Surface &s = surfaces[i];
        if (!s.bounds().padded(1e-6).intersects_segment(a, b))
            continue;
        if (s.crossing(a, b))
            return true;
    }
    return false;
}

std::vector<Surface> extrude_footprint(std::span<const Vec2> footprint, double height, std::size_t material,
                                       const std::string &tag, double base)
{
    if (!(height > 0.0))
        throw std::invalid_argument("extrude_footprint: height must be > 0");
    if (footprint.size() < 3)
        throw GeometryError(tag + " footprint: needs at least 3 vertices");
    if (is_self_intersecting(footprint))
        throw GeometryError(tag + " footprint: polygon is self-intersecting");

    std::vector<Vec2> ring(footprint.begin(), footprint.end());
    const double area = signed_area(ring);
    if (!(std::abs(area) > 1e-12))
        throw GeometryError(tag + " footprint: zero area");
    if (area < 0.0)
        std::reverse(ring.begin(), ring.end());

    std::vector<Surface> out;
    const std::size_t n = ring.size();
    out.reserve(n + 1);
    const double top = base + height;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 &p = ring[i];
        const Vec2 &q = ring[(i + 1) % n];
        std::vector<Vec3> quad{{p.x(), p.y(), base}, {q.x(), q.y(), base}, {q.x(), q.y(), top}, {p.x(), p.y(), top}};
        out.push_back(Surface::make(std::move(quad), material, tag + " wall", tag + " wall " + std::to_string(i)));
    }
    std::vector<Vec3> roof;
    roof.reserve(n);
    for (const auto &p : ring)
        roof.emplace_back(p.x(), p.y(), top);
    out.push_back(Surface::make(std::move(roof), material, tag + " roof", tag + " roof"));
    return out;
}

// ---------------------------------------------------------------------------
// Scene file

namespace
{

const json &field(const json &obj, const char *key, const std::string &where)
{
    if (!obj.is_object())
        throw FormatError("field '" + where + "': expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw FormatError("field '" + where + "." + key + "': missing");
    return *it;
}

double number(const json &v, const std::string &where)
{
    if (!v.is_number())
        throw FormatError("field '" + where + "': expected a number");
    return v.get<double>();
}

std::string text(const json &v, const std::string &where)
{
    if (!v.is_string())
        throw FormatError("field '" + where + "': expected a string");
    return v.get<std::string>();
}

const json &array(const json &v, const std::string &where)
{
    if (!v.is_array())
        throw FormatError("field '" + where + "': expected an array");
    return v;
}

Vec3 point3(const json &v, const std::string &where)
{
    if (!v.is_array() || v.size() != 3)
        throw FormatError("field '" + where + "': expected [x, y, z]");
    return {number(v[0], where + "[0]"), number(v[1], where + "[1]"), number(v[2], where + "[2]")};
}

Vec2 point2(const json &v, const std::string &where)
{
    if (!v.is_array() || v.size() != 2)
        throw FormatError("field '" + where + "': expected [x, y]");
    return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
}

std::size_t resolve_material(const std::vector<Material> &mats, const std::string &name, const std::string &where)
{
    for (std::size_t i = 0; i < mats.size(); ++i)
        if (mats[i].name == name)
            return i;
    throw ReferenceError("field '" + where + "': unknown material '" + name + "'");
}

json to_json(const Vec3 &p) { return json::array({p.x(), p.y(), p.z()}); }

} // namespace

Scene parse_scene(const std::string &content)
{
    json doc;
    try
    {
        doc = json::parse(content);
    }
    catch (const json::parse_error &e)
    {
        throw FormatError(std::string("scene file: ") + e.what());
    }
    if (!doc.is_object())
        throw FormatError("scene file: top level must be an object");

    GeoOrigin origin;
    if (doc.contains("origin"))
    {
        const json &o = doc["origin"];
        origin.latitude_deg = number(field(o, "lat", "origin"), "origin.lat");
        origin.longitude_deg = number(field(o, "lon", "origin"), "origin.lon");
    }

    std::vector<Material> mats = default_materials();
    if (doc.contains("materials"))
    {
        const json &arr = array(doc["materials"], "materials");
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            const std::string w = "materials[" + std::to_string(i) + "]";
            const json &m = arr[i];
            Material mat;
            mat.name = text(field(m, "name", w), w + ".name");
            mat.is_pec = m.value("is_pec", false);
            if (m.contains("relative_permittivity"))
                mat.relative_permittivity = number(m["relative_permittivity"], w + ".relative_permittivity");
            else if (!mat.is_pec)
                throw FormatError("field '" + w + ".relative_permittivity': missing");
            if (m.contains("conductivity"))
                mat.conductivity = number(m["conductivity"], w + ".conductivity");
            if (m.contains("scattering_coefficient"))
                mat.scattering_coefficient = number(m["scattering_coefficient"], w + ".scattering_coefficient");
            try
            {
                mat.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw FormatError("field '" + w + "': " + e.what());
            }
            auto it = std::find_if(mats.begin(), mats.end(), [&](const Material &x) { return x.name == mat.name; });
            if (it != mats.end())
                *it = mat;
            else
                mats.push_back(mat);
        }
    }

    std::vector<Surface> surfaces;
    if (doc.contains("footprints"))
    {
        const json &arr = array(doc["footprints"], "footprints");
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            const std::string w = "footprints[" + std::to_string(i) + "]";
            const json &f = arr[i];
            const json &poly = array(field(f, "polygon", w), w + ".polygon");
            std::vector<Vec2> ring;
            for (std::size_t k = 0; k < poly.size(); ++k)
                ring.push_back(point2(poly[k], w + ".polygon[" + std::to_string(k) + "]"));
            const double height = number(field(f, "height", w), w + ".height");
            if (!(height > 0.0))
                throw FormatError("field '" + w + ".height': must be > 0");
            const std::size_t mat =
                resolve_material(mats, text(field(f, "material", w), w + ".material"), w + ".material");
            const std::string tag = f.contains("tag") ? text(f["tag"], w + ".tag") : "building";
            const double base = f.contains("base") ? number(f["base"], w + ".base") : 0.0;
            std::vector<Surface> walls;
            try
            {
                walls = extrude_footprint(ring, height, mat, tag, base);
            }
            catch (const GeometryError &e)
            {
                throw GeometryError(w + ": " + e.what());
            }
            for (auto &s : walls)
                surfaces.push_back(std::move(s));
        }
    }

    if (doc.contains("obstacles"))
    {
        const json &arr = array(doc["obstacles"], "obstacles");
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            const std::string w = "obstacles[" + std::to_string(i) + "]";
            const json &ob = arr[i];
            const std::string tag = ob.contains("tag") ? text(ob["tag"], w + ".tag") : "obstacle";
            const std::string mat_name = text(field(ob, "material", w), w + ".material");
            const json &surfs = array(field(ob, "surfaces", w), w + ".surfaces");
            for (std::size_t k = 0; k < surfs.size(); ++k)
            {
                const std::string ws = w + ".surfaces[" + std::to_string(k) + "]";
                const json &sj = surfs[k];
                const json &verts = array(field(sj, "vertices", ws), ws + ".vertices");
                std::vector<Vec3> pts;
                for (std::size_t j = 0; j < verts.size(); ++j)
                    pts.push_back(point3(verts[j], ws + ".vertices[" + std::to_string(j) + "]"));
                const std::string mname = sj.contains("material") ? text(sj["material"], ws + ".material") : mat_name;
                const std::string stag = sj.contains("tag") ? text(sj["tag"], ws + ".tag") : tag;
                const std::size_t mat = resolve_material(mats, mname, ws + ".material");
                surfaces.push_back(Surface::make(std::move(pts), mat, stag, ws));
            }
        }
    }

    std::optional<std::size_t> ground_id;
    if (doc.contains("ground") && !doc["ground"].is_null())
    {
        const json &g = doc["ground"];
        const json &verts = array(field(g, "vertices", "ground"), "ground.vertices");
        std::vector<Vec3> pts;
        for (std::size_t j = 0; j < verts.size(); ++j)
            pts.push_back(point3(verts[j], "ground.vertices[" + std::to_string(j) + "]"));
        const std::size_t mat = resolve_material(mats, text(field(g, "material", "ground"), "ground.material"),
                                                 "ground.material");
        Surface s = Surface::make(pts, mat, "ground", "ground");
        if (s.normal().z() < 0.0)
        {
            std::reverse(pts.begin(), pts.end());
            s = Surface::make(std::move(pts), mat, "ground", "ground");
        }
        surfaces.push_back(std::move(s));
        ground_id = surfaces.size() - 1;
    }

    std::optional<Aabb> bounds;
    if (doc.contains("bounds"))
    {
        const json &b = doc["bounds"];
        bounds = Aabb{point3(field(b, "min", "bounds"), "bounds.min"), point3(field(b, "max", "bounds"), "bounds.max")};
    }

    return Scene(std::move(mats), std::move(surfaces), ground_id, origin, bounds);
}

Scene load_scene(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scene file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

std::string serialize_scene(const Scene &scene)
{
    if (scene.ground_id() && *scene.ground_id() + 1 != scene.surfaces().size())
        throw std::invalid_argument("serialize_scene: the ground must be the last surface");
    json doc;
    doc["origin"] = {{"lat", scene.origin().latitude_deg}, {"lon", scene.origin().longitude_deg}};
    if (scene.declared_bounds())
        doc["bounds"] = {{"min", to_json(scene.declared_bounds()->lo)}, {"max", to_json(scene.declared_bounds()->hi)}};

    json mats = json::array();
    for (const auto &m : scene.materials())
        mats.push_back({{"name", m.name},
                        {"relative_permittivity", m.relative_permittivity},
                        {"conductivity", m.conductivity},
                        {"is_pec", m.is_pec},
                        {"scattering_coefficient", m.scattering_coefficient}});
    doc["materials"] = mats;

    // Surfaces are written explicitly so that the reloaded scene is identical,
    // including the ground as the last surface.
    json obstacles = json::array();
    for (std::size_t i = 0; i < scene.surfaces().size(); ++i)
    {
        if (scene.ground_id() && *scene.ground_id() == i)
            continue;
        const Surface &s = scene.surfaces()[i];
        json verts = json::array();
        for (const auto &p : s.vertices())
            verts.push_back(to_json(p));
        obstacles.push_back({{"tag", s.tag()},
                             {"material", scene.materials()[s.material()].name},
                             {"surfaces", json::array({json{{"vertices", verts}}})}});
    }
    doc["obstacles"] = obstacles;

    if (const Surface *g = scene.ground())
    {
        json verts = json::array();
        for (const auto &p : g->vertices())
            verts.push_back(to_json(p));
        doc["ground"] = {{"material", scene.materials()[g->material()].name}, {"vertices", verts}};
    }
    return doc.dump(2);
}

void save_scene(const Scene &scene, const std::filesystem::path &path)
{
    const std::string text = serialize_scene(scene);
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write scene file '" + path.string() + "'");
    out << text << '\n';
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(std::vector<TrajectorySample> samples, double antenna_height)
    : samples_(std::move(samples)), antenna_height_(antenna_height)
{
    if (samples_.empty())
        throw std::invalid_argument("trajectory: no samples");
    if (!(antenna_height_ > 0.0))
        throw std::invalid_argument("trajectory: antenna_height must be > 0");
    if (samples_.size() >= 2)
    {
        const double dt = samples_[1].t - samples_[0].t;
        for (std::size_t i = 1; i < samples_.size(); ++i)
        {
            const double step = samples_[i].t - samples_[i - 1].t;
            if (!(step > 0.0))
                throw std::invalid_argument("trajectory: time must be strictly increasing (row " +
                                            std::to_string(i + 1) + ")");
            if (std::abs(step - dt) > 1e-9)
                throw std::invalid_argument("trajectory: non-uniform time spacing at row " + std::to_string(i + 1));
        }
    }
}

namespace
{
template <class F>
auto interpolate_samples(const std::vector<TrajectorySample> &s, double t, F get)
{
    if (t <= s.front().t || s.size() == 1)
        return Vec3(get(s.front()));
    if (t >= s.back().t)
        return Vec3(get(s.back()));
    auto it = std::upper_bound(s.begin(), s.end(), t, [](double x, const TrajectorySample &p) { return x < p.t; });
    const auto &b = *it;
    const auto &a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return Vec3((1.0 - w) * get(a) + w * get(b));
}
} // namespace

Vec3 Trajectory::antenna_position(double t) const
{
    return interpolate_samples(samples_, t, [](const TrajectorySample &p) { return p.position; }) +
           Vec3(0.0, 0.0, antenna_height_);
}

Vec3 Trajectory::velocity(double t) const
{
    return interpolate_samples(samples_, t, [](const TrajectorySample &p) { return p.velocity; });
}

Trajectory load_trajectory(const std::filesystem::path &path, double antenna_height)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trajectory file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path.string() + ": empty trajectory file");
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line != "t,x,y,z,vx,vy,vz")
        throw FormatError(path.string() + ":1: expected header 't,x,y,z,vx,vy,vz'");

    std::vector<TrajectorySample> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::stringstream ss(line);
        std::string cell;
        double v[7];
        int k = 0;
        while (std::getline(ss, cell, ','))
        {
            if (k >= 7)
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": too many columns");
            try
            {
                std::size_t used = 0;
                v[k] = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                    throw std::invalid_argument(cell);
            }
            catch (const std::exception &)
            {
                throw FormatError(path.string() + ":" + std::to_string(lineno) + ": column " + std::to_string(k + 1) +
                                  " is not a number");
            }
            ++k;
        }
        if (k != 7)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 7 columns");
        samples.push_back({v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}});
    }
    try
    {
        return Trajectory(std::move(samples), antenna_height);
    }
    catch (const std::invalid_argument &e)
    {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_trajectory(const Trajectory &trajectory, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trajectory file '" + path.string() + "'");
    out << "t,x,y,z,vx,vy,vz\n" << std::setprecision(17);
    for (const auto &s : trajectory.samples())
        out << s.t << ',' << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
            << s.velocity.x() << ',' << s.velocity.y() << ',' << s.velocity.z() << '\n';
}

} // namespace v2v
