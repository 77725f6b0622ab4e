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


#include "v2v/pipeline.hpp"

#include "v2v/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace v2v
{

namespace
{
using K = ConfigKind;

double to_number(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument("trailing");
        return d;
    }
    catch (const std::exception &)
    {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long to_integer(const std::string &key, const std::string &v)
{
    const double d = to_number(key, v);
    if (d != std::floor(d) || d < 0)
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    return static_cast<long long>(d);
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}
} // namespace

const std::vector<ConfigKey> &config_keys()
{
    static const std::vector<ConfigKey> keys = {
        {"scene", K::path, "scene file (JSON)"},
        {"tx_trajectory", K::path, "TX trajectory CSV"},
        {"rx_trajectory", K::path, "RX trajectory CSV"},
        {"pattern_file", K::path, "element pattern CSV replacing the default cardioid"},
        {"output_dir", K::path, "output directory"},
        {"tx_antenna_height", K::number, "TX antenna height above the track [m]"},
        {"rx_antenna_height", K::number, "RX antenna height above the track [m]"},
        {"tx_array", K::text, "TX array: sharkfin or isotropic"},
        {"rx_array", K::text, "RX array: sharkfin or isotropic"},
        {"element_spacing", K::number, "sharkfin element spacing [m]"},
        {"carrier_frequency", K::number, "carrier frequency [Hz]"},
        {"bandwidth", K::number, "bandwidth [Hz]"},
        {"n_freq_bins", K::integer, "number of frequency / delay bins"},
        {"snapshot_dt", K::number, "sounder snapshot spacing [s]"},
        {"coarse_trace_dt", K::number, "ray tracing interval [s]"},
        {"fine_dt", K::number, "interpolation step [s]"},
        {"time_grid", K::text, "output time grid: fine or sounder"},
        {"max_order", K::integer, "maximum specular reflection order (1..4)"},
        {"tile_size", K::number, "diffuse tile edge length [m]"},
        {"enable_diffuse", K::boolean, "trace Lambertian diffuse paths"},
        {"cull_db", K::number, "drop diffuse paths this many dB below the strongest path"},
        {"n_avg", K::integer, "averaging window length [time steps]"},
        {"stride", K::integer, "window stride [time steps], 0 = n_avg"},
        {"noise_threshold", K::boolean, "zero APDP bins below noise floor + 3 dB"},
        {"eigen_mode", K::text, "averaged or per_sample"},
        {"noise_power_per_bin", K::number, "receiver noise power per delay bin (linear)"},
        {"noise_seed", K::integer, "noise generator seed"},
        {"workers", K::integer, "worker threads, 0 = default"},
        {"start_time", K::number, "run start [s]"},
        {"duration", K::number, "run length [s]"},
    };
    return keys;
}

void apply_config_value(RunConfig &c, const std::string &key, const std::string &v,
                        const std::filesystem::path &base_dir)
{
    auto path = [&]() {
        std::filesystem::path p(v);
        return p.is_absolute() || base_dir.empty() ? p : (base_dir / p).lexically_normal();
    };
    auto num = [&]() { return to_number(key, v); };
    auto integer = [&]() { return to_integer(key, v); };

    if (key == "scene")
        c.scene = path();
    else if (key == "tx_trajectory")
        c.tx_trajectory = path();
    else if (key == "rx_trajectory")
        c.rx_trajectory = path();
    else if (key == "pattern_file")
        c.pattern_file = v.empty() ? std::filesystem::path() : path();
    else if (key == "output_dir")
        c.output_dir = path();
    else if (key == "tx_antenna_height")
        c.tx_antenna_height = num();
    else if (key == "rx_antenna_height")
        c.rx_antenna_height = num();
    else if (key == "tx_array")
        c.tx_array = v;
    else if (key == "rx_array")
        c.rx_array = v;
    else if (key == "element_spacing")
        c.element_spacing = num();
    else if (key == "carrier_frequency")
        c.sim.carrier_frequency = num();
    else if (key == "bandwidth")
        c.sim.bandwidth = num();
    else if (key == "n_freq_bins")
        c.sim.n_freq_bins = std::size_t(integer());
    else if (key == "snapshot_dt")
        c.sim.snapshot_dt = num();
    else if (key == "coarse_trace_dt")
        c.sim.coarse_trace_dt = num();
    else if (key == "fine_dt")
        c.sim.fine_dt = num();
    else if (key == "time_grid")
        c.time_grid = v;
    else if (key == "max_order")
        c.tracer.max_order = int(integer());
    else if (key == "tile_size")
        c.tracer.tile_size = num();
    else if (key == "enable_diffuse")
        c.tracer.enable_diffuse = to_bool(key, v);
    else if (key == "cull_db")
        c.tracer.cull_db = num();
    else if (key == "n_avg")
        c.analysis.n_avg = std::size_t(integer());
    else if (key == "stride")
        c.analysis.stride = std::size_t(integer());
    else if (key == "noise_threshold")
        c.analysis.noise_threshold = to_bool(key, v);
    else if (key == "eigen_mode")
    {
        if (v == "averaged")
            c.analysis.eigen_mode = EigenMode::averaged;
        else if (v == "per_sample")
            c.analysis.eigen_mode = EigenMode::per_sample;
        else
            throw ConfigError("config key 'eigen_mode': expected averaged or per_sample, got '" + v + "'");
    }
    else if (key == "noise_power_per_bin")
        c.noise_power_per_bin = num();
    else if (key == "noise_seed")
        c.noise_seed = std::uint64_t(integer());
    else if (key == "workers")
        c.workers = std::size_t(integer());
    else if (key == "start_time")
        c.start_time = num();
    else if (key == "duration")
        c.duration = num();
    else
        throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const
{
    sim.validate();
    if (tracer.max_order < 1)
        throw std::invalid_argument("max_order must be >= 1");
    if (tracer.max_order > max_specular_order)
        throw ComplexityError("max_order above the cap of " + std::to_string(max_specular_order));
    if (!(tracer.tile_size > 0.0))
        throw std::invalid_argument("tile_size must be > 0");
    if (!(tracer.cull_db >= 0.0))
        throw std::invalid_argument("cull_db must be >= 0");
    if (!(tx_antenna_height > 0.0) || !(rx_antenna_height > 0.0))
        throw std::invalid_argument("antenna heights must be > 0");
    for (const auto &a : {tx_array, rx_array})
        if (a != "sharkfin" && a != "isotropic")
            throw std::invalid_argument("array must be sharkfin or isotropic, got '" + a + "'");
    if (!(element_spacing >= 0.0) || element_spacing > 0.6)
        throw std::invalid_argument("element_spacing must be in [0, 0.6] m");
    if (time_grid != "fine" && time_grid != "sounder")
        throw std::invalid_argument("time_grid must be fine or sounder");
    if (analysis.n_avg < 2)
        throw std::invalid_argument("n_avg must be >= 2");
    if (!(noise_power_per_bin >= 0.0) || !std::isfinite(noise_power_per_bin))
        throw std::invalid_argument("noise_power_per_bin must be >= 0");
    if (!std::isnan(duration) && !(duration > 0.0))
        throw std::invalid_argument("duration must be > 0");
}

RunConfig parse_run_config(const std::string &text, const std::filesystem::path &base_dir)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    RunConfig c;
    for (const auto &[key, val] : j.items())
    {
        std::string v;
        if (val.is_string())
            v = val.get<std::string>();
        else if (val.is_boolean())
            v = val.get<bool>() ? "true" : "false";
        else if (val.is_number_integer() || val.is_number_unsigned())
            v = std::to_string(val.get<long long>());
        else if (val.is_number())
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", val.get<double>());
            v = buf;
        }
        else
            throw ConfigError("config key '" + key + "': expected a scalar value");
        apply_config_value(c, key, v, base_dir);
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path.parent_path());
}

std::size_t default_workers()
{
    if (const char *env = std::getenv("V2V_WORKERS"))
    {
        char *end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0)
            return std::size_t(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> &f)
{
    if (workers == 0)
        workers = default_workers();
    workers = std::min(workers, n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&]() {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                f(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(mu);
                if (!err)
                    err = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (auto &t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------

namespace
{
ArrayLayout make_array(const std::string &kind, const RunConfig &c, std::shared_ptr<const AntennaPattern> pattern)
{
    if (kind == "isotropic")
        return isotropic_array();
    if (!pattern)
        return default_sharkfin_array(5.0, 2.0, c.element_spacing);
    const char *labels[4] = {"left", "back", "front", "right"};
    const double boresight[4] = {90.0, 180.0, 0.0, 270.0};
    std::vector<ArrayElement> e;
    for (int i = 0; i < 4; ++i)
        e.push_back({labels[i], Vec3((1.5 - i) * c.element_spacing, 0.0, 0.0), boresight[i], pattern});
    return ArrayLayout(std::move(e));
}
} // namespace

Scenario make_scenario(const RunConfig &config, Scene scene, Trajectory tx, Trajectory rx)
{
    config.validate();
    Scenario s{config, std::move(scene), std::move(tx), std::move(rx), {}, {}};
    s.config.tracer.frequency = s.config.sim.carrier_frequency;
    std::shared_ptr<const AntennaPattern> pattern;
    if (!config.pattern_file.empty())
        pattern = std::make_shared<const AntennaPattern>(load_pattern(config.pattern_file));
    s.tx_array = make_array(config.tx_array, config, pattern);
    s.rx_array = make_array(config.rx_array, config, pattern);
    if (!(s.end() > s.start()))
        throw std::invalid_argument("run interval is empty");
    const double slack = 1e-9;
    if (s.start() < std::max(s.tx.start(), s.rx.start()) - slack ||
        s.end() > std::min(s.tx.end(), s.rx.end()) + slack)
        throw std::invalid_argument("run interval exceeds the trajectory time range");
    if (s.coarse_times().size() < 2)
        throw std::invalid_argument("run shorter than one coarse_trace_dt");
    return s;
}

Scenario load_scenario(const RunConfig &config)
{
    config.validate();
    for (const auto &[name, p] : {std::pair{"scene", config.scene}, std::pair{"tx_trajectory", config.tx_trajectory},
                                  std::pair{"rx_trajectory", config.rx_trajectory}})
    {
        if (p.empty())
            throw ConfigError(std::string("config key '") + name + "' is required");
        if (!std::filesystem::exists(p))
            throw ConfigError(std::string("config key '") + name + "': file not found: " + p.string());
    }
    if (!config.pattern_file.empty() && !std::filesystem::exists(config.pattern_file))
        throw ConfigError("config key 'pattern_file': file not found: " + config.pattern_file.string());
    return make_scenario(config, load_scene(config.scene), load_trajectory(config.tx_trajectory, config.tx_antenna_height),
                         load_trajectory(config.rx_trajectory, config.rx_antenna_height));
}

double Scenario::start() const
{
    return std::isnan(config.start_time) ? std::max(tx.start(), rx.start()) : config.start_time;
}

double Scenario::end() const
{
    return std::isnan(config.duration) ? std::min(tx.end(), rx.end()) : start() + config.duration;
}

std::vector<double> Scenario::coarse_times() const
{
    const double dt = config.sim.coarse_trace_dt;
    const std::size_t n = std::size_t(std::floor((end() - start()) / dt + 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        t[i] = start() + double(i) * dt;
    return t;
}

double Scenario::output_dt() const
{
    return config.time_grid == "sounder" ? config.sim.snapshot_dt : config.sim.fine_dt;
}

std::vector<double> Scenario::output_times() const
{
    const auto coarse = coarse_times();
    const double span = coarse.back() - coarse.front();
    const double dt = output_dt();
    const std::size_t n = std::size_t(std::floor(span / dt - 1e-9)) + 1;
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = start() + double(k) * dt;
    return t;
}

std::vector<Snapshot> trace_run(const Scenario &s)
{
    const Tracer tracer(s.scene, s.config.tracer);
    const auto times = s.coarse_times();
    std::vector<Snapshot> out(times.size());
    parallel_for(times.size(), s.config.workers, [&](std::size_t i) {
        out[i].t = times[i];
        out[i].paths = tracer.trace(s.tx.antenna_position(times[i]), s.rx.antenna_position(times[i]));
    });
    return out;
}

SynthesisStats synthesize_run(const Scenario &s, const std::vector<Snapshot> &coarse, const SliceSink &sink,
                              SynthesisOptions options)
{
    const SnapshotInterpolator ip(coarse);
    const auto times = s.output_times();
    const std::size_t workers = s.config.workers == 0 ? default_workers() : s.config.workers;
    const std::size_t chunk = 32 * workers;
    NoiseSource noise(options.add_noise ? s.config.noise_power_per_bin : 0.0, s.config.noise_seed);

    SynthesisStats total;
    std::vector<ChannelSlice> slices;
    std::vector<SynthesisStats> stats;
    for (std::size_t base = 0; base < times.size(); base += chunk)
    {
        const std::size_t n = std::min(chunk, times.size() - base);
        slices.assign(n, ChannelSlice());
        stats.assign(n, SynthesisStats());
        parallel_for(n, workers, [&](std::size_t i) {
            const double t = times[base + i];
            const ArrayPose tx{&s.tx_array, heading_from_velocity(s.tx.velocity(t))};
            const ArrayPose rx{&s.rx_array, heading_from_velocity(s.rx.velocity(t))};
            slices[i] = synthesize_cir(ip.at(t), tx, rx, s.config.sim, &stats[i]);
        });
        for (std::size_t i = 0; i < n; ++i)
        {
            auto &d = slices[i].data();
            noise.add_to(d);
            if (options.quantize)
                quantize_complex64(d);
            total.paths += stats[i].paths;
            total.dropped_delay_overflow += stats[i].dropped_delay_overflow;
            sink(base + i, times[base + i], d);
        }
    }
    return total;
}

TensorHeader run_tensor_header(const Scenario &s)
{
    TensorHeader h;
    h.domain = Domain::delay;
    h.n_rx = s.rx_array.size();
    h.n_tx = s.tx_array.size();
    h.n_bin = s.config.sim.n_freq_bins;
    h.n_time = s.output_times().size();
    h.axes = {s.start(), s.output_dt(), 0.0, s.config.sim.delay_resolution(), s.config.sim.carrier_frequency};
    return h;
}

// ---------------------------------------------------------------------------

void write_trace_dir(const std::vector<Snapshot> &snapshots, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    int max_int = 0;
    for (const auto &s : snapshots)
        for (const auto &p : s.paths)
            max_int = std::max(max_int, int(p.interactions.size()));
    std::ofstream index(dir / "snapshots.csv");
    if (!index)
        throw std::runtime_error("cannot write '" + (dir / "snapshots.csv").string() + "'");
    index << "index,t_s,n_paths\n";
    char name[32], buf[40];
    for (std::size_t i = 0; i < snapshots.size(); ++i)
    {
        std::snprintf(name, sizeof name, "paths_%05zu.csv", i);
        std::ofstream out(dir / name);
        if (!out)
            throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        write_path_dump_header(out, max_int);
        write_path_dump(out, snapshots[i].t, snapshots[i].paths);
        std::snprintf(buf, sizeof buf, "%.17g", snapshots[i].t);
        index << i << ',' << buf << ',' << snapshots[i].paths.size() << '\n';
    }
}

std::vector<Snapshot> read_trace_dir(const std::filesystem::path &dir)
{
    const auto index_path = dir / "snapshots.csv";
    std::ifstream index(index_path);
    if (!index)
        throw std::runtime_error("cannot open '" + index_path.string() + "'");
    std::string line;
    std::getline(index, line);
    if (line.rfind("index,t_s,n_paths", 0) != 0)
        throw FormatError(index_path.string() + ":1: expected header index,t_s,n_paths");
    std::vector<Snapshot> out;
    while (std::getline(index, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> cells;
        while (std::getline(ss, f, ','))
            cells.push_back(f);
        if (cells.size() != 3)
            throw FormatError(index_path.string() + ": malformed row '" + line + "'");
        Snapshot s;
        const std::size_t i = std::stoul(cells[0]);
        s.t = std::stod(cells[1]);
        char name[32];
        std::snprintf(name, sizeof name, "paths_%05zu.csv", i);
        std::ifstream in(dir / name);
        if (!in)
            throw std::runtime_error("cannot open '" + (dir / name).string() + "'");
        std::string row;
        std::getline(in, row);
        while (std::getline(in, row))
        {
            if (row.empty())
                continue;
            std::stringstream rs(row);
            std::vector<std::string> c;
            while (std::getline(rs, f, ','))
                c.push_back(f);
            if (c.size() < 7)
                throw FormatError((dir / name).string() + ": malformed row");
            PropagationPath p;
            p.kind = c[1] == "los" ? PathKind::los : c[1] == "specular" ? PathKind::specular : PathKind::diffuse;
            if (c[1] != "los" && c[1] != "specular" && c[1] != "diffuse")
                throw FormatError((dir / name).string() + ": unknown path kind '" + c[1] + "'");
            p.order = std::stoi(c[2]);
            p.length = std::stod(c[3]);
            p.delay = std::stod(c[4]);
            const double a = std::sqrt(std::pow(10.0, std::stod(c[5]) / 10.0));
            p.amplitude = Eigen::Matrix2cd::Identity() * a;
            const std::size_t n = std::stoul(c[6]);
            if (c.size() < 7 + 3 * n)
                throw FormatError((dir / name).string() + ": missing interaction points");
            for (std::size_t k = 0; k < n; ++k)
                p.interactions.push_back(
                    {0, Vec3(std::stod(c[7 + 3 * k]), std::stod(c[8 + 3 * k]), std::stod(c[9 + 3 * k])), -1});
            s.paths.push_back(std::move(p));
        }
        if (s.paths.size() != std::stoul(cells[2]))
            throw FormatError((dir / name).string() + ": path count disagrees with snapshots.csv");
        out.push_back(std::move(s));
    }
    return out;
}

const std::vector<std::string> &analysis_file_names()
{
    static const std::vector<std::string> names = {"gain.csv",        "delay_spread.csv",   "doppler_spread.csv",
                                                   "eigenvalues.csv", "correlation_tx.csv", "correlation_rx.csv",
                                                   "apdp.csv",        "dsd.csv"};
    return names;
}

void write_analysis(const AnalysisResult &r, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    write_metric_csv(r.gain, dir / "gain.csv");
    write_metric_csv(r.delay_spread, dir / "delay_spread.csv");
    write_metric_csv(r.doppler_spread, dir / "doppler_spread.csv");
    write_metric_csv(r.eigenvalues, dir / "eigenvalues.csv");
    write_metric_csv(r.correlation_tx.magnitudes(), dir / "correlation_tx.csv");
    write_metric_csv(r.correlation_rx.magnitudes(), dir / "correlation_rx.csv");
    write_apdp_csv(r.apdp, dir / "apdp.csv");
    write_dsd_csv(r.dsd, dir / "dsd.csv");
}

} // namespace v2v
