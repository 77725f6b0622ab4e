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

#include "v2v/antenna.hpp"
#include "v2v/channel.hpp"
#include "v2v/compare.hpp"
#include "v2v/metrics.hpp"
#include "v2v/raytracer.hpp"
#include "v2v/scene.hpp"
#include "v2v/tensor_io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace v2v
{

struct RunConfig
{
    std::filesystem::path scene;
    std::filesystem::path tx_trajectory;
    std::filesystem::path rx_trajectory;
    std::filesystem::path pattern_file; // replaces the cardioid element pattern when set
    std::filesystem::path output_dir = "v2v_out";

    double tx_antenna_height = 1.73;
    double rx_antenna_height = 1.73;
    std::string tx_array = "sharkfin"; // sharkfin | isotropic
    std::string rx_array = "sharkfin";
    double element_spacing = 0.05;

    SimConfig sim;
    TracerConfig tracer;
    std::string time_grid = "fine"; // fine | sounder

    AnalysisConfig analysis;
    double noise_power_per_bin = 0.0;
    std::uint64_t noise_seed = 1;

    std::size_t workers = 0; // 0: V2V_WORKERS or hardware concurrency
    double start_time = std::numeric_limits<double>::quiet_NaN();
    double duration = std::numeric_limits<double>::quiet_NaN();

    // Throws std::invalid_argument for out-of-range values.
    void validate() const;
};

enum class ConfigKind
{
    path,
    number,
    integer,
    boolean,
    text
};

struct ConfigKey
{
    std::string name;
    ConfigKind kind;
    std::string help;
};

// Every key accepted in a config file; the CLI exposes each as --<name>.
const std::vector<ConfigKey> &config_keys();

// Sets one key from its textual value. Relative paths are resolved against
// base_dir. Throws ConfigError for unknown keys or malformed values.
void apply_config_value(RunConfig &config, const std::string &key, const std::string &value,
                        const std::filesystem::path &base_dir);

RunConfig parse_run_config(const std::string &json_text, const std::filesystem::path &base_dir);
RunConfig load_run_config(const std::filesystem::path &path);

std::size_t default_workers();

// Runs f(0..n-1) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> &f);

// Scene, trajectories and arrays resolved from a RunConfig.
struct Scenario
{
    RunConfig config;
    Scene scene;
    Trajectory tx;
    Trajectory rx;
    ArrayLayout tx_array;
    ArrayLayout rx_array;

    double start() const;
    double end() const;
    std::vector<double> coarse_times() const;
    std::vector<double> output_times() const;
    double output_dt() const;
};

Scenario load_scenario(const RunConfig &config);
// Builds a scenario from in-memory parts (config paths are ignored).
Scenario make_scenario(const RunConfig &config, Scene scene, Trajectory tx, Trajectory rx);

std::vector<Snapshot> trace_run(const Scenario &s);

using SliceSink = std::function<void(std::size_t index, double t, std::span<const cplx> slice)>;

struct SynthesisOptions
{
    bool add_noise = true;
    // round slices to complex64 (file precision) before handing them out
    bool quantize = false;
};

// Delay-domain slices on the output grid, in time order, noise added.
SynthesisStats synthesize_run(const Scenario &s, const std::vector<Snapshot> &coarse, const SliceSink &sink,
                              SynthesisOptions options = {});

TensorHeader run_tensor_header(const Scenario &s);

// Writes <dir>/paths_NNNNN.csv, one file per coarse snapshot.
void write_trace_dir(const std::vector<Snapshot> &snapshots, const std::filesystem::path &dir);
// Reads path dumps back (kind, order, length, delay and points; amplitudes are not stored).
std::vector<Snapshot> read_trace_dir(const std::filesystem::path &dir);

// The metric CSV set written by the analyze command.
const std::vector<std::string> &analysis_file_names();
void write_analysis(const AnalysisResult &r, const std::filesystem::path &dir);

} // namespace v2v
