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


// v2vsim: trace, synthesize, analyze and compare V2V channel runs.

#include "v2v/errors.hpp"
#include "v2v/pipeline.hpp"
#include "v2v/tensor_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

using namespace v2v;

namespace
{

constexpr int exit_config = 2;
constexpr int exit_data = 3;

struct Common
{
    std::string config_path;
    std::map<std::string, std::string> flags;
};

void add_config_flags(CLI::App *cmd, Common &c)
{
    cmd->add_option("--config", c.config_path, "run configuration (JSON)");
    for (const auto &k : config_keys())
        cmd->add_option("--" + k.name, c.flags[k.name], k.help);
}

RunConfig resolve_config(CLI::App *cmd, const Common &c)
{
    RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
    for (const auto &k : config_keys())
        if (cmd->get_option("--" + k.name)->count() > 0)
            apply_config_value(cfg, k.name, c.flags.at(k.name), std::filesystem::current_path());
    cfg.validate();
    return cfg;
}

int run_trace(CLI::App *cmd, const Common &c)
{
    const Scenario s = load_scenario(resolve_config(cmd, c));
    const auto snaps = trace_run(s);
    const auto dir = s.config.output_dir / "trace";
    write_trace_dir(snaps, dir);
    std::size_t n = 0;
    for (const auto &sn : snaps)
        n += sn.paths.size();
    std::fprintf(stderr, "traced %zu snapshots, %zu paths -> %s\n", snaps.size(), n, dir.string().c_str());
    return 0;
}

int run_synthesize(CLI::App *cmd, const Common &c, bool write_trace)
{
    const Scenario s = load_scenario(resolve_config(cmd, c));
    const auto snaps = trace_run(s);
    if (write_trace)
        write_trace_dir(snaps, s.config.output_dir / "trace");
    std::filesystem::create_directories(s.config.output_dir);
    const auto path = s.config.output_dir / "channel.v2vc";
    TensorWriter w(path, run_tensor_header(s));
    const auto stats = synthesize_run(s, snaps, [&](std::size_t, double, std::span<const cplx> slice) {
        w.write_slice(slice);
    });
    w.finish();
    if (stats.dropped_delay_overflow > 0)
        std::fprintf(stderr, "warning: %zu path contributions beyond the last delay bin were dropped\n",
                     stats.dropped_delay_overflow);
    std::fprintf(stderr, "wrote %zu time steps -> %s\n", w.slices_written(), path.string().c_str());
    return 0;
}

int run_analyze(CLI::App *cmd, const Common &c, const std::string &tensor, std::string out, const std::string &trace_dir)
{
    const RunConfig cfg = resolve_config(cmd, c);
    if (out.empty())
        out = (cfg.output_dir / "metrics").string();
    TensorReader reader(tensor);
    const auto &h = reader.header();
    if (h.domain != Domain::delay)
        throw FormatError(tensor + ": analyze expects a delay-domain tensor");
    WindowAnalyzer an(cfg.analysis, h.n_rx, h.n_tx, h.n_bin, h.axes);
    std::vector<cplx> slice(h.slice_size());
    while (reader.read_slice(slice))
        an.push(slice);
    const auto result = an.finish();
    write_analysis(result, out);
    if (!trace_dir.empty())
    {
        const auto labels = segment_los_nlos(read_trace_dir(trace_dir), result.gain.t,
                                             window_center_offset(cfg.analysis.n_avg, h.axes.dt));
        write_labels_csv(labels, std::filesystem::path(out) / "labels.csv");
    }
    std::fprintf(stderr, "analyzed %zu windows -> %s\n", result.gain.size(), out.c_str());
    return 0;
}

int run_compare(const std::string &a, const std::string &b, const std::string &labels, const std::string &out,
                bool sample)
{
    const auto report = compare_metric_dirs(a, b, read_labels_csv(labels), sample);
    const std::string text = render_report_text(report);
    std::cout << text;
    if (!out.empty())
    {
        std::filesystem::create_directories(out);
        std::ofstream(std::filesystem::path(out) / "report.txt") << text;
        std::ofstream(std::filesystem::path(out) / "report.csv") << render_report_csv(report);
    }
    return 0;
}

int run_scene_validate(const std::string &path)
{
    const Scene s = load_scene(path);
    const auto &b = s.bounding_box();
    std::printf("scene %s: %zu surfaces, %zu materials, ground %s\n", path.c_str(), s.surfaces().size(),
                s.materials().size(), s.ground() ? "yes" : "no");
    std::printf("bounding box [%g %g %g] .. [%g %g %g]\n", b.lo.x(), b.lo.y(), b.lo.z(), b.hi.x(), b.hi.y(),
                b.hi.z());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"v2vsim - ray-optical V2V channel simulation and analysis"};
    app.require_subcommand(1);

    Common trace_opts, synth_opts, analyze_opts;
    auto *trace = app.add_subcommand("trace", "trace propagation paths per coarse snapshot");
    add_config_flags(trace, trace_opts);

    bool write_trace = false;
    auto *synth = app.add_subcommand("synthesize", "trace and synthesize the channel tensor");
    add_config_flags(synth, synth_opts);
    synth->add_flag("--write-trace", write_trace, "also write the path dumps");

    std::string tensor, metrics_out, trace_dir;
    auto *analyze = app.add_subcommand("analyze", "compute channel metrics from a tensor file");
    add_config_flags(analyze, analyze_opts);
    analyze->add_option("--tensor", tensor, "channel tensor file")->required();
    analyze->add_option("--out", metrics_out, "metric output directory (default <output_dir>/metrics)");
    analyze->add_option("--trace-dir", trace_dir, "path dumps for LOS/NLOS labels");

    std::string dir_a, dir_b, labels, report_out;
    bool sample = false;
    auto *compare = app.add_subcommand("compare", "error statistics between two metric directories");
    compare->add_option("--a", dir_a, "metrics directory A (e.g. reference)")->required();
    compare->add_option("--b", dir_b, "metrics directory B (e.g. simulation)")->required();
    compare->add_option("--labels", labels, "label file t_s,label")->required();
    compare->add_option("--out", report_out, "report directory");
    compare->add_flag("--sample-sigma", sample, "divide by n-1 instead of n");

    std::string scene_path;
    auto *validate = app.add_subcommand("scene-validate", "load and check a scene file");
    validate->add_option("scene", scene_path, "scene file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try
    {
        if (*trace)
            return run_trace(trace, trace_opts);
        if (*synth)
            return run_synthesize(synth, synth_opts, write_trace);
        if (*analyze)
            return run_analyze(analyze, analyze_opts, tensor, metrics_out, trace_dir);
        if (*compare)
            return run_compare(dir_a, dir_b, labels, report_out, sample);
        if (*validate)
            return run_scene_validate(scene_path);
    }
    catch (const ConfigError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const std::invalid_argument &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_data;
    }
    return 0;
}
