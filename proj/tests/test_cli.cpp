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


#include "fixtures.hpp"
#include "oracles.hpp"

#include "v2v/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace v2v;
namespace fs = std::filesystem;

namespace
{

const fs::path data_dir = V2V_DATA_DIR;
const std::string fs_config = (data_dir / "free_space" / "config.json").string();

// Runs v2vsim with the given arguments, returning its exit status.
int run(const std::string &args, const fs::path &log)
{
    const std::string cmd = std::string("\"") + V2VSIM_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<fs::path> sorted_files(const fs::path &dir)
{
    std::vector<fs::path> v;
    for (const auto &e : fs::directory_iterator(dir))
        v.push_back(e.path());
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("cli: empty-scene trace is LOS only and reproducible", "[cli]")
{
    const auto dir = fixture::temp_dir("cli_trace");
    const std::string base = "trace --config \"" + fs_config + "\" --duration 0.05 --output_dir ";
    REQUIRE(run(base + "\"" + (dir / "a").string() + "\"", dir / "a.log") == 0);
    REQUIRE(run(base + "\"" + (dir / "b").string() + "\"", dir / "b.log") == 0);
    const auto fa = sorted_files(dir / "a" / "trace");
    const auto fb = sorted_files(dir / "b" / "trace");
    REQUIRE(fa.size() == 7); // six dumps and the snapshots.csv index
    CHECK(fa.back().filename() == "snapshots.csv");
    REQUIRE(fb.size() == fa.size());
    CHECK(slurp(fa.back()) == slurp(fb.back()));
    for (std::size_t i = 0; i + 1 < fa.size(); ++i)
    {
        const std::string text = slurp(fa[i]);
        CHECK(text == slurp(fb[i]));
        std::istringstream in(text);
        std::string line;
        std::vector<std::string> rows;
        std::getline(in, line);
        while (std::getline(in, line))
            if (!line.empty())
                rows.push_back(line);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].find(",los,0,100,") != std::string::npos);
    }
}

TEST_CASE("cli: synthesize, analyze and compare on the free-space scenario", "[cli]")
{
    const auto dir = fixture::temp_dir("cli_free_space");
    const std::string out = (dir / "run").string();
    REQUIRE(run("synthesize --config \"" + fs_config + "\" --duration 1 --write-trace --output_dir \"" + out + "\"",
                dir / "synth.log") == 0);

    const fs::path tensor = dir / "run" / "channel.v2vc";
    TensorReader reader(tensor);
    const auto &h = reader.header();
    CHECK(h.n_time == 10000);
    CHECK(h.n_rx == 1);
    CHECK(h.n_tx == 1);
    CHECK(h.n_bin == 769);
    CHECK(h.axes.carrier == 5.9e9);
    CHECK(h.axes.dbin == 1.0 / 240e6);
    CHECK(h.axes.dt == 100e-6);

    const fs::path metrics = dir / "metrics";
    REQUIRE(run("analyze --config \"" + fs_config + "\" --tensor \"" + tensor.string() + "\" --out \"" +
                    metrics.string() + "\" --trace-dir \"" + (dir / "run" / "trace").string() + "\"",
                dir / "analyze.log") == 0);
    std::vector<std::string> names;
    for (const auto &p : sorted_files(metrics))
        names.push_back(p.filename().string());
    std::vector<std::string> want = analysis_file_names();
    want.push_back("labels.csv");
    std::sort(want.begin(), want.end());
    CHECK(names == want);

    const auto gain = read_metric_csv(metrics / "gain.csv");
    REQUIRE(gain.size() == 100);
    const double friis = oracle::friis_db(5.9e9, 100.0);
    for (std::size_t i = 0; i < gain.size(); ++i)
        CHECK(std::abs(gain.values(Eigen::Index(i), 0) - friis) < 0.1);

    SECTION("in-process analysis of the same file agrees")
    {
        const RunConfig cfg = load_run_config(fs_config);
        const auto r = analyze(read_tensor(tensor), cfg.analysis);
        const auto cli_ds = read_metric_csv(metrics / "delay_spread.csv");
        REQUIRE(r.gain.size() == gain.size());
        for (std::size_t i = 0; i < gain.size(); ++i)
        {
            CHECK(r.gain.values(Eigen::Index(i), 0) == gain.values(Eigen::Index(i), 0));
            CHECK(r.delay_spread.values(Eigen::Index(i), 0) == cli_ds.values(Eigen::Index(i), 0));
        }
    }
    SECTION("compare A with itself gives zero error")
    {
        const fs::path rep = dir / "report";
        REQUIRE(run("compare --a \"" + metrics.string() + "\" --b \"" + metrics.string() + "\" --labels \"" +
                        (metrics / "labels.csv").string() + "\" --out \"" + rep.string() + "\"",
                    dir / "compare.log") == 0);
        const auto report = parse_report_csv(slurp(rep / "report.csv"));
        REQUIRE(!report.empty());
        CHECK(report.front().metric == "gain");
        for (const auto &row : report)
            for (const auto *cell : {&row.stats.los, &row.stats.nlos})
                if (cell->present())
                {
                    CHECK(cell->mu == 0.0);
                    CHECK(cell->sigma == 0.0);
                }
        CHECK(report.front().stats.los.n == 100);
        CHECK_FALSE(report.front().stats.nlos.present());
    }
}

TEST_CASE("cli: exit codes", "[cli]")
{
    const auto dir = fixture::temp_dir("cli_errors");
    SECTION("unknown option")
    {
        CHECK(run("trace --no-such-flag 1", dir / "log") == 2);
    }
    SECTION("unknown config key")
    {
        std::ofstream(dir / "bad.json") << R"({"scene": "x.json", "no_such_key": 1})";
        CHECK(run("trace --config \"" + (dir / "bad.json").string() + "\"", dir / "log") == 2);
    }
    SECTION("out-of-range value")
    {
        CHECK(run("trace --config \"" + fs_config + "\" --bandwidth -5", dir / "log") == 2);
    }
    SECTION("malformed tensor")
    {
        std::ofstream(dir / "junk.v2vc", std::ios::binary) << "not a tensor file at all";
        CHECK(run("analyze --config \"" + fs_config + "\" --tensor \"" + (dir / "junk.v2vc").string() +
                      "\" --out \"" + (dir / "m").string() + "\"",
                  dir / "log") == 3);
    }
    SECTION("malformed scene")
    {
        std::ofstream(dir / "scene.json") << "{ \"materials\": [ ";
        CHECK(run("scene-validate \"" + (dir / "scene.json").string() + "\"", dir / "log") == 3);
    }
    SECTION("scene-validate on the bundled scene")
    {
        CHECK(run("scene-validate \"" + (data_dir / "intersection_scene.json").string() + "\"", dir / "log") == 0);
        CHECK(slurp(dir / "log").find("surfaces") != std::string::npos);
    }
}
