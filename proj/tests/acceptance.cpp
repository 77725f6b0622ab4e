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


// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "v2v/compare.hpp"
#include "v2v/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <sys/wait.h>

using namespace v2v;

namespace
{

constexpr double f0 = 5.9e9;
constexpr double c0 = 299792458.0;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Trajectory line(const Vec3 &p0, const Vec3 &v, double t_end, double height)
{
    std::vector<TrajectorySample> s;
    const std::size_t n = std::size_t(std::ceil(t_end / 0.01 - 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
    {
        const double t = 0.01 * double(i);
        s.push_back({t, p0 + v * t, v});
    }
    return Trajectory(std::move(s), height);
}

// Streams a scenario through synthesis into the window analyzer.
AnalysisResult run_pipeline(const Scenario &s, const std::vector<Snapshot> &coarse)
{
    const TensorHeader h = run_tensor_header(s);
    WindowAnalyzer an(s.config.analysis, h.n_rx, h.n_tx, h.n_bin, h.axes);
    synthesize_run(s, coarse, [&](std::size_t, double, std::span<const cplx> slice) { an.push(slice); },
                   {.add_noise = true, .quantize = true});
    return an.finish();
}

// 1. LOS-only free-space run through the whole pipeline.
Outcome free_space()
{
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_run_config(V2V_DATA_DIR "/free_space/config.json");
    const Scenario s = load_scenario(cfg);
    const auto r = run_pipeline(s, trace_run(s));
    const double want = oracle::friis_db(f0, 100.0);
    double worst = 0.0;
    for (Eigen::Index w = 0; w < r.gain.values.rows(); ++w)
        worst = std::max(worst, std::abs(r.gain.values(w, 0) - want));
    const double dt = seconds_since(t0);
    return {r.gain.size() > 0 && worst < 0.1 && dt < 5.0,
            fmt("%zu windows, Friis %.4f dB, max |error| %.2e dB, %.2f s", r.gain.size(), want, worst, dt)};
}

// 2. Two-ray interference over a PEC ground, vertical polarization.
Outcome two_ray()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Scene ground = fixture::pec_ground(1000.0);
    TracerConfig tc;
    tc.frequency = f0;
    tc.enable_diffuse = false; // the analytic model has no diffuse term
    const Tracer tracer(ground, tc);
    const ArrayLayout iso = isotropic_array();
    SimConfig sim;
    double worst = 0.0;
    int samples = 0;
    bool two_paths = true;
    for (int d = 10; d <= 200; ++d)
    {
        const auto paths = tracer.trace({0, 0, 1.5}, {double(d), 0, 1.5});
        two_paths = two_paths && paths.size() == 2;
        const double g = to_db(narrowband_gain(synthesize_cir(paths, {&iso, 0.0}, {&iso, 0.0}, sim)));
        worst = std::max(worst, std::abs(g - oracle::two_ray_db(f0, d, 1.5, 1.5, 1.0)));
        ++samples;
    }
    const double dt = seconds_since(t0);
    return {two_paths && worst <= 0.5 && dt < 30.0,
            fmt("%d distances, max |error| %.2e dB, %.2f s", samples, worst, dt)};
}

// 3. Two-wall PEC canyon against the image lattice.
Outcome canyon()
{
    fixture::Gen g(3);
    const double w = 16.0;
    const Scene scene = fixture::pec_canyon(w, 2000.0, 200.0);
    double worst = 0.0;
    bool counts = true;
    const int cases = 100;
    for (int k = 0; k < cases; ++k)
    {
        const Vec3 tx(g.uniform(-100, 100), g.uniform(-7, 7), g.uniform(0.5, 3));
        const Vec3 rx(g.uniform(-100, 100), g.uniform(-7, 7), g.uniform(0.5, 3));
        std::vector<double> want;
        for (int n : {-2, -1, 1, 2})
        {
            const double yn = n * w + (n % 2 == 0 ? 1.0 : -1.0) * tx.y();
            want.push_back(Vec3(rx.x() - tx.x(), rx.y() - yn, rx.z() - tx.z()).norm());
        }
        std::sort(want.begin(), want.end());
        std::vector<double> got;
        for (const auto &p : image_method_specular(scene, tx, rx, 2, f0))
            got.push_back(p.length);
        std::sort(got.begin(), got.end());
        if (got.size() != want.size())
        {
            counts = false;
            continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    return {counts && worst <= 1e-9, fmt("%d geometries, counts %s, max |length error| %.2e m", cases,
                                         counts ? "equal" : "DIFFER", worst)};
}

// 4. Delay and Doppler spreads against the pairwise-difference oracle.
Outcome spreads()
{
    fixture::Gen g(4);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k)
    {
        const std::size_t n = 8 + g.index(762);
        std::vector<double> p(n, 0.0), axis(n);
        for (auto &v : p)
            if (g.uniform(0, 1) < 0.2)
                v = std::pow(10.0, g.uniform(-6, 0));
        p[g.index(n)] = 1.0;
        double got;
        if (k % 2 == 0)
        {
            Apdp a;
            a.tau0 = -double(n / 2) / 240e6 * g.uniform(0, 1);
            a.dtau = 1.0 / 240e6;
            a.t = {0.0};
            a.values = Eigen::Map<Eigen::RowVectorXd>(p.data(), Eigen::Index(n));
            for (std::size_t b = 0; b < n; ++b)
                axis[b] = a.delay(b);
            got = rms_delay_spread(a).values(0, 0);
        }
        else
        {
            Dsd d;
            d.nu = doppler_axis(n, 307.2e-6);
            d.t = {0.0};
            d.values = Eigen::Map<Eigen::RowVectorXd>(p.data(), Eigen::Index(n));
            axis = d.nu;
            got = rms_doppler_spread(d).values(0, 0);
        }
        const double want = oracle::spread(p, axis);
        worst = std::max(worst, std::abs(got - want) / want);
    }

    bool exact = true;
    for (std::size_t k = 1; k <= 50; ++k)
    {
        // single tap
        Apdp a;
        a.dtau = std::ldexp(1.0, -28);
        a.t = {0.0};
        a.values = Eigen::RowVectorXd::Zero(128);
        a.values(0, Eigen::Index(k)) = 0.37;
        exact = exact && rms_delay_spread(a).values(0, 0) == 0.0;
        // symmetric pair at m -+ k on a dyadic delay grid
        a.values.setZero();
        a.values(0, Eigen::Index(60 - k % 60)) = 2.5;
        a.values(0, Eigen::Index(60 + k % 60)) = 2.5;
        exact = exact && rms_delay_spread(a).values(0, 0) == double(k % 60) * a.dtau;
        // symmetric pair at -+ x on the Doppler axis
        Dsd d;
        d.nu = doppler_axis(185, 307.2e-6);
        d.t = {0.0};
        d.values = Eigen::RowVectorXd::Zero(185);
        d.values(0, Eigen::Index(92 - k)) = 1e-3;
        d.values(0, Eigen::Index(92 + k)) = 1e-3;
        exact = exact && rms_doppler_spread(d).values(0, 0) == d.nu[92 + k];
    }
    return {worst <= 1e-12 && exact,
            fmt("1000 profiles, max relative error %.2e; single-tap and symmetric-pair cases %s", worst,
                exact ? "exact" : "NOT exact")};
}

// 5. Closing LOS at 20 m/s.
Outcome doppler()
{
    RunConfig cfg;
    cfg.tx_array = cfg.rx_array = "isotropic";
    cfg.analysis.n_avg = 127;
    cfg.analysis.noise_threshold = false;
    cfg.duration = 0.02; // two coarse intervals; the first window is analyzed
    // start with tau B = 160.4 so the tap stays in one delay bin
    const double d0 = 160.4 / cfg.sim.bandwidth * c0;
    const Scenario s = make_scenario(cfg, fixture::empty_scene(), line({0, 0, 0}, Vec3::Zero(), 0.05, 1.5),
                                     line({d0, 0, 0}, {-20.0, 0, 0}, 0.05, 1.5));
    const auto r = run_pipeline(s, trace_run(s));
    const double bin = 1.0 / (127 * cfg.sim.fine_dt);
    const double expected = f0 * 20.0 / c0;
    if (r.dsd.values.rows() < 1)
        return {false, "no Doppler window"};
    Eigen::Index peak;
    r.dsd.values.row(0).maxCoeff(&peak);
    const double nu = r.dsd.nu[std::size_t(peak)];
    const double spread = r.doppler_spread.values(0, 0);
    return {std::abs(nu - 393.5) <= bin && spread < bin,
            fmt("f v / c = %.2f Hz, peak %.2f Hz, bin %.2f Hz, RMS spread %.3f Hz", expected, nu, bin, spread)};
}

// 6. Identity, rank one and i.i.d. channels.
Outcome eigen_corr()
{
    TensorAxes ax;
    ax.dt = 307.2e-6;
    ax.dbin = 240e6 / 769;
    ChannelTensor id(Domain::frequency, 10, 4, 4, 16, ax), r1 = id;
    Eigen::Vector4cd a(1.0, cplx(0, 2), -0.5, cplx(1, 1)), b(0.3, 1.0, cplx(0, -1), 2.0);
    for (std::size_t k = 0; k < 10; ++k)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                for (std::size_t f = 0; f < 16; ++f)
                {
                    id(k, i, j, f) = i == j ? 1.0 : 0.0;
                    r1(k, i, j, f) = a(Eigen::Index(i)) * std::conj(b(Eigen::Index(j)));
                }
    const auto e_id = eigenvalue_series(id, 10);
    const bool id_ok = e_id.values.cwiseAbs().maxCoeff() <= 1e-12;
    const auto e_r1 = eigenvalue_series(r1, 10);
    bool r1_ok = std::isfinite(e_r1.values(0, 0));
    for (Eigen::Index i = 1; i < 4; ++i)
        r1_ok = r1_ok && e_r1.values(0, i) == -std::numeric_limits<double>::infinity();

    fixture::Gen g(6);
    const auto iid = fixture::random_tensor(g, Domain::frequency, 370, 4, 4, 64, ax);
    double max_rho = 0.0;
    for (ArrayEnd end : {ArrayEnd::tx, ArrayEnd::rx})
    {
        const auto m = correlation_series(iid, end, 185).magnitudes();
        max_rho = std::max(max_rho, m.values.maxCoeff());
    }
    const auto e = eigenvalue_series(iid, 185);
    double eig_range = 0.0;
    for (Eigen::Index w = 0; w < e.values.rows(); ++w)
        eig_range = std::max(eig_range, e.values(w, 0) - e.values(w, 3));
    return {id_ok && r1_ok && max_rho < 0.15 && eig_range <= 3.0,
            fmt("identity %s, rank-1 %s (lambda1 %.2f dB), i.i.d. max |rho| %.3f, eigenvalue range %.2f dB",
                id_ok ? "ok" : "FAIL", r1_ok ? "ok" : "FAIL", e_r1.values(0, 0), max_rho, eig_range)};
}

double mean_of(const MetricSeries &m, Eigen::Index col, const SegmentLabels &l, Segment s)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        const double v = m.values(Eigen::Index(i), col);
        if (l.labels[i] == s && std::isfinite(v))
        {
            sum += v;
            ++n;
        }
    }
    return n ? sum / double(n) : missing_value;
}

// 7. Bundled intersection, NLOS to LOS.
Outcome intersection()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = load_scenario(load_run_config(V2V_DATA_DIR "/intersection.json"));
    const auto coarse = trace_run(s);
    const auto r = run_pipeline(s, coarse);
    const auto labels =
        segment_los_nlos(coarse, r.gain.t, window_center_offset(s.config.analysis.n_avg, s.output_dt()));
    std::size_t transitions = 0;
    for (std::size_t i = 1; i < labels.size(); ++i)
        transitions += labels.labels[i] != labels.labels[i - 1];
    const bool a = transitions == 1 && labels.labels.front() == Segment::nlos && labels.labels.back() == Segment::los;

    const double g_los = mean_of(r.gain, 0, labels, Segment::los), g_nlos = mean_of(r.gain, 0, labels, Segment::nlos);
    const bool b = g_los >= g_nlos + 10.0;
    const double ds_los = mean_of(r.delay_spread, 0, labels, Segment::los);
    const double ds_nlos = mean_of(r.delay_spread, 0, labels, Segment::nlos);
    const bool c = ds_nlos > ds_los;

    int higher = 0, total = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto *corr : {&r.correlation_tx, &r.correlation_rx})
    {
        const auto m = corr->magnitudes();
        for (Eigen::Index j = 0; j < m.values.cols(); ++j)
        {
            const double d = mean_of(m, j, labels, Segment::los) - mean_of(m, j, labels, Segment::nlos);
            higher += d > 0.0;
            worst_margin = std::min(worst_margin, d);
            ++total;
        }
    }
    const bool d = total == 12 && higher == 12;
    const double dt = seconds_since(t0);
    return {a && b && c && d && dt < 600.0,
            fmt("(a) %zu transition(s) %s; (b) gain LOS %.1f vs NLOS %.1f dB %s; (c) delay spread NLOS %.1f vs LOS "
                "%.1f ns %s; (d) %d/%d correlation means higher in LOS (min margin %.3f) %s; %.1f s",
                transitions, a ? "ok" : "FAIL", g_los, g_nlos, b ? "ok" : "FAIL", ds_nlos * 1e9, ds_los * 1e9,
                c ? "ok" : "FAIL", higher, total, worst_margin, d ? "ok" : "FAIL", dt)};
}

// 8. Randomized invariant suite.
Outcome invariants()
{
    const std::string cmd = std::string("\"") + PROPERTIES_PATH + "\" --reporter compact > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    const bool ok = WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    return {ok, ok ? "test_properties passed (>= 200 generated cases per invariant)" : "test_properties failed"};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"free-space gain matches Friis at 100 m", free_space},
        {"two-ray interference over PEC ground, 10-200 m", two_ray},
        {"PEC canyon paths equal the image lattice", canyon},
        {"delay/Doppler spread oracles", spreads},
        {"Doppler peak of a 20 m/s closing LOS", doppler},
        {"eigenvalue and correlation sanity", eigen_corr},
        {"intersection NLOS to LOS scenario", intersection},
        {"randomized invariant suite", invariants},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
