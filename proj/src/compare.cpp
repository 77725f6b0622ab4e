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


#include "v2v/compare.hpp"

#include "v2v/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace v2v
{

const char *to_string(Segment s)
{
    return s == Segment::los ? "LOS" : "NLOS";
}

SegmentLabels segment_los_nlos(const std::vector<Snapshot> &snapshots, const std::vector<double> &window_starts,
                               double center_offset)
{
    if (snapshots.empty())
        throw std::invalid_argument("segment_los_nlos: no snapshots");
    std::vector<const Snapshot *> order;
    for (const auto &s : snapshots)
        order.push_back(&s);
    std::stable_sort(order.begin(), order.end(), [](const Snapshot *a, const Snapshot *b) { return a->t < b->t; });

    SegmentLabels out;
    for (double t : window_starts)
    {
        const double c = t + center_offset;
        auto it = std::upper_bound(order.begin(), order.end(), c + 1e-9,
                                   [](double x, const Snapshot *s) { return x < s->t; });
        const Snapshot *s = it == order.begin() ? order.front() : *(it - 1);
        const bool los = std::any_of(s->paths.begin(), s->paths.end(),
                                     [](const PropagationPath &p) { return p.kind == PathKind::los; });
        out.t.push_back(t);
        out.labels.push_back(los ? Segment::los : Segment::nlos);
    }
    return out;
}

void write_labels_csv(const SegmentLabels &labels, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t_s,label\n";
    char buf[40];
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%.17g", labels.t[i]);
        out << buf << ',' << to_string(labels.labels[i]) << '\n';
    }
}

SegmentLabels read_labels_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open label file '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("t_s,label", 0) != 0)
        throw FormatError(path.string() + ":1: expected header t_s,label");
    SegmentLabels out;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected t_s,label");
        double t;
        try
        {
            t = std::stod(line.substr(0, comma));
        }
        catch (const std::exception &)
        {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad time");
        }
        const std::string lab = line.substr(comma + 1);
        Segment s;
        if (lab == "LOS")
            s = Segment::los;
        else if (lab == "NLOS")
            s = Segment::nlos;
        else
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": label must be LOS or NLOS");
        out.t.push_back(t);
        out.labels.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace
{
double default_offset(const std::vector<double> &t)
{
    if (t.size() < 2)
        return 1e-9;
    return 0.5 * std::abs(t[1] - t[0]) * (1.0 + 1e-9);
}

// index of the entry of `axis` nearest to x, or -1 if further than max_offset
long nearest(const std::vector<double> &axis, double x, double max_offset)
{
    auto it = std::lower_bound(axis.begin(), axis.end(), x);
    long best = -1;
    double best_d = 0.0;
    for (auto j : {it - 1, it})
    {
        if (j < axis.begin() || j >= axis.end())
            continue;
        const double d = std::abs(*j - x);
        if (best < 0 || d < best_d)
        {
            best = long(j - axis.begin());
            best_d = d;
        }
    }
    if (best < 0 || best_d > max_offset)
        return -1;
    return best;
}

double difference(double a, double b)
{
    if (is_missing(a) || is_missing(b))
        return missing_value;
    if (std::isinf(a) || std::isinf(b))
        return (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) ? 0.0 : missing_value;
    return a - b;
}
} // namespace

MetricSeries error_series(const MetricSeries &a, const MetricSeries &b, double max_offset)
{
    if (a.columns != b.columns)
        throw AlignmentError("error_series: column sets of '" + a.name + "' and '" + b.name + "' differ");
    if (max_offset < 0.0)
        max_offset = default_offset(a.t);
    MetricSeries e;
    e.name = a.name;
    e.unit = a.unit;
    e.columns = a.columns;
    e.t = a.t;
    e.values.resize(a.t.size(), a.columns.size());
    for (std::size_t i = 0; i < a.t.size(); ++i)
    {
        const long j = nearest(b.t, a.t[i], max_offset);
        if (j < 0)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", a.t[i]);
            throw AlignmentError("error_series: no sample of '" + b.name + "' within half a window of t = " + buf);
        }
        for (std::size_t c = 0; c < a.columns.size(); ++c)
            e.values(i, c) = difference(a.values(i, c), b.values(j, c));
    }
    return e;
}

ErrorCell error_cell(std::span<const double> eps, bool sample)
{
    ErrorCell c;
    double sum = 0.0;
    for (double v : eps)
        if (!is_missing(v))
        {
            sum += v;
            ++c.n;
        }
    if (c.n == 0)
        return c;
    c.mu = sum / double(c.n);
    double ss = 0.0;
    for (double v : eps)
        if (!is_missing(v))
            ss += (c.mu - v) * (c.mu - v);
    const double denom = sample ? double(c.n) - 1.0 : double(c.n);
    c.sigma = denom > 0.0 ? std::sqrt(ss / denom) : (sample ? missing_value : 0.0);
    return c;
}

ErrorStats error_stats(const MetricSeries &eps, std::size_t column, const SegmentLabels &labels, bool sample)
{
    if (column >= eps.columns.size())
        throw std::invalid_argument("error_stats: column out of range");
    const double tol = std::max(default_offset(labels.t), default_offset(eps.t));
    std::vector<double> los, nlos;
    for (std::size_t i = 0; i < eps.t.size(); ++i)
    {
        const long j = nearest(labels.t, eps.t[i], tol);
        if (j < 0)
            throw AlignmentError("error_stats: no label near t = " + std::to_string(eps.t[i]));
        (labels.labels[std::size_t(j)] == Segment::los ? los : nlos).push_back(eps.values(i, column));
    }
    return {error_cell(los, sample), error_cell(nlos, sample)};
}

// ---------------------------------------------------------------------------

namespace
{
const std::vector<std::string> &canonical_order()
{
    static const std::vector<std::string> order = [] {
        std::vector<std::string> o = {"gain", "delay_spread", "doppler_spread", "lambda1", "lambda2", "lambda3",
                                      "lambda4"};
        for (const char *end : {"tx", "rx"})
            for (int i = 1; i <= 4; ++i)
                for (int j = i + 1; j <= 4; ++j)
                    o.push_back(std::string(end) + "_rho" + std::to_string(i) + std::to_string(j));
        return o;
    }();
    return order;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

std::string report_unit(const std::string &m)
{
    if (m == "gain" || m.rfind("lambda", 0) == 0)
        return "dB";
    if (m == "delay_spread")
        return "ns";
    if (m == "doppler_spread")
        return "Hz";
    return "";
}

std::size_t report_rank(const std::string &m)
{
    const auto &o = canonical_order();
    const auto it = std::find(o.begin(), o.end(), m);
    return std::size_t(it - o.begin());
}

void sort_report(Report &r)
{
    std::stable_sort(r.begin(), r.end(), [](const ReportRow &a, const ReportRow &b) {
        const auto ra = report_rank(a.metric), rb = report_rank(b.metric);
        return ra != rb ? ra < rb : a.metric < b.metric;
    });
}

std::string render_report_text(const Report &report)
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %12s %12s %6s %12s %12s %6s\n", "parameter", "LOS mu", "LOS sigma", "n",
                  "NLOS mu", "NLOS sigma", "n");
    out << buf;
    auto cell = [](const ErrorCell &c) {
        char b[64];
        if (!c.present())
            std::snprintf(b, sizeof b, "%12s %12s %6s", "n/a", "(no samples)", "0");
        else
            std::snprintf(b, sizeof b, "%12.4g %12.4g %6zu", c.mu, c.sigma, c.n);
        return std::string(b);
    };
    for (const auto &row : report)
    {
        const std::string label = row.unit.empty() ? row.metric : row.metric + " [" + row.unit + "]";
        std::snprintf(buf, sizeof buf, "%-22s ", label.c_str());
        out << buf << cell(row.stats.los) << ' ' << cell(row.stats.nlos) << '\n';
    }
    return out.str();
}

std::string render_report_csv(const Report &report)
{
    std::ostringstream out;
    out << "metric,segment,mu,sigma,n\n";
    for (const auto &row : report)
        for (auto [seg, c] : {std::pair{Segment::los, row.stats.los}, std::pair{Segment::nlos, row.stats.nlos}})
            if (c.present())
                out << row.metric << ',' << to_string(seg) << ',' << num(c.mu) << ',' << num(c.sigma) << ',' << c.n
                    << '\n';
    return out.str();
}

Report parse_report_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "metric,segment,mu,sigma,n")
        throw FormatError("report: expected header metric,segment,mu,sigma,n");
    Report r;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 5)
            throw FormatError("report:" + std::to_string(lineno) + ": expected 5 fields");
        ErrorCell c;
        try
        {
            c.mu = std::stod(f[2]);
            c.sigma = f[3].empty() ? missing_value : std::stod(f[3]);
            c.n = std::stoul(f[4]);
        }
        catch (const std::exception &)
        {
            throw FormatError("report:" + std::to_string(lineno) + ": bad number");
        }
        auto [it, fresh] = index.emplace(f[0], r.size());
        if (fresh)
            r.push_back({f[0], report_unit(f[0]), {}});
        auto &row = r[it->second];
        if (f[1] == "LOS")
            row.stats.los = c;
        else if (f[1] == "NLOS")
            row.stats.nlos = c;
        else
            throw FormatError("report:" + std::to_string(lineno) + ": segment must be LOS or NLOS");
    }
    return r;
}

Report compare_metric_dirs(const std::filesystem::path &a, const std::filesystem::path &b,
                           const SegmentLabels &labels, bool sample)
{
    struct Source
    {
        const char *file;
        const char *prefix; // row name prefix for multi-column files
        double scale;
    };
    const Source sources[] = {{"gain", "gain", 1.0},
                              {"delay_spread", "delay_spread", 1e9},
                              {"doppler_spread", "doppler_spread", 1.0},
                              {"eigenvalues", "", 1.0},
                              {"correlation_tx", "tx_", 1.0},
                              {"correlation_rx", "rx_", 1.0}};
    Report report;
    for (const auto &src : sources)
    {
        const auto fa = a / (std::string(src.file) + ".csv");
        const auto fb = b / (std::string(src.file) + ".csv");
        for (const auto &f : {fa, fb})
            if (!std::filesystem::exists(f))
                throw std::runtime_error("metric '" + std::string(src.file) + "' missing: " + f.string());
        auto eps = error_series(read_metric_csv(fa), read_metric_csv(fb));
        eps.values *= src.scale;
        for (std::size_t c = 0; c < eps.columns.size(); ++c)
        {
            std::string name = eps.columns.size() == 1 && eps.columns[0] == "value"
                                   ? std::string(src.prefix)
                                   : std::string(src.prefix) + eps.columns[c];
            report.push_back({name, report_unit(name), error_stats(eps, c, labels, sample)});
        }
    }
    sort_report(report);
    return report;
}

} // namespace v2v
