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

#include "v2v/channel.hpp"
#include "v2v/metrics.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace v2v
{

enum class Segment
{
    los,
    nlos
};

const char *to_string(Segment s);

struct SegmentLabels
{
    std::vector<double> t; // window start times, as on the metric axes
    std::vector<Segment> labels;

    std::size_t size() const { return t.size(); }
};

// A window is LOS iff a LOS path is present at its centre time
// (window start + center_offset). Between coarse snapshots the earlier
// snapshot decides, matching SnapshotInterpolator. Throws
// std::invalid_argument for an empty snapshot list.
SegmentLabels segment_los_nlos(const std::vector<Snapshot> &snapshots, const std::vector<double> &window_starts,
                               double center_offset);

// Centre of a window of n_avg samples spaced dt: (n_avg - 1) dt / 2.
inline double window_center_offset(std::size_t n_avg, double dt) { return 0.5 * double(n_avg - 1) * dt; }

void write_labels_csv(const SegmentLabels &labels, const std::filesystem::path &path);
SegmentLabels read_labels_csv(const std::filesystem::path &path);

// Pointwise a - b after nearest-time alignment of b onto a's axis. Missing
// in either input gives missing; -inf - -inf gives 0, a single -inf gives
// missing. Throws AlignmentError when a sample of a has no counterpart in b
// within `max_offset` (default: half of a's time spacing) or the column sets
// differ.
MetricSeries error_series(const MetricSeries &a, const MetricSeries &b, double max_offset = -1.0);

struct ErrorCell
{
    double mu = missing_value;
    double sigma = missing_value;
    std::size_t n = 0;

    bool present() const { return n > 0; }
    // missing fields compare equal to each other
    bool operator==(const ErrorCell &o) const
    {
        auto same = [](double x, double y) { return x == y || (is_missing(x) && is_missing(y)); };
        return n == o.n && same(mu, o.mu) && same(sigma, o.sigma);
    }
};

// Mean and root-mean-square deviation of the non-missing values. `sample`
// divides by n - 1 instead of n.
ErrorCell error_cell(std::span<const double> eps, bool sample = false);

struct ErrorStats
{
    ErrorCell los;
    ErrorCell nlos;

    bool operator==(const ErrorStats &) const = default;
};

// Column `column` of eps split by the label of the nearest window.
ErrorStats error_stats(const MetricSeries &eps, std::size_t column, const SegmentLabels &labels, bool sample = false);

struct ReportRow
{
    std::string metric; // gain, delay_spread, doppler_spread, lambda1.., tx_rho12.., rx_rho12..
    std::string unit;
    ErrorStats stats;

    bool operator==(const ReportRow &) const = default;
};

using Report = std::vector<ReportRow>;

// Unit and position of a metric name in the reporting order; position is
// past the end for unknown names.
std::string report_unit(const std::string &metric);
std::size_t report_rank(const std::string &metric);
void sort_report(Report &report);

std::string render_report_text(const Report &report);
// metric,segment,mu,sigma,n ; absent cells are omitted.
std::string render_report_csv(const Report &report);
Report parse_report_csv(const std::string &text);

// Compares two analyze output directories metric by metric.
// Throws std::runtime_error naming a metric file missing in either directory.
Report compare_metric_dirs(const std::filesystem::path &a, const std::filesystem::path &b,
                           const SegmentLabels &labels, bool sample = false);

} // namespace v2v
