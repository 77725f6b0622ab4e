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

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace v2v
{

// Missing (undefined) metric values are quiet NaN; linear zero in dB is -inf.
inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Written in place of -inf in CSV files.
inline constexpr double db_floor_sentinel = -400.0;

double to_db(double linear);

// floor((n_time - n_avg) / stride) + 1. stride 0 means stride = n_avg.
// Throws std::invalid_argument for n_avg == 0 or n_avg > n_time.
std::size_t window_count(std::size_t n_time, std::size_t n_avg, std::size_t stride);

// Square root of the second central moment of `power` over `axis` (two-pass,
// normalized weights). NaN when the total power is zero.
double central_spread(std::span<const double> power, std::span<const double> axis);

struct Apdp
{
    std::vector<double> t; // window start times
    double tau0 = 0.0;
    double dtau = 1.0;
    std::size_t n_avg = 1;
    std::size_t stride = 1;
    Eigen::MatrixXd values; // window x delay bin, linear power

    std::size_t n_windows() const { return std::size_t(values.rows()); }
    std::size_t n_bins() const { return std::size_t(values.cols()); }
    double delay(std::size_t b) const { return tau0 + double(b) * dtau; }
};

// -floor(N/2) .. ceil(N/2)-1 in steps of 1/(N dt).
std::vector<double> doppler_axis(std::size_t n, double dt);

struct Dsd
{
    std::vector<double> t;
    std::vector<double> nu; // Doppler axis, -floor(N/2) .. ceil(N/2)-1 times 1/(N dt)
    std::size_t n_avg = 2;
    std::size_t stride = 1;
    Eigen::MatrixXd values; // window x Doppler bin, linear power
};

struct MetricSeries
{
    std::string name;
    std::string unit;
    std::vector<std::string> columns;
    std::vector<double> t;
    Eigen::MatrixXd values; // window x column

    std::size_t size() const { return t.size(); }
};

enum class ArrayEnd
{
    tx,
    rx
};

// Complex correlation matrices per window; entries are NaN where every
// sample of the pair was skipped.
struct CorrelationSeries
{
    ArrayEnd end = ArrayEnd::rx;
    std::vector<double> t;
    std::vector<Eigen::MatrixXcd> rho;
    std::vector<Eigen::MatrixXi> skipped;

    // |rho_ij| for i < j, columns rho12, rho13, ...
    MetricSeries magnitudes() const;
};

enum class EigenMode
{
    // eigenvalues of the window mean of H H^H
    averaged,
    // mean over the window of the sorted eigenvalues of each H H^H
    per_sample
};

// ---------------------------------------------------------------------------
// whole-tensor operations

// Mean of |h|^2 over n_avg time steps and all antenna pairs.
Apdp compute_apdp(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride = 0);
// One APDP per antenna pair, index rx * M_T + tx.
std::vector<Apdp> compute_apdp_per_pair(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride = 0);

// Zero every bin below noise_floor * 10^0.3.
Apdp apply_noise_threshold(Apdp apdp, double noise_floor);

// Mean of the lowest-decile nonzero values in the last quarter of the delay
// axis, over all windows. Zero when that region holds no power.
double estimate_noise_floor(const Apdp &apdp);

MetricSeries channel_gain(const Apdp &apdp);
MetricSeries rms_delay_spread(const Apdp &apdp);

// |DFT over time|^2 / n_avg with a rectangular window, averaged over delay
// bins and antenna pairs. Throws std::invalid_argument for n_avg < 2.
Dsd compute_dsd(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride = 0);
MetricSeries rms_doppler_spread(const Dsd &dsd);

// All M_R eigenvalues (dB, descending) of the window-normalized H H^H; the
// normalization scales each window so the mean squared Frobenius norm equals
// min(M_R, M_T), which is then also the eigenvalue sum.
MetricSeries eigenvalue_series(const ChannelTensor &ctf, std::size_t n_avg, std::size_t stride = 0,
                               EigenMode mode = EigenMode::averaged);

CorrelationSeries correlation_series(const ChannelTensor &ctf, ArrayEnd end, std::size_t n_avg,
                                     std::size_t stride = 0);
MetricSeries antenna_correlation(const ChannelTensor &ctf, ArrayEnd end, std::size_t i, std::size_t j,
                                 std::size_t n_avg, std::size_t stride = 0);

// ---------------------------------------------------------------------------
// streaming analysis

struct AnalysisConfig
{
    std::size_t n_avg = 185;
    std::size_t stride = 0; // 0: n_avg
    bool noise_threshold = true;
    EigenMode eigen_mode = EigenMode::averaged;
};

struct AnalysisResult
{
    Apdp apdp_raw;
    double noise_floor = 0.0;
    Apdp apdp; // thresholded when enabled
    Dsd dsd;
    MetricSeries gain;
    MetricSeries delay_spread;
    MetricSeries doppler_spread;
    MetricSeries eigenvalues;
    CorrelationSeries correlation_tx;
    CorrelationSeries correlation_rx;
};

// Consumes delay-domain slices in time order and evaluates every window as
// soon as it is complete, so long runs never need the whole tensor in memory.
class WindowAnalyzer
{
  public:
    WindowAnalyzer(AnalysisConfig config, std::size_t n_rx, std::size_t n_tx, std::size_t n_bin, TensorAxes axes);

    void push(std::span<const cplx> cir_slice);
    std::size_t pushed() const { return pushed_; }

    // Throws std::invalid_argument when fewer than n_avg slices were pushed.
    AnalysisResult finish();

  private:
    void run_window();

    AnalysisConfig cfg_;
    std::size_t n_rx_, n_tx_, n_bin_;
    TensorAxes axes_;
    std::vector<std::vector<cplx>> cir_, ctf_; // ring of the last n_avg slices
    std::size_t pushed_ = 0;
    std::size_t next_window_start_ = 0;

    std::vector<double> t_;
    std::vector<std::vector<double>> apdp_rows_, dsd_rows_, eig_rows_;
    std::vector<Eigen::MatrixXcd> rho_tx_, rho_rx_;
    std::vector<Eigen::MatrixXi> skip_tx_, skip_rx_;
};

AnalysisResult analyze(const ChannelTensor &cir, const AnalysisConfig &config);

// ---------------------------------------------------------------------------
// CSV

// t_s,<columns>; -inf as -400, missing as an empty field, doubles as %.17g.
void write_metric_csv(const MetricSeries &series, const std::filesystem::path &path);
MetricSeries read_metric_csv(const std::filesystem::path &path, const std::string &name = "");

// Long format t_s,tau_s,power_db and t_s,nu_hz,power_db.
void write_apdp_csv(const Apdp &apdp, const std::filesystem::path &path);
void write_dsd_csv(const Dsd &dsd, const std::filesystem::path &path);

} // namespace v2v
