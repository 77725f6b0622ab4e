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
#include "v2v/raytracer.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace v2v
{

struct SimConfig
{
    double carrier_frequency = 5.9e9; // Hz
    double bandwidth = 240e6;         // Hz
    std::size_t n_freq_bins = 769;
    double snapshot_dt = 307.2e-6;    // s, sounder repetition time
    double coarse_trace_dt = 10e-3;   // s
    double fine_dt = 100e-6;          // s

    // Throws std::invalid_argument for non-positive values or when fine_dt
    // does not divide coarse_trace_dt.
    void validate() const;

    double delay_resolution() const { return 1.0 / bandwidth; }
    double max_delay() const { return double(n_freq_bins) / bandwidth; }
    // Number of fine steps per coarse interval.
    std::size_t fine_per_coarse() const;
};

enum class Domain : std::int32_t
{
    delay = 0,
    frequency = 1
};

using cplx = std::complex<double>;

// One time step of an M_R x M_T channel, indexed (rx, tx, bin), bin fastest.
class ChannelSlice
{
  public:
    ChannelSlice() = default;
    ChannelSlice(std::size_t n_rx, std::size_t n_tx, std::size_t n_bin)
        : n_rx_(n_rx), n_tx_(n_tx), n_bin_(n_bin), data_(n_rx * n_tx * n_bin)
    {
    }

    std::size_t n_rx() const { return n_rx_; }
    std::size_t n_tx() const { return n_tx_; }
    std::size_t n_bin() const { return n_bin_; }

    cplx &operator()(std::size_t r, std::size_t t, std::size_t b) { return data_[(r * n_tx_ + t) * n_bin_ + b]; }
    const cplx &operator()(std::size_t r, std::size_t t, std::size_t b) const
    {
        return data_[(r * n_tx_ + t) * n_bin_ + b];
    }

    std::vector<cplx> &data() { return data_; }
    const std::vector<cplx> &data() const { return data_; }

  private:
    std::size_t n_rx_ = 0, n_tx_ = 0, n_bin_ = 0;
    std::vector<cplx> data_;
};

struct TensorAxes
{
    double t0 = 0.0;
    double dt = 1.0;
    double bin0 = 0.0;
    double dbin = 1.0;
    double carrier = 0.0;

    bool operator==(const TensorAxes &) const = default;
};

// Time-variant channel indexed (time, rx, tx, bin).
class ChannelTensor
{
  public:
    ChannelTensor() = default;
    // Throws std::invalid_argument for zero dimensions or non-positive dt/dbin.
    ChannelTensor(Domain domain, std::size_t n_time, std::size_t n_rx, std::size_t n_tx, std::size_t n_bin,
                  TensorAxes axes);

    Domain domain() const { return domain_; }
    std::size_t n_time() const { return n_time_; }
    std::size_t n_rx() const { return n_rx_; }
    std::size_t n_tx() const { return n_tx_; }
    std::size_t n_bin() const { return n_bin_; }
    std::size_t slice_size() const { return n_rx_ * n_tx_ * n_bin_; }
    const TensorAxes &axes() const { return axes_; }

    double time(std::size_t k) const { return axes_.t0 + double(k) * axes_.dt; }
    double bin_value(std::size_t b) const { return axes_.bin0 + double(b) * axes_.dbin; }

    cplx &operator()(std::size_t k, std::size_t r, std::size_t t, std::size_t b)
    {
        return data_[((k * n_rx_ + r) * n_tx_ + t) * n_bin_ + b];
    }
    const cplx &operator()(std::size_t k, std::size_t r, std::size_t t, std::size_t b) const
    {
        return data_[((k * n_rx_ + r) * n_tx_ + t) * n_bin_ + b];
    }

    std::span<cplx> slice(std::size_t k) { return {data_.data() + k * slice_size(), slice_size()}; }
    std::span<const cplx> slice(std::size_t k) const { return {data_.data() + k * slice_size(), slice_size()}; }
    void set_slice(std::size_t k, const ChannelSlice &s);

    std::vector<cplx> &data() { return data_; }
    const std::vector<cplx> &data() const { return data_; }

    bool operator==(const ChannelTensor &) const = default;

  private:
    Domain domain_ = Domain::delay;
    std::size_t n_time_ = 0, n_rx_ = 0, n_tx_ = 0, n_bin_ = 0;
    TensorAxes axes_;
    std::vector<cplx> data_;
};

// Placement of one end of the link: array layout and vehicle heading.
struct ArrayPose
{
    const ArrayLayout *array = nullptr;
    double heading = 0.0; // rad
};

struct SynthesisStats
{
    std::size_t paths = 0;
    std::size_t dropped_delay_overflow = 0;
};

// Delay-domain slice: every path is placed in bin round(tau B) with phase
// exp(-j 2 pi f (tau + element offsets)); paths beyond the last bin are dropped
// and counted in `stats`.
ChannelSlice synthesize_cir(const std::vector<PropagationPath> &paths, const ArrayPose &tx, const ArrayPose &rx,
                            const SimConfig &config, SynthesisStats *stats = nullptr);

// |H(f_c)|^2 = |sum over bins|^2, averaged over antenna pairs.
double narrowband_gain(const ChannelSlice &cir);

// ---------------------------------------------------------------------------
// snapshots

struct Snapshot
{
    double t = 0.0;
    std::vector<PropagationPath> paths;
};

// Evaluates path lists between coarse snapshots. Paths are matched between
// neighbouring snapshots by kind and interaction sequence (nearest delay
// breaks ties). Matched paths are interpolated linearly (length, delay,
// points, amplitude magnitudes; phase of each amplitude entry taken from the
// earlier snapshot). Unmatched paths keep their coarse value until the next
// snapshot replaces them.
class SnapshotInterpolator
{
  public:
    // Throws std::invalid_argument for an empty list, non-increasing times or
    // spacing that is not uniform within 1e-9 s.
    explicit SnapshotInterpolator(std::vector<Snapshot> coarse);

    double start() const { return coarse_.front().t; }
    double end() const { return coarse_.back().t; }
    double spacing() const { return dt_; }
    const std::vector<Snapshot> &coarse() const { return coarse_; }

    // Times outside [start, end] are clamped.
    std::vector<PropagationPath> at(double t) const;

    // Index of the coarse interval holding t and the fraction inside it.
    std::pair<std::size_t, double> locate(double t) const;

  private:
    std::vector<Snapshot> coarse_;
    double dt_ = 0.0;
    std::vector<std::vector<long>> match_; // per interval: index into right snapshot or -1
};

// Fine-grid path lists at start, start + fine_dt, ... up to but excluding the
// last coarse time. Throws std::invalid_argument when fine_dt does not divide
// the coarse spacing.
std::vector<Snapshot> interpolate_snapshots(const std::vector<Snapshot> &coarse, double fine_dt);

// ---------------------------------------------------------------------------
// delay <-> frequency

enum class Window
{
    rect,
    hann
};

// Frequency-domain bins are stored in increasing order, bin0 = -floor(N/2) B/N.
void cir_to_ctf(std::span<const cplx> cir, std::span<cplx> ctf);
void ctf_to_cir(std::span<const cplx> ctf, std::span<cplx> cir, Window window = Window::hann);

ChannelTensor cir_to_ctf(const ChannelTensor &cir);
ChannelTensor ctf_to_cir(const ChannelTensor &ctf, Window window = Window::hann);

// ---------------------------------------------------------------------------
// noise

// Circularly-symmetric complex Gaussian samples with variance `power` per
// complex value, drawn in call order from a seeded mt19937_64.
class NoiseSource
{
  public:
    // Throws std::invalid_argument for negative or non-finite power.
    NoiseSource(double power, std::uint64_t seed);

    void add_to(std::span<cplx> values);
    double power() const { return power_; }

  private:
    double power_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> dist_;
};

ChannelTensor add_measurement_noise(ChannelTensor tensor, double noise_power_per_bin, std::uint64_t seed);

// CSV t_index,rx,tx,bin,re,im for small tensors.
void write_tensor_csv(const ChannelTensor &tensor, const std::filesystem::path &path);

} // namespace v2v
