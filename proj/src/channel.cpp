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


#include "v2v/channel.hpp"

#include "v2v/dft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace v2v
{

void SimConfig::validate() const
{
    auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be a positive number");
    };
    positive(carrier_frequency, "carrier_frequency");
    positive(bandwidth, "bandwidth");
    positive(snapshot_dt, "snapshot_dt");
    positive(coarse_trace_dt, "coarse_trace_dt");
    positive(fine_dt, "fine_dt");
    if (n_freq_bins < 1)
        throw std::invalid_argument("n_freq_bins must be >= 1");
    fine_per_coarse();
}

std::size_t SimConfig::fine_per_coarse() const
{
    const double r = coarse_trace_dt / fine_dt;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n)
        throw std::invalid_argument("fine_dt must divide coarse_trace_dt");
    return std::size_t(n);
}

ChannelTensor::ChannelTensor(Domain domain, std::size_t n_time, std::size_t n_rx, std::size_t n_tx, std::size_t n_bin,
                             TensorAxes axes)
    : domain_(domain), n_time_(n_time), n_rx_(n_rx), n_tx_(n_tx), n_bin_(n_bin), axes_(axes)
{
    if (n_time == 0 || n_rx == 0 || n_tx == 0 || n_bin == 0)
        throw std::invalid_argument("channel tensor: all dimensions must be >= 1");
    if (!(axes.dt > 0.0) || !(axes.dbin > 0.0))
        throw std::invalid_argument("channel tensor: axes must be strictly increasing");
    data_.assign(n_time * n_rx * n_tx * n_bin, cplx(0.0));
}

void ChannelTensor::set_slice(std::size_t k, const ChannelSlice &s)
{
    if (s.n_rx() != n_rx_ || s.n_tx() != n_tx_ || s.n_bin() != n_bin_)
        throw std::invalid_argument("channel tensor: slice shape mismatch");
    std::copy(s.data().begin(), s.data().end(), slice(k).begin());
}

// ---------------------------------------------------------------------------

ChannelSlice synthesize_cir(const std::vector<PropagationPath> &paths, const ArrayPose &tx, const ArrayPose &rx,
                            const SimConfig &config, SynthesisStats *stats)
{
    if (!tx.array || !rx.array)
        throw std::invalid_argument("synthesize_cir: missing antenna array");
    const std::size_t M_T = tx.array->size();
    const std::size_t M_R = rx.array->size();
    const std::size_t N = config.n_freq_bins;
    ChannelSlice out(M_R, M_T, N);

    const double f = config.carrier_frequency;
    std::vector<Vec3> off_tx(M_T), off_rx(M_R);
    for (std::size_t m = 0; m < M_T; ++m)
        off_tx[m] = tx.array->world_offset(m, tx.heading);
    for (std::size_t n = 0; n < M_R; ++n)
        off_rx[n] = rx.array->world_offset(n, rx.heading);

    std::vector<Eigen::Vector2cd> field(M_T);
    for (const auto &p : paths)
    {
        if (stats)
            ++stats->paths;
        const double b = std::round(p.delay * config.bandwidth);
        if (!(b >= 0.0) || b >= double(N))
        {
            if (stats)
                ++stats->dropped_delay_overflow;
            continue;
        }
        const std::size_t bin = std::size_t(b);
        for (std::size_t m = 0; m < M_T; ++m)
            field[m] = p.amplitude * tx.array->gain(m, p.departure, tx.heading);
        for (std::size_t n = 0; n < M_R; ++n)
        {
            // receive pattern basis for direction -arrival: (v, -h)
            Eigen::Vector2cd g = rx.array->gain(n, -p.arrival, rx.heading);
            g[1] = -g[1];
            const double dr = off_rx[n].dot(p.arrival) / speed_of_light;
            for (std::size_t m = 0; m < M_T; ++m)
            {
                const double tau = p.delay + dr - off_tx[m].dot(p.departure) / speed_of_light;
                const cplx v = g.transpose() * field[m];
                out(n, m, bin) += v * std::polar(1.0, -2.0 * pi * f * tau);
            }
        }
    }
    return out;
}

double narrowband_gain(const ChannelSlice &cir)
{
    double acc = 0.0;
    for (std::size_t r = 0; r < cir.n_rx(); ++r)
        for (std::size_t t = 0; t < cir.n_tx(); ++t)
        {
            cplx s = 0.0;
            for (std::size_t b = 0; b < cir.n_bin(); ++b)
                s += cir(r, t, b);
            acc += std::norm(s);
        }
    return acc / double(cir.n_rx() * cir.n_tx());
}

// ---------------------------------------------------------------------------

namespace
{
bool same_key(const PropagationPath &a, const PropagationPath &b)
{
    if (a.kind != b.kind || a.interactions.size() != b.interactions.size())
        return false;
    for (std::size_t i = 0; i < a.interactions.size(); ++i)
        if (a.interactions[i].surface != b.interactions[i].surface || a.interactions[i].tile != b.interactions[i].tile)
            return false;
    return true;
}

PropagationPath blend(const PropagationPath &l, const PropagationPath &r, double a)
{
    PropagationPath p = l;
    p.length = (1.0 - a) * l.length + a * r.length;
    p.delay = (1.0 - a) * l.delay + a * r.delay;
    for (std::size_t i = 0; i < p.interactions.size(); ++i)
        p.interactions[i].point = (1.0 - a) * l.interactions[i].point + a * r.interactions[i].point;
    for (int i = 0; i < 4; ++i)
    {
        const cplx x = l.amplitude(i), y = r.amplitude(i);
        const double mag = (1.0 - a) * std::abs(x) + a * std::abs(y);
        p.amplitude(i) = std::polar(mag, std::arg(x != 0.0 ? x : y));
    }
    p.departure = ((1.0 - a) * l.departure + a * r.departure).normalized();
    p.arrival = ((1.0 - a) * l.arrival + a * r.arrival).normalized();
    return p;
}
} // namespace

SnapshotInterpolator::SnapshotInterpolator(std::vector<Snapshot> coarse) : coarse_(std::move(coarse))
{
    if (coarse_.empty())
        throw std::invalid_argument("interpolate_snapshots: no snapshots");
    if (coarse_.size() > 1)
    {
        dt_ = coarse_[1].t - coarse_[0].t;
        if (!(dt_ > 0.0))
            throw std::invalid_argument("interpolate_snapshots: snapshot times must increase");
        for (std::size_t i = 1; i < coarse_.size(); ++i)
        {
            const double expect = coarse_[0].t + double(i) * dt_;
            if (std::abs(coarse_[i].t - expect) > 1e-9)
                throw std::invalid_argument("interpolate_snapshots: snapshot spacing is not uniform");
        }
    }
    match_.resize(coarse_.size() > 0 ? coarse_.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < coarse_.size(); ++i)
    {
        const auto &L = coarse_[i].paths;
        const auto &R = coarse_[i + 1].paths;
        std::vector<bool> used(R.size(), false);
        auto &m = match_[i];
        m.assign(L.size(), -1);
        for (std::size_t a = 0; a < L.size(); ++a)
        {
            long best = -1;
            double best_d = 0.0;
            for (std::size_t b = 0; b < R.size(); ++b)
            {
                if (used[b] || !same_key(L[a], R[b]))
                    continue;
                const double d = std::abs(L[a].delay - R[b].delay);
                if (best < 0 || d < best_d)
                {
                    best = long(b);
                    best_d = d;
                }
            }
            if (best >= 0)
            {
                used[std::size_t(best)] = true;
                m[a] = best;
            }
        }
    }
}

std::pair<std::size_t, double> SnapshotInterpolator::locate(double t) const
{
    const std::size_t last = coarse_.size() - 1;
    if (last == 0)
        return {0, 0.0};
    double x = (t - coarse_.front().t) / dt_;
    x = std::clamp(x, 0.0, double(last));
    std::size_t i = std::size_t(std::floor(x));
    double a = x - double(i);
    if (a > 1.0 - 1e-9)
    {
        ++i;
        a = 0.0;
    }
    else if (a < 1e-9)
    {
        a = 0.0;
    }
    if (i >= last)
        return {last, 0.0};
    return {i, a};
}

std::vector<PropagationPath> SnapshotInterpolator::at(double t) const
{
    const auto [i, a] = locate(t);
    if (a == 0.0)
        return coarse_[i].paths;
    const auto &L = coarse_[i].paths;
    const auto &R = coarse_[i + 1].paths;
    std::vector<PropagationPath> out;
    out.reserve(L.size());
    for (std::size_t k = 0; k < L.size(); ++k)
    {
        const long j = match_[i][k];
        out.push_back(j < 0 ? L[k] : blend(L[k], R[std::size_t(j)], a));
    }
    return out;
}

std::vector<Snapshot> interpolate_snapshots(const std::vector<Snapshot> &coarse, double fine_dt)
{
    SnapshotInterpolator ip(coarse);
    if (coarse.size() < 2)
        return coarse;
    if (!(fine_dt > 0.0))
        throw std::invalid_argument("interpolate_snapshots: fine_dt must be > 0");
    const double r = ip.spacing() / fine_dt;
    const double per = std::round(r);
    if (per < 1.0 || std::abs(r - per) > 1e-9 * per)
        throw std::invalid_argument("interpolate_snapshots: fine_dt must divide the snapshot spacing");
    const std::size_t n = (coarse.size() - 1) * std::size_t(per);
    std::vector<Snapshot> out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        out[k].t = ip.start() + double(k) * fine_dt;
        out[k].paths = ip.at(out[k].t);
    }
    return out;
}

// ---------------------------------------------------------------------------

void cir_to_ctf(std::span<const cplx> cir, std::span<cplx> ctf)
{
    const std::size_t N = cir.size();
    if (ctf.size() != N)
        throw std::invalid_argument("cir_to_ctf: size mismatch");
    std::vector<cplx> buf(cir.begin(), cir.end());
    dft_forward(buf.data(), N);
    const std::size_t h = N / 2;
    for (std::size_t j = 0; j < N; ++j)
        ctf[j] = buf[(j + N - h) % N];
}

void ctf_to_cir(std::span<const cplx> ctf, std::span<cplx> cir, Window window)
{
    const std::size_t N = ctf.size();
    if (cir.size() != N)
        throw std::invalid_argument("ctf_to_cir: size mismatch");
    std::vector<double> w = window == Window::hann ? hann_window(N) : std::vector<double>(N, 1.0);
    std::vector<cplx> buf(N);
    const std::size_t h = N / 2;
    for (std::size_t j = 0; j < N; ++j)
        buf[(j + N - h) % N] = w[j] * ctf[j];
    dft_inverse(buf.data(), N);
    std::copy(buf.begin(), buf.end(), cir.begin());
}

ChannelTensor cir_to_ctf(const ChannelTensor &cir)
{
    if (cir.domain() != Domain::delay)
        throw std::invalid_argument("cir_to_ctf: tensor is not in the delay domain");
    const std::size_t N = cir.n_bin();
    TensorAxes ax = cir.axes();
    ax.dbin = 1.0 / (double(N) * cir.axes().dbin);
    ax.bin0 = -double(N / 2) * ax.dbin;
    ChannelTensor out(Domain::frequency, cir.n_time(), cir.n_rx(), cir.n_tx(), N, ax);
    const std::size_t pairs = cir.n_time() * cir.n_rx() * cir.n_tx();
    for (std::size_t p = 0; p < pairs; ++p)
        cir_to_ctf(std::span<const cplx>(cir.data().data() + p * N, N), std::span<cplx>(out.data().data() + p * N, N));
    return out;
}

ChannelTensor ctf_to_cir(const ChannelTensor &ctf, Window window)
{
    if (ctf.domain() != Domain::frequency)
        throw std::invalid_argument("ctf_to_cir: tensor is not in the frequency domain");
    const std::size_t N = ctf.n_bin();
    TensorAxes ax = ctf.axes();
    ax.dbin = 1.0 / (double(N) * ctf.axes().dbin);
    ax.bin0 = 0.0;
    ChannelTensor out(Domain::delay, ctf.n_time(), ctf.n_rx(), ctf.n_tx(), N, ax);
    const std::size_t pairs = ctf.n_time() * ctf.n_rx() * ctf.n_tx();
    for (std::size_t p = 0; p < pairs; ++p)
        ctf_to_cir(std::span<const cplx>(ctf.data().data() + p * N, N), std::span<cplx>(out.data().data() + p * N, N),
                   window);
    return out;
}

// ---------------------------------------------------------------------------

NoiseSource::NoiseSource(double power, std::uint64_t seed) : power_(power), rng_(seed), dist_(0.0, 1.0)
{
    if (!(power >= 0.0) || !std::isfinite(power))
        throw std::invalid_argument("noise power must be a finite number >= 0");
}

void NoiseSource::add_to(std::span<cplx> values)
{
    if (power_ == 0.0)
        return;
    const double sigma = std::sqrt(power_ / 2.0);
    for (auto &v : values)
    {
        const double re = dist_(rng_);
        const double im = dist_(rng_);
        v += cplx(sigma * re, sigma * im);
    }
}

ChannelTensor add_measurement_noise(ChannelTensor tensor, double noise_power_per_bin, std::uint64_t seed)
{
    NoiseSource src(noise_power_per_bin, seed);
    src.add_to(tensor.data());
    return tensor;
}

void write_tensor_csv(const ChannelTensor &t, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t_index,rx,tx,bin,re,im\n";
    char buf[96];
    for (std::size_t k = 0; k < t.n_time(); ++k)
        for (std::size_t r = 0; r < t.n_rx(); ++r)
            for (std::size_t x = 0; x < t.n_tx(); ++x)
                for (std::size_t b = 0; b < t.n_bin(); ++b)
                {
                    const cplx v = t(k, r, x, b);
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
                    out << k << ',' << r << ',' << x << ',' << b << ',' << buf << '\n';
                }
}

} // namespace v2v
