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


#include "v2v/metrics.hpp"

#include "v2v/dft.hpp"
#include "v2v/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace v2v
{

double to_db(double linear)
{
    if (is_missing(linear))
        return missing_value;
    if (linear <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(linear);
}

std::size_t window_count(std::size_t n_time, std::size_t n_avg, std::size_t stride)
{
    if (n_avg == 0)
        throw std::invalid_argument("n_avg must be >= 1");
    if (n_avg > n_time)
        throw std::invalid_argument("n_avg (" + std::to_string(n_avg) + ") exceeds the number of time steps (" +
                                    std::to_string(n_time) + ")");
    if (stride == 0)
        stride = n_avg;
    return (n_time - n_avg) / stride + 1;
}

double central_spread(std::span<const double> power, std::span<const double> axis)
{
    if (power.size() != axis.size())
        throw std::invalid_argument("central_spread: size mismatch");
    double total = 0.0;
    for (double p : power)
        total += p;
    if (!(total > 0.0))
        return missing_value;
    double mean = 0.0;
    for (std::size_t i = 0; i < power.size(); ++i)
        mean += (power[i] / total) * axis[i];
    double var = 0.0;
    for (std::size_t i = 0; i < power.size(); ++i)
    {
        const double d = axis[i] - mean;
        var += (power[i] / total) * (d * d);
    }
    return std::sqrt(std::max(var, 0.0));
}

// ---------------------------------------------------------------------------
// window kernels shared by the tensor API and the streaming analyzer

namespace
{

using View = std::vector<const cplx *>;

struct Shape
{
    std::size_t n_rx, n_tx, n_bin;
    std::size_t pairs() const { return n_rx * n_tx; }
};

std::vector<double> apdp_kernel(const View &w, const Shape &s)
{
    std::vector<double> row(s.n_bin, 0.0);
    for (const cplx *slice : w)
        for (std::size_t p = 0; p < s.pairs(); ++p)
            for (std::size_t b = 0; b < s.n_bin; ++b)
                row[b] += std::norm(slice[p * s.n_bin + b]);
    const double scale = 1.0 / double(w.size() * s.pairs());
    for (auto &v : row)
        v *= scale;
    return row;
}

std::vector<double> apdp_pair_kernel(const View &w, const Shape &s, std::size_t pair)
{
    std::vector<double> row(s.n_bin, 0.0);
    for (const cplx *slice : w)
        for (std::size_t b = 0; b < s.n_bin; ++b)
            row[b] += std::norm(slice[pair * s.n_bin + b]);
    for (auto &v : row)
        v /= double(w.size());
    return row;
}

std::vector<double> dsd_kernel(const View &w, const Shape &s)
{
    const std::size_t N = w.size();
    std::vector<double> acc(N, 0.0);
    std::vector<cplx> seq(N);
    for (std::size_t p = 0; p < s.pairs(); ++p)
        for (std::size_t b = 0; b < s.n_bin; ++b)
        {
            bool any = false;
            for (std::size_t n = 0; n < N; ++n)
            {
                seq[n] = w[n][p * s.n_bin + b];
                any = any || seq[n] != 0.0;
            }
            if (!any)
                continue;
            dft_forward(seq.data(), N);
            for (std::size_t k = 0; k < N; ++k)
                acc[k] += std::norm(seq[k]);
        }
    const double scale = 1.0 / (double(N) * double(s.pairs() * s.n_bin));
    std::vector<double> row(N);
    const std::size_t h = N / 2;
    for (std::size_t j = 0; j < N; ++j)
        row[j] = acc[(j + N - h) % N] * scale;
    return row;
}

Eigen::MatrixXcd sample_matrix(const cplx *slice, const Shape &s, std::size_t b)
{
    Eigen::MatrixXcd H(s.n_rx, s.n_tx);
    for (std::size_t r = 0; r < s.n_rx; ++r)
        for (std::size_t t = 0; t < s.n_tx; ++t)
            H(r, t) = slice[(r * s.n_tx + t) * s.n_bin + b];
    return H;
}

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXcd &R)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

std::vector<double> eigen_kernel(const View &w, const Shape &s, EigenMode mode)
{
    const std::size_t K = std::min(s.n_rx, s.n_tx);
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(s.n_rx, s.n_rx);
    std::vector<double> sum(s.n_rx, 0.0);
    double fro = 0.0;
    for (const cplx *slice : w)
        for (std::size_t b = 0; b < s.n_bin; ++b)
        {
            const Eigen::MatrixXcd H = sample_matrix(slice, s, b);
            fro += H.squaredNorm();
            if (mode == EigenMode::averaged)
                R.noalias() += H * H.adjoint();
            else
            {
                const auto ev = sorted_eigenvalues(H * H.adjoint());
                for (std::size_t i = 0; i < ev.size(); ++i)
                    sum[i] += ev[i];
            }
        }
    std::vector<double> out(s.n_rx, missing_value);
    const double count = double(w.size() * s.n_bin);
    if (!(fro > 0.0))
        return out;
    const double c = double(K) / (fro / count) / count;
    std::vector<double> ev;
    if (mode == EigenMode::averaged)
        ev = sorted_eigenvalues(R * c);
    else
    {
        ev = sum;
        for (auto &v : ev)
            v *= c;
    }
    const double top = ev.front();
    for (std::size_t i = 0; i < s.n_rx; ++i)
        out[i] = ev[i] < 1e-12 * top ? 0.0 : ev[i];
    return out;
}

void corr_kernel(const View &w, const Shape &s, ArrayEnd end, Eigen::MatrixXcd &rho, Eigen::MatrixXi &skipped)
{
    const std::size_t M = end == ArrayEnd::rx ? s.n_rx : s.n_tx;
    const std::size_t O = end == ArrayEnd::rx ? s.n_tx : s.n_rx;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(M, M);
    Eigen::MatrixXi used = Eigen::MatrixXi::Zero(M, M);
    skipped = Eigen::MatrixXi::Zero(M, M);
    std::vector<double> pw(M);
    auto at = [&](const cplx *slice, std::size_t i, std::size_t o, std::size_t b) {
        return end == ArrayEnd::rx ? slice[(i * s.n_tx + o) * s.n_bin + b] : slice[(o * s.n_tx + i) * s.n_bin + b];
    };
    for (const cplx *slice : w)
        for (std::size_t b = 0; b < s.n_bin; ++b)
        {
            for (std::size_t i = 0; i < M; ++i)
            {
                pw[i] = 0.0;
                for (std::size_t o = 0; o < O; ++o)
                    pw[i] += std::norm(at(slice, i, o, b));
            }
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t j = i; j < M; ++j)
                {
                    if (pw[i] == 0.0 || pw[j] == 0.0)
                    {
                        ++skipped(i, j);
                        continue;
                    }
                    cplx num = 0.0;
                    for (std::size_t o = 0; o < O; ++o)
                        num += at(slice, i, o, b) * std::conj(at(slice, j, o, b));
                    acc(i, j) += num / std::sqrt(pw[i] * pw[j]);
                    ++used(i, j);
                }
        }
    rho.resize(M, M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = i; j < M; ++j)
        {
            const cplx v = used(i, j) > 0 ? acc(i, j) / double(used(i, j)) : cplx(missing_value, missing_value);
            rho(i, j) = v;
            rho(j, i) = std::conj(v);
            skipped(j, i) = skipped(i, j);
        }
}

Shape shape_of(const ChannelTensor &t)
{
    return {t.n_rx(), t.n_tx(), t.n_bin()};
}

template <class F> void for_each_window(const ChannelTensor &t, std::size_t n_avg, std::size_t stride, F &&f)
{
    const std::size_t n = window_count(t.n_time(), n_avg, stride);
    if (stride == 0)
        stride = n_avg;
    View w(n_avg);
    for (std::size_t k = 0; k < n; ++k)
    {
        for (std::size_t i = 0; i < n_avg; ++i)
            w[i] = t.slice(k * stride + i).data();
        f(k, t.time(k * stride), w);
    }
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>> &rows, std::size_t cols)
{
    Eigen::MatrixXd m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = rows[i][j];
    return m;
}

void require_domain(const ChannelTensor &t, Domain d, const char *what)
{
    if (t.domain() != d)
        throw std::invalid_argument(std::string(what) + ": tensor is in the wrong domain");
}

MetricSeries eigen_series_from(std::vector<double> t, const std::vector<std::vector<double>> &rows, std::size_t K)
{
    MetricSeries m;
    m.name = "eigenvalues";
    m.unit = "dB";
    for (std::size_t i = 0; i < K; ++i)
        m.columns.push_back("lambda" + std::to_string(i + 1));
    m.t = std::move(t);
    m.values.resize(rows.size(), K);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < K; ++j)
            m.values(i, j) = to_db(rows[i][j]);
    return m;
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<double> doppler_axis(std::size_t N, double dt)
{
    std::vector<double> nu(N);
    const long h = long(N / 2);
    for (std::size_t j = 0; j < N; ++j)
        nu[j] = double(long(j) - h) / (double(N) * dt);
    return nu;
}

Apdp compute_apdp(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride)
{
    require_domain(cir, Domain::delay, "compute_apdp");
    Apdp a;
    a.n_avg = n_avg;
    a.stride = stride == 0 ? n_avg : stride;
    a.tau0 = cir.axes().bin0;
    a.dtau = cir.axes().dbin;
    std::vector<std::vector<double>> rows;
    const Shape s = shape_of(cir);
    for_each_window(cir, n_avg, stride, [&](std::size_t, double t, const View &w) {
        a.t.push_back(t);
        rows.push_back(apdp_kernel(w, s));
    });
    a.values = rows_to_matrix(rows, cir.n_bin());
    return a;
}

std::vector<Apdp> compute_apdp_per_pair(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride)
{
    require_domain(cir, Domain::delay, "compute_apdp_per_pair");
    const Shape s = shape_of(cir);
    std::vector<Apdp> out;
    for (std::size_t p = 0; p < s.pairs(); ++p)
    {
        Apdp a;
        a.n_avg = n_avg;
        a.stride = stride == 0 ? n_avg : stride;
        a.tau0 = cir.axes().bin0;
        a.dtau = cir.axes().dbin;
        std::vector<std::vector<double>> rows;
        for_each_window(cir, n_avg, stride, [&](std::size_t, double t, const View &w) {
            a.t.push_back(t);
            rows.push_back(apdp_pair_kernel(w, s, p));
        });
        a.values = rows_to_matrix(rows, cir.n_bin());
        out.push_back(std::move(a));
    }
    return out;
}

Apdp apply_noise_threshold(Apdp apdp, double noise_floor)
{
    if (!(noise_floor >= 0.0))
        throw std::invalid_argument("noise floor must be >= 0");
    const double thr = noise_floor * std::pow(10.0, 0.3);
    for (Eigen::Index i = 0; i < apdp.values.size(); ++i)
        if (apdp.values(i) < thr)
            apdp.values(i) = 0.0;
    return apdp;
}

double estimate_noise_floor(const Apdp &apdp)
{
    const std::size_t N = apdp.n_bins();
    if (N < 32)
        throw std::invalid_argument("estimate_noise_floor: need at least 32 delay bins");
    std::vector<double> v;
    for (std::size_t w = 0; w < apdp.n_windows(); ++w)
        for (std::size_t b = N - N / 4; b < N; ++b)
            if (apdp.values(w, b) > 0.0)
                v.push_back(apdp.values(w, b));
    if (v.empty())
        return 0.0;
    const std::size_t k = std::max<std::size_t>(1, (v.size() + 9) / 10);
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    std::sort(v.begin(), v.begin() + k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        sum += v[i];
    return sum / double(k);
}

MetricSeries channel_gain(const Apdp &apdp)
{
    MetricSeries m;
    m.name = "gain";
    m.unit = "dB";
    m.columns = {"value"};
    m.t = apdp.t;
    m.values.resize(apdp.n_windows(), 1);
    for (std::size_t w = 0; w < apdp.n_windows(); ++w)
        m.values(w, 0) = to_db(apdp.values.row(w).sum());
    return m;
}

MetricSeries rms_delay_spread(const Apdp &apdp)
{
    MetricSeries m;
    m.name = "delay_spread";
    m.unit = "s";
    m.columns = {"value"};
    m.t = apdp.t;
    m.values.resize(apdp.n_windows(), 1);
    std::vector<double> axis(apdp.n_bins()), row(apdp.n_bins());
    for (std::size_t b = 0; b < apdp.n_bins(); ++b)
        axis[b] = apdp.delay(b);
    for (std::size_t w = 0; w < apdp.n_windows(); ++w)
    {
        for (std::size_t b = 0; b < apdp.n_bins(); ++b)
            row[b] = apdp.values(w, b);
        m.values(w, 0) = central_spread(row, axis);
    }
    return m;
}

Dsd compute_dsd(const ChannelTensor &cir, std::size_t n_avg, std::size_t stride)
{
    require_domain(cir, Domain::delay, "compute_dsd");
    if (n_avg < 2)
        throw std::invalid_argument("compute_dsd: n_avg must be >= 2");
    Dsd d;
    d.n_avg = n_avg;
    d.stride = stride == 0 ? n_avg : stride;
    d.nu = doppler_axis(n_avg, cir.axes().dt);
    std::vector<std::vector<double>> rows;
    const Shape s = shape_of(cir);
    for_each_window(cir, n_avg, stride, [&](std::size_t, double t, const View &w) {
        d.t.push_back(t);
        rows.push_back(dsd_kernel(w, s));
    });
    d.values = rows_to_matrix(rows, n_avg);
    return d;
}

MetricSeries rms_doppler_spread(const Dsd &dsd)
{
    MetricSeries m;
    m.name = "doppler_spread";
    m.unit = "Hz";
    m.columns = {"value"};
    m.t = dsd.t;
    m.values.resize(dsd.t.size(), 1);
    std::vector<double> row(dsd.nu.size());
    for (std::size_t w = 0; w < dsd.t.size(); ++w)
    {
        for (std::size_t b = 0; b < row.size(); ++b)
            row[b] = dsd.values(w, b);
        m.values(w, 0) = central_spread(row, dsd.nu);
    }
    return m;
}

MetricSeries eigenvalue_series(const ChannelTensor &ctf, std::size_t n_avg, std::size_t stride, EigenMode mode)
{
    require_domain(ctf, Domain::frequency, "eigenvalue_series");
    const Shape s = shape_of(ctf);
    std::vector<double> t;
    std::vector<std::vector<double>> rows;
    for_each_window(ctf, n_avg, stride, [&](std::size_t, double tk, const View &w) {
        t.push_back(tk);
        rows.push_back(eigen_kernel(w, s, mode));
    });
    return eigen_series_from(std::move(t), rows, s.n_rx);
}

CorrelationSeries correlation_series(const ChannelTensor &ctf, ArrayEnd end, std::size_t n_avg, std::size_t stride)
{
    require_domain(ctf, Domain::frequency, "correlation_series");
    const Shape s = shape_of(ctf);
    CorrelationSeries c;
    c.end = end;
    for_each_window(ctf, n_avg, stride, [&](std::size_t, double tk, const View &w) {
        c.t.push_back(tk);
        c.rho.emplace_back();
        c.skipped.emplace_back();
        corr_kernel(w, s, end, c.rho.back(), c.skipped.back());
    });
    return c;
}

MetricSeries antenna_correlation(const ChannelTensor &ctf, ArrayEnd end, std::size_t i, std::size_t j,
                                 std::size_t n_avg, std::size_t stride)
{
    const std::size_t M = end == ArrayEnd::rx ? ctf.n_rx() : ctf.n_tx();
    if (i == j || i >= M || j >= M)
        throw std::invalid_argument("antenna_correlation: need two distinct valid element indices");
    const auto c = correlation_series(ctf, end, n_avg, stride);
    MetricSeries m;
    m.name = end == ArrayEnd::rx ? "correlation_rx" : "correlation_tx";
    m.unit = "";
    m.columns = {"rho" + std::to_string(i + 1) + std::to_string(j + 1)};
    m.t = c.t;
    m.values.resize(c.t.size(), 1);
    for (std::size_t w = 0; w < c.t.size(); ++w)
    {
        const cplx v = c.rho[w](i, j);
        m.values(w, 0) = std::isnan(v.real()) ? missing_value : std::abs(v);
    }
    return m;
}

MetricSeries CorrelationSeries::magnitudes() const
{
    MetricSeries m;
    m.name = end == ArrayEnd::rx ? "correlation_rx" : "correlation_tx";
    m.unit = "";
    m.t = t;
    const std::size_t M = rho.empty() ? 0 : std::size_t(rho.front().rows());
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = i + 1; j < M; ++j)
            m.columns.push_back("rho" + std::to_string(i + 1) + std::to_string(j + 1));
    m.values.resize(t.size(), m.columns.size());
    for (std::size_t w = 0; w < t.size(); ++w)
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j, ++c)
            {
                const cplx v = rho[w](i, j);
                m.values(w, c) = std::isnan(v.real()) ? missing_value : std::abs(v);
            }
    }
    return m;
}

// ---------------------------------------------------------------------------

WindowAnalyzer::WindowAnalyzer(AnalysisConfig config, std::size_t n_rx, std::size_t n_tx, std::size_t n_bin,
                               TensorAxes axes)
    : cfg_(config), n_rx_(n_rx), n_tx_(n_tx), n_bin_(n_bin), axes_(axes)
{
    if (cfg_.n_avg < 2)
        throw std::invalid_argument("n_avg must be >= 2");
    if (cfg_.stride == 0)
        cfg_.stride = cfg_.n_avg;
    if (n_rx == 0 || n_tx == 0 || n_bin == 0)
        throw std::invalid_argument("analyzer: empty slice shape");
}

void WindowAnalyzer::push(std::span<const cplx> slice)
{
    if (slice.size() != n_rx_ * n_tx_ * n_bin_)
        throw std::invalid_argument("analyzer: slice size mismatch");
    const std::size_t index = pushed_++;
    if (index < next_window_start_)
        return;
    cir_.emplace_back(slice.begin(), slice.end());
    std::vector<cplx> f(slice.size());
    for (std::size_t p = 0; p < n_rx_ * n_tx_; ++p)
        cir_to_ctf(std::span<const cplx>(slice.data() + p * n_bin_, n_bin_), std::span<cplx>(f.data() + p * n_bin_, n_bin_));
    ctf_.push_back(std::move(f));
    if (cir_.size() == cfg_.n_avg)
    {
        run_window();
        const std::size_t drop = std::min(cfg_.stride, cir_.size());
        cir_.erase(cir_.begin(), cir_.begin() + long(drop));
        ctf_.erase(ctf_.begin(), ctf_.begin() + long(drop));
        next_window_start_ += cfg_.stride;
    }
}

void WindowAnalyzer::run_window()
{
    const Shape s{n_rx_, n_tx_, n_bin_};
    View wc(cfg_.n_avg), wf(cfg_.n_avg);
    for (std::size_t i = 0; i < cfg_.n_avg; ++i)
    {
        wc[i] = cir_[i].data();
        wf[i] = ctf_[i].data();
    }
    t_.push_back(axes_.t0 + double(next_window_start_) * axes_.dt);
    apdp_rows_.push_back(apdp_kernel(wc, s));
    dsd_rows_.push_back(dsd_kernel(wc, s));
    eig_rows_.push_back(eigen_kernel(wf, s, cfg_.eigen_mode));
    rho_tx_.emplace_back();
    skip_tx_.emplace_back();
    corr_kernel(wf, s, ArrayEnd::tx, rho_tx_.back(), skip_tx_.back());
    rho_rx_.emplace_back();
    skip_rx_.emplace_back();
    corr_kernel(wf, s, ArrayEnd::rx, rho_rx_.back(), skip_rx_.back());
}

AnalysisResult WindowAnalyzer::finish()
{
    if (t_.empty())
        throw std::invalid_argument("analyzer: fewer time steps (" + std::to_string(pushed_) + ") than n_avg (" +
                                    std::to_string(cfg_.n_avg) + ")");
    AnalysisResult r;
    r.apdp_raw.t = t_;
    r.apdp_raw.tau0 = axes_.bin0;
    r.apdp_raw.dtau = axes_.dbin;
    r.apdp_raw.n_avg = cfg_.n_avg;
    r.apdp_raw.stride = cfg_.stride;
    r.apdp_raw.values = rows_to_matrix(apdp_rows_, n_bin_);
    r.apdp = r.apdp_raw;
    if (cfg_.noise_threshold && n_bin_ >= 32)
    {
        r.noise_floor = estimate_noise_floor(r.apdp_raw);
        r.apdp = apply_noise_threshold(r.apdp_raw, r.noise_floor);
    }
    r.gain = channel_gain(r.apdp);
    r.delay_spread = rms_delay_spread(r.apdp);

    r.dsd.t = t_;
    r.dsd.n_avg = cfg_.n_avg;
    r.dsd.stride = cfg_.stride;
    r.dsd.nu = doppler_axis(cfg_.n_avg, axes_.dt);
    r.dsd.values = rows_to_matrix(dsd_rows_, cfg_.n_avg);
    r.doppler_spread = rms_doppler_spread(r.dsd);

    r.eigenvalues = eigen_series_from(t_, eig_rows_, n_rx_);
    r.correlation_tx = {ArrayEnd::tx, t_, rho_tx_, skip_tx_};
    r.correlation_rx = {ArrayEnd::rx, t_, rho_rx_, skip_rx_};
    return r;
}

AnalysisResult analyze(const ChannelTensor &cir, const AnalysisConfig &config)
{
    require_domain(cir, Domain::delay, "analyze");
    WindowAnalyzer a(config, cir.n_rx(), cir.n_tx(), cir.n_bin(), cir.axes());
    for (std::size_t k = 0; k < cir.n_time(); ++k)
        a.push(cir.slice(k));
    return a.finish();
}

// ---------------------------------------------------------------------------

namespace
{
std::string fmt(double v)
{
    if (is_missing(v))
        return "";
    if (std::isinf(v) && v < 0)
        v = db_floor_sentinel;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
    {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}
} // namespace

void write_metric_csv(const MetricSeries &m, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t_s";
    for (const auto &c : m.columns)
        out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < m.t.size(); ++i)
    {
        out << fmt(m.t[i]);
        for (std::size_t j = 0; j < m.columns.size(); ++j)
            out << ',' << fmt(m.values(i, j));
        out << '\n';
    }
}

MetricSeries read_metric_csv(const std::filesystem::path &path, const std::string &name)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open metric file '" + path.string() + "'");
    MetricSeries m;
    m.name = name.empty() ? path.stem().string() : name;
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path.string() + ": empty file");
    auto head = split_csv(line);
    if (head.empty() || head[0] != "t_s")
        throw FormatError(path.string() + ":1: expected header starting with t_s");
    m.columns.assign(head.begin() + 1, head.end());
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        auto cells = split_csv(line);
        if (cells.size() != head.size())
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(head.size()) + " fields");
        std::vector<double> row;
        for (std::size_t j = 0; j < cells.size(); ++j)
        {
            double v = missing_value;
            if (!cells[j].empty())
            {
                try
                {
                    std::size_t used = 0;
                    v = std::stod(cells[j], &used);
                    if (used != cells[j].size())
                        throw std::invalid_argument("trailing");
                }
                catch (const std::exception &)
                {
                    throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[j] +
                                      "'");
                }
                if (j > 0 && v == db_floor_sentinel)
                    v = -std::numeric_limits<double>::infinity();
            }
            if (j == 0)
            {
                if (is_missing(v))
                    throw FormatError(path.string() + ":" + std::to_string(lineno) + ": missing time");
                m.t.push_back(v);
            }
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    m.values = rows_to_matrix(rows, m.columns.size());
    return m;
}

void write_apdp_csv(const Apdp &a, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t_s,tau_s,power_db\n";
    for (std::size_t w = 0; w < a.n_windows(); ++w)
        for (std::size_t b = 0; b < a.n_bins(); ++b)
            out << fmt(a.t[w]) << ',' << fmt(a.delay(b)) << ',' << fmt(to_db(a.values(w, b))) << '\n';
}

void write_dsd_csv(const Dsd &d, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "t_s,nu_hz,power_db\n";
    for (std::size_t w = 0; w < d.t.size(); ++w)
        for (std::size_t b = 0; b < d.nu.size(); ++b)
            out << fmt(d.t[w]) << ',' << fmt(d.nu[b]) << ',' << fmt(to_db(d.values(w, b))) << '\n';
}

} // namespace v2v
