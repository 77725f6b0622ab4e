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


// Independent reference computations for the tests. Nothing here calls into
// the library's numerical code paths.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <random>
#include <vector>

namespace oracle
{

constexpr long double c0 = 299792458.0L;
constexpr long double pi_l = 3.141592653589793238462643383279502884L;

// Friis free-space power gain in dB, 20 log10(lambda / (4 pi d)).
inline double friis_db(double f, double d)
{
    const long double lambda = c0 / f;
    return double(20.0L * std::log10(lambda / (4.0L * pi_l * d)));
}

// Two-ray interference over a reflecting ground for isotropic antennas:
// (lambda/4pi)^2 |exp(-jk d1)/d1 + gamma exp(-jk d2)/d2|^2 in dB, with d1 the
// direct and d2 the image-ray length.
inline double two_ray_db(double f, double d, double h_tx, double h_rx, std::complex<double> gamma)
{
    using C = std::complex<long double>;
    const long double lambda = c0 / f;
    const long double k = 2.0L * pi_l / lambda;
    const long double d1 = std::sqrt((long double)d * d + (long double)(h_tx - h_rx) * (h_tx - h_rx));
    const long double d2 = std::sqrt((long double)d * d + (long double)(h_tx + h_rx) * (h_tx + h_rx));
    const C e = std::polar(1.0L / d1, -k * d1) + C(gamma) * std::polar(1.0L / d2, -k * d2);
    const long double a = lambda / (4.0L * pi_l);
    return double(10.0L * std::log10(std::norm(e) * a * a));
}

// Fresnel coefficients through the refractive index and the transmission
// angle (Snell), a different algebraic route than the library's.
inline std::pair<std::complex<double>, std::complex<double>> fresnel(double eps_r, double sigma, double theta,
                                                                     double f)
{
    using C = std::complex<long double>;
    const long double eps0 = 8.8541878128e-12L;
    const C eps(eps_r, -sigma / (2.0L * pi_l * f * eps0));
    const C n = std::sqrt(eps);
    const C sin_t = std::sin((long double)theta) / n;
    const C cos_t = std::sqrt(C(1.0L) - sin_t * sin_t);
    const long double ci = std::cos((long double)theta);
    const C rs = (ci - n * cos_t) / (ci + n * cos_t);
    const C rp = (n * ci - cos_t) / (n * ci + cos_t);
    return {std::complex<double>(rs), std::complex<double>(rp)};
}

// Square root of the weighted variance via the pairwise-difference identity
// var = sum_ij p_i p_j (x_i - x_j)^2 / (2 (sum p)^2), in long double.
inline double spread(const std::vector<double> &p, const std::vector<double> &x)
{
    long double num = 0.0L, tot = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        tot += p[i];
        for (std::size_t j = 0; j < p.size(); ++j)
        {
            const long double d = (long double)x[i] - (long double)x[j];
            num += (long double)p[i] * p[j] * d * d;
        }
    }
    return double(std::sqrt(num / (2.0L * tot * tot)));
}

// Möller-Trumbore segment/triangle test on the open segment, excluding hits
// within `tol` (in length units) of either endpoint.
inline bool segment_hits_triangle(const std::array<double, 3> &a, const std::array<double, 3> &b,
                                  const std::array<double, 3> &v0, const std::array<double, 3> &v1,
                                  const std::array<double, 3> &v2, double tol)
{
    auto sub = [](auto p, auto q) { return std::array<long double, 3>{(long double)p[0] - q[0], (long double)p[1] - q[1], (long double)p[2] - q[2]}; };
    auto cross = [](auto p, auto q) {
        return std::array<long double, 3>{p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
    };
    auto dot = [](auto p, auto q) { return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]; };
    const auto dir = sub(b, a);
    const auto e1 = sub(v1, v0), e2 = sub(v2, v0);
    const auto h = cross(dir, e2);
    const long double det = dot(e1, h);
    if (std::abs(det) < 1e-18L)
        return false;
    const auto s = sub(a, v0);
    const long double u = dot(s, h) / det;
    if (u < 0.0L || u > 1.0L)
        return false;
    const auto q = cross(s, e1);
    const long double v = dot(dir, q) / det;
    if (v < 0.0L || u + v > 1.0L)
        return false;
    const long double t = dot(e2, q) / det;
    const long double len = std::sqrt(dot(dir, dir));
    return t * len > tol && (1.0L - t) * len > tol;
}

// Naive O(N^2) DFT, unnormalized forward.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>> &x)
{
    const std::size_t N = x.size();
    std::vector<std::complex<double>> out(N);
    for (std::size_t k = 0; k < N; ++k)
    {
        std::complex<long double> acc = 0.0L;
        for (std::size_t n = 0; n < N; ++n)
            acc += std::complex<long double>(x[n]) * std::polar(1.0L, -2.0L * pi_l * (long double)((k * n) % N) / N);
        out[k] = std::complex<double>(acc);
    }
    return out;
}

// Eigenvalues of a Hermitian matrix as the roots of its characteristic
// polynomial (Faddeev-LeVerrier coefficients, Durand-Kerner iteration).
inline std::vector<double> hermitian_eigenvalues(const std::vector<std::vector<std::complex<double>>> &A)
{
    using C = std::complex<long double>;
    const std::size_t n = A.size();
    std::vector<std::vector<C>> M(n, std::vector<C>(n, 0.0L)), AM(n, std::vector<C>(n));
    std::vector<C> coef(n + 1);
    coef[n] = 1.0L; // monic
    for (std::size_t k = 1; k <= n; ++k)
    {
        // M_k = A M_{k-1} + c_{n-k+1} I
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                C s = 0.0L;
                for (std::size_t l = 0; l < n; ++l)
                    s += C(A[i][l]) * M[l][j];
                AM[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i)
            AM[i][i] += coef[n - k + 1];
        M = AM;
        C tr = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                tr += C(A[i][l]) * M[l][i];
        coef[n - k] = -tr / (long double)k;
    }
    auto poly = [&](C z) {
        C v = 0.0L;
        for (std::size_t i = n + 1; i-- > 0;)
            v = v * z + coef[i];
        return v;
    };
    std::vector<C> z(n);
    long double bound = 1.0L;
    for (std::size_t i = 0; i < n; ++i)
        bound = std::max(bound, 1.0L + std::abs(coef[i]));
    for (std::size_t i = 0; i < n; ++i)
        z[i] = std::polar(bound, 0.4L + 2.0L * pi_l * i / n);
    for (int it = 0; it < 2000; ++it)
    {
        long double change = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
        {
            C den = 1.0L;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i)
                    den *= z[i] - z[j];
            const C step = poly(z[i]) / den;
            z[i] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-30L * bound)
            break;
    }
    std::vector<double> ev;
    for (auto v : z)
        ev.push_back(double(v.real()));
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

} // namespace oracle
