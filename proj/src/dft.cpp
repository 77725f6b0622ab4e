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


#include "v2v/dft.hpp"

#include "v2v/geometry.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace v2v
{

namespace
{
// FFTW planning is not thread safe, execution with new-array calls is.
fftw_plan plan_for(std::size_t n, int sign)
{
    static std::mutex mu;
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto &p = cache[{n, sign}];
    if (!p)
    {
        fftw_complex *buf = fftw_alloc_complex(n);
        p = fftw_plan_dft_1d(int(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p)
            throw std::runtime_error("fftw planning failed");
    }
    return p;
}

void run(std::complex<double> *data, std::size_t n, int sign)
{
    if (n == 0)
        throw std::invalid_argument("dft: empty input");
    auto *x = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plan_for(n, sign), x, x);
}
} // namespace

void dft_forward(std::complex<double> *data, std::size_t n)
{
    run(data, n, FFTW_FORWARD);
}

void dft_inverse(std::complex<double> *data, std::size_t n)
{
    run(data, n, FFTW_BACKWARD);
    const double s = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i)
        data[i] *= s;
}

std::vector<double> hann_window(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("hann_window: length must be >= 1");
    if (n == 1)
        return {1.0};
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * double(i) / double(n - 1)));
    return w;
}

} // namespace v2v
