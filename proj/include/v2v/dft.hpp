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

#include <complex>
#include <cstddef>
#include <vector>

namespace v2v
{

// X[k] = sum_n x[n] exp(-j 2 pi k n / N), in place.
void dft_forward(std::complex<double> *data, std::size_t n);

// x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N), in place.
void dft_inverse(std::complex<double> *data, std::size_t n);

// Symmetric Hann window 0.5 (1 - cos(2 pi n / (N-1))); a single 1 for N = 1.
std::vector<double> hann_window(std::size_t n);

} // namespace v2v
