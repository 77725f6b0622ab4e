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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>

namespace v2v
{

// Binary tensor file, little-endian:
//   "V2VC", int32 version, domain, M_R, M_T, N_time, N_bin,
//   float64 t0, dt, bin0, dbin, f_carrier,
//   complex64 payload in (time, rx, tx, bin) order.
struct TensorHeader
{
    std::int32_t version = 1;
    Domain domain = Domain::delay;
    std::size_t n_rx = 0, n_tx = 0, n_time = 0, n_bin = 0;
    TensorAxes axes;

    std::size_t slice_size() const { return n_rx * n_tx * n_bin; }
    bool operator==(const TensorHeader &) const = default;
};

inline constexpr std::size_t tensor_header_bytes = 68;

// Writes slices as they are produced; the time count in the header is
// patched on finish().
class TensorWriter
{
  public:
    TensorWriter(const std::filesystem::path &path, TensorHeader header);
    ~TensorWriter();

    void write_slice(std::span<const cplx> slice);
    void finish();
    std::size_t slices_written() const { return written_; }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    TensorHeader header_;
    std::size_t written_ = 0;
    bool finished_ = false;
};

class TensorReader
{
  public:
    // Throws FormatError for a bad magic, version, truncated header or a
    // payload size that disagrees with the header.
    explicit TensorReader(const std::filesystem::path &path);

    const TensorHeader &header() const { return header_; }
    std::size_t position() const { return next_; }

    // Reads the next time slice; false at end of data.
    bool read_slice(std::span<cplx> slice);

  private:
    std::filesystem::path path_;
    std::ifstream in_;
    TensorHeader header_;
    std::size_t next_ = 0;
};

void write_tensor(const ChannelTensor &tensor, const std::filesystem::path &path);
ChannelTensor read_tensor(const std::filesystem::path &path);

// Round every entry to complex64 precision, as stored on disk.
void quantize_complex64(std::span<cplx> values);

} // namespace v2v
