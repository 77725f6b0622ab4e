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


#include "v2v/tensor_io.hpp"

#include "v2v/errors.hpp"

#include <bit>
#include <cstring>
#include <vector>

namespace v2v
{

static_assert(std::endian::native == std::endian::little, "tensor I/O assumes a little-endian host");

namespace
{
constexpr char magic[4] = {'V', '2', 'V', 'C'};

template <class T> void put(std::vector<char> &buf, T v)
{
    const char *p = reinterpret_cast<const char *>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T> T get(const char *&p)
{
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

std::vector<char> encode(const TensorHeader &h)
{
    std::vector<char> buf(magic, magic + 4);
    put<std::int32_t>(buf, h.version);
    put<std::int32_t>(buf, std::int32_t(h.domain));
    put<std::int32_t>(buf, std::int32_t(h.n_rx));
    put<std::int32_t>(buf, std::int32_t(h.n_tx));
    put<std::int32_t>(buf, std::int32_t(h.n_time));
    put<std::int32_t>(buf, std::int32_t(h.n_bin));
    put<double>(buf, h.axes.t0);
    put<double>(buf, h.axes.dt);
    put<double>(buf, h.axes.bin0);
    put<double>(buf, h.axes.dbin);
    put<double>(buf, h.axes.carrier);
    return buf;
}
} // namespace

TensorWriter::TensorWriter(const std::filesystem::path &path, TensorHeader header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), header_(header)
{
    if (!out_)
        throw std::runtime_error("cannot write tensor file '" + path.string() + "'");
    if (header_.slice_size() == 0)
        throw std::invalid_argument("tensor writer: empty slice shape");
    header_.n_time = 0;
    const auto buf = encode(header_);
    out_.write(buf.data(), std::streamsize(buf.size()));
}

TensorWriter::~TensorWriter()
{
    try
    {
        finish();
    }
    catch (...)
    {
    }
}

void TensorWriter::write_slice(std::span<const cplx> slice)
{
    if (finished_)
        throw std::logic_error("tensor writer: already finished");
    if (slice.size() != header_.slice_size())
        throw std::invalid_argument("tensor writer: slice size mismatch");
    std::vector<float> buf(2 * slice.size());
    for (std::size_t i = 0; i < slice.size(); ++i)
    {
        buf[2 * i] = float(slice[i].real());
        buf[2 * i + 1] = float(slice[i].imag());
    }
    out_.write(reinterpret_cast<const char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    if (!out_)
        throw std::runtime_error("write failed on '" + path_.string() + "'");
    ++written_;
}

void TensorWriter::finish()
{
    if (finished_)
        return;
    finished_ = true;
    header_.n_time = written_;
    const auto buf = encode(header_);
    out_.seekp(0);
    out_.write(buf.data(), std::streamsize(buf.size()));
    out_.close();
    if (!out_)
        throw std::runtime_error("write failed on '" + path_.string() + "'");
}

TensorReader::TensorReader(const std::filesystem::path &path) : path_(path), in_(path, std::ios::binary)
{
    if (!in_)
        throw std::runtime_error("cannot open tensor file '" + path.string() + "'");
    char buf[tensor_header_bytes];
    in_.read(buf, tensor_header_bytes);
    if (in_.gcount() != std::streamsize(tensor_header_bytes))
        throw FormatError(path.string() + ": truncated header");
    if (std::memcmp(buf, magic, 4) != 0)
        throw FormatError(path.string() + ": bad magic, not a V2VC tensor file");
    const char *p = buf + 4;
    header_.version = get<std::int32_t>(p);
    if (header_.version != 1)
        throw FormatError(path.string() + ": unsupported version " + std::to_string(header_.version));
    const auto domain = get<std::int32_t>(p);
    if (domain != 0 && domain != 1)
        throw FormatError(path.string() + ": bad domain flag");
    header_.domain = Domain(domain);
    std::int32_t dims[4];
    for (auto &d : dims)
    {
        d = get<std::int32_t>(p);
        if (d < 0)
            throw FormatError(path.string() + ": negative dimension");
    }
    header_.n_rx = std::size_t(dims[0]);
    header_.n_tx = std::size_t(dims[1]);
    header_.n_time = std::size_t(dims[2]);
    header_.n_bin = std::size_t(dims[3]);
    header_.axes.t0 = get<double>(p);
    header_.axes.dt = get<double>(p);
    header_.axes.bin0 = get<double>(p);
    header_.axes.dbin = get<double>(p);
    header_.axes.carrier = get<double>(p);
    if (header_.slice_size() == 0)
        throw FormatError(path.string() + ": zero dimension");

    const auto size = std::filesystem::file_size(path);
    const auto expect = tensor_header_bytes + header_.n_time * header_.slice_size() * 8;
    if (size != expect)
        throw FormatError(path.string() + ": payload has " + std::to_string(size - tensor_header_bytes) +
                          " bytes, header implies " + std::to_string(expect - tensor_header_bytes));
}

bool TensorReader::read_slice(std::span<cplx> slice)
{
    if (slice.size() != header_.slice_size())
        throw std::invalid_argument("tensor reader: slice size mismatch");
    if (next_ >= header_.n_time)
        return false;
    std::vector<float> buf(2 * slice.size());
    in_.read(reinterpret_cast<char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    if (in_.gcount() != std::streamsize(buf.size() * sizeof(float)))
        throw FormatError(path_.string() + ": truncated payload");
    for (std::size_t i = 0; i < slice.size(); ++i)
        slice[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    ++next_;
    return true;
}

void write_tensor(const ChannelTensor &t, const std::filesystem::path &path)
{
    TensorHeader h;
    h.domain = t.domain();
    h.n_rx = t.n_rx();
    h.n_tx = t.n_tx();
    h.n_bin = t.n_bin();
    h.axes = t.axes();
    TensorWriter w(path, h);
    for (std::size_t k = 0; k < t.n_time(); ++k)
        w.write_slice(t.slice(k));
    w.finish();
}

ChannelTensor read_tensor(const std::filesystem::path &path)
{
    TensorReader r(path);
    const auto &h = r.header();
    if (h.n_time == 0)
        throw FormatError(path.string() + ": tensor has no time steps");
    ChannelTensor t(h.domain, h.n_time, h.n_rx, h.n_tx, h.n_bin, h.axes);
    for (std::size_t k = 0; k < h.n_time; ++k)
        r.read_slice(t.slice(k));
    return t;
}

void quantize_complex64(std::span<cplx> values)
{
    for (auto &v : values)
        v = cplx(double(float(v.real())), double(float(v.imag())));
}

} // namespace v2v
