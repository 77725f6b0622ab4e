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

#include <stdexcept>
#include <string>

namespace v2v
{

// Argument errors use std::invalid_argument directly. The types below name
// the failure classes callers (and the CLI exit-code mapping) distinguish.

// Malformed input file: bad syntax, missing or mistyped field.
class FormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// A name in an input file does not resolve (e.g. unknown material).
class ReferenceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Degenerate or invalid geometry (non-planar polygon, self-intersecting footprint, ...).
class GeometryError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Requested computation exceeds a hard complexity cap.
class ComplexityError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Invalid run configuration: unknown key, wrong type, missing file.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Two time axes cannot be aligned.
class AlignmentError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace v2v
