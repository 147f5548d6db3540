// SPDX-License-Identifier: Apache-2.0
//
// cranopt - learned cooperative beamforming and fronthaul quantization for C-RAN
// Copyright (C) 2026 The cranopt authors
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

#ifndef CRAN_CHANNEL_HPP
#define CRAN_CHANNEL_HPP

#include "cran/linalg.hpp"
#include "cran/random.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran
{

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// One-ring scattering model parameters. Lengths in metres.
struct OneRingParams
{
    double d0 = 30.0;           // reference distance
    double ring_radius = 5.0;   // scatterer ring radius r around each UE
    double eta = 3.0;           // path-loss exponent
    std::size_t scatterers = 2; // N
    double wavelength = 0.15;   // carrier wavelength
    double cell_radius = 100.0;

    void validate() const;
};

using Point2 = std::array<double, 2>;

struct Geometry
{
    std::vector<Point2> aps;        // M
    std::vector<Point2> ues;        // K
    std::vector<Point2> scatterers; // K*N, UE-major: index k*N + n

    std::size_t num_aps() const { return aps.size(); }
    std::size_t num_ues() const { return ues.size(); }
    bool operator==(const Geometry &) const = default;
};

/// One problem instance {h, P, C}. Column k of h is the channel of UE k.
struct ChannelSample
{
    CMatrix h;                 // M x K
    double power_budget = 1.0; // P, linear, noise-normalised
    double capacity = 1.0;     // C, bit/symbol

    std::size_t num_aps() const { return h.rows(); }
    std::size_t num_ues() const { return h.cols(); }
    bool operator==(const ChannelSample &) const = default;
};

struct ConstraintBounds
{
    double p_min = 1.0;
    double p_max = 1e3;
    double c_min = 2.0;
    double c_max = 10.0;

    void validate() const;
};

Geometry sample_geometry(Rng &rng, std::size_t num_aps, std::size_t num_ues, const OneRingParams &params);

/// 1 / (1 + ((d + r) / d0)^eta)
double pathloss(double distance_plus_r, const OneRingParams &params);

/// Draws the common per-path phases from rng; the rest is fixed by geometry.
CMatrix one_ring_channel(const Geometry &geometry, Rng &rng, const OneRingParams &params);

struct Constraints
{
    double power_budget;
    double capacity;
};

/// P is log-uniform in [p_min, p_max] (uniform in dB), C uniform in [c_min, c_max].
Constraints sample_constraints(Rng &rng, const ConstraintBounds &bounds);

/// Sample `index` of the dataset with master seed `seed`; a pure function of its arguments.
ChannelSample generate_sample(std::uint64_t seed, std::uint64_t index, std::size_t num_aps, std::size_t num_ues,
                              const OneRingParams &params, const ConstraintBounds &bounds);

std::vector<ChannelSample> generate_dataset(std::size_t n, std::size_t num_aps, std::size_t num_ues,
                                            const OneRingParams &params, const ConstraintBounds &bounds,
                                            std::uint64_t seed, std::size_t threads = 1);

// Binary dataset container:
//   "CRBD" | u16 version | u32 M | u32 K | u32 n   (little endian)
//   per sample: 2*M*K f64 (re, im interleaved, column-major by UE) | f64 P | f64 C
// plus a sidecar text header <path>.hdr with the generation parameters.
inline constexpr std::uint16_t kDatasetVersion = 1;

struct DatasetMetadata
{
    OneRingParams params;
    ConstraintBounds bounds;
    std::uint64_t seed = 0;
};

void write_dataset(const std::filesystem::path &path, const std::vector<ChannelSample> &samples,
                   const DatasetMetadata &meta);
std::vector<ChannelSample> read_dataset(const std::filesystem::path &path);

std::filesystem::path dataset_header_path(const std::filesystem::path &path);

} // namespace cran

#endif
