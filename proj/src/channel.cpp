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

#include "cran/channel.hpp"
#include "cran/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cran
{

void OneRingParams::validate() const
{
    if (!(d0 > 0.0 && ring_radius > 0.0 && eta > 0.0 && wavelength > 0.0 && cell_radius > 0.0))
        throw ConfigError("OneRingParams: all lengths and the path-loss exponent must be positive");
    if (scatterers < 1)
        throw ConfigError("OneRingParams: need at least one scatterer");
}

void ConstraintBounds::validate() const
{
    if (!(p_min > 0.0 && p_min <= p_max))
        throw ConfigError("ConstraintBounds: require 0 < P_min <= P_max");
    if (!(c_min > 0.0 && c_min <= c_max))
        throw ConfigError("ConstraintBounds: require 0 < C_min <= C_max");
}

namespace
{
Point2 uniform_in_disk(Rng &rng, double radius)
{
    const double rho = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {rho * std::cos(phi), rho * std::sin(phi)};
}
} // namespace

Geometry sample_geometry(Rng &rng, std::size_t num_aps, std::size_t num_ues, const OneRingParams &params)
{
    if (num_aps < 1 || num_ues < 1)
        throw ConfigError("sample_geometry: need at least one AP and one UE");
    params.validate();

    Geometry g;
    g.aps.reserve(num_aps);
    g.ues.reserve(num_ues);
    g.scatterers.reserve(num_ues * params.scatterers);
    for (std::size_t i = 0; i < num_aps; ++i)
        g.aps.push_back(uniform_in_disk(rng, params.cell_radius));
    for (std::size_t k = 0; k < num_ues; ++k)
        g.ues.push_back(uniform_in_disk(rng, params.cell_radius));
    for (std::size_t k = 0; k < num_ues; ++k)
        for (std::size_t n = 0; n < params.scatterers; ++n)
        {
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            g.scatterers.push_back(
                {g.ues[k][0] + params.ring_radius * std::cos(theta), g.ues[k][1] + params.ring_radius * std::sin(theta)});
        }
    return g;
}

double pathloss(double distance_plus_r, const OneRingParams &params)
{
    return 1.0 / (1.0 + std::pow(distance_plus_r / params.d0, params.eta));
}

CMatrix one_ring_channel(const Geometry &geometry, Rng &rng, const OneRingParams &params)
{
    const std::size_t m = geometry.num_aps();
    const std::size_t k_count = geometry.num_ues();
    const std::size_t n_scat = params.scatterers;
    if (geometry.scatterers.size() != k_count * n_scat)
        throw ConfigError("one_ring_channel: scatterer count does not match params");

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_scat));
    const double two_pi = 2.0 * std::numbers::pi;
    CMatrix h(m, k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t n = 0; n < n_scat; ++n)
        {
            const double rho = two_pi * rng.uniform();
            const Point2 &s = geometry.scatterers[k * n_scat + n];
            for (std::size_t i = 0; i < m; ++i)
            {
                const double d = std::hypot(geometry.aps[i][0] - s[0], geometry.aps[i][1] - s[1]);
                const double path = d + params.ring_radius;
                const double amplitude = std::sqrt(pathloss(path, params));
                const double phase = -two_pi * path / params.wavelength + rho;
                h(i, k) += inv_sqrt_n * std::polar(amplitude, phase);
            }
        }
    return h;
}

Constraints sample_constraints(Rng &rng, const ConstraintBounds &bounds)
{
    bounds.validate();
    const double lo_db = 10.0 * std::log10(bounds.p_min);
    const double hi_db = 10.0 * std::log10(bounds.p_max);
    double p = bounds.p_min == bounds.p_max ? bounds.p_min : std::pow(10.0, rng.uniform(lo_db, hi_db) / 10.0);
    p = std::clamp(p, bounds.p_min, bounds.p_max);
    const double c = rng.uniform(bounds.c_min, bounds.c_max);
    return {p, c};
}

ChannelSample generate_sample(std::uint64_t seed, std::uint64_t index, std::size_t num_aps, std::size_t num_ues,
                              const OneRingParams &params, const ConstraintBounds &bounds)
{
    Rng rng = Rng::stream(seed, index);
    const Geometry geometry = sample_geometry(rng, num_aps, num_ues, params);
    ChannelSample sample;
    sample.h = one_ring_channel(geometry, rng, params);
    const Constraints c = sample_constraints(rng, bounds);
    sample.power_budget = c.power_budget;
    sample.capacity = c.capacity;
    return sample;
}

std::vector<ChannelSample> generate_dataset(std::size_t n, std::size_t num_aps, std::size_t num_ues,
                                            const OneRingParams &params, const ConstraintBounds &bounds,
                                            std::uint64_t seed, std::size_t threads)
{
    if (n < 1)
        throw ConfigError("generate_dataset: need at least one sample");
    params.validate();
    bounds.validate();
    std::vector<ChannelSample> out(n);
    parallel_for(n, threads,
                 [&](std::size_t i) { out[i] = generate_sample(seed, i, num_aps, num_ues, params, bounds); });
    return out;
}

// ---- binary container -------------------------------------------------------

namespace
{
static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

template <typename T> void put(std::ostream &os, T value)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    os.write(buf, sizeof(T));
}

template <typename T> T get(std::istream &is)
{
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T)))
        throw IoError("dataset: unexpected end of file");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}
} // namespace

std::filesystem::path dataset_header_path(const std::filesystem::path &path)
{
    std::filesystem::path p = path;
    p += ".hdr";
    return p;
}

void write_dataset(const std::filesystem::path &path, const std::vector<ChannelSample> &samples,
                   const DatasetMetadata &meta)
{
    if (samples.empty())
        throw ConfigError("write_dataset: empty dataset");
    const std::size_t m = samples.front().num_aps();
    const std::size_t k_count = samples.front().num_ues();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open dataset for writing: " + path.string());
    os.write("CRBD", 4);
    put<std::uint16_t>(os, kDatasetVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(m));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(k_count));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(samples.size()));
    for (const auto &s : samples)
    {
        if (s.num_aps() != m || s.num_ues() != k_count)
            throw ConfigError("write_dataset: samples have inconsistent dimensions");
        for (std::size_t k = 0; k < k_count; ++k)
            for (std::size_t i = 0; i < m; ++i)
            {
                put<double>(os, s.h(i, k).real());
                put<double>(os, s.h(i, k).imag());
            }
        put<double>(os, s.power_budget);
        put<double>(os, s.capacity);
    }
    if (!os)
        throw IoError("failed writing dataset: " + path.string());

    std::ofstream hdr(dataset_header_path(path), std::ios::trunc);
    if (!hdr)
        throw IoError("cannot open dataset header for writing: " + dataset_header_path(path).string());
    hdr << std::setprecision(17);
    hdr << "format=CRBD\n"
        << "version=" << kDatasetVersion << "\n"
        << "M=" << m << "\nK=" << k_count << "\nn=" << samples.size() << "\n"
        << "seed=" << meta.seed << "\n"
        << "d0=" << meta.params.d0 << "\nring_radius=" << meta.params.ring_radius << "\neta=" << meta.params.eta
        << "\nscatterers=" << meta.params.scatterers << "\nwavelength=" << meta.params.wavelength
        << "\ncell_radius=" << meta.params.cell_radius << "\n"
        << "p_min=" << meta.bounds.p_min << "\np_max=" << meta.bounds.p_max << "\nc_min=" << meta.bounds.c_min
        << "\nc_max=" << meta.bounds.c_max << "\n";
    if (!hdr)
        throw IoError("failed writing dataset header");
}

std::vector<ChannelSample> read_dataset(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open dataset: " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CRBD", 4) != 0)
        throw IoError("not a CRBD dataset: " + path.string());
    const auto version = get<std::uint16_t>(is);
    if (version != kDatasetVersion)
        throw IoError("unsupported dataset version " + std::to_string(version));
    const std::size_t m = get<std::uint32_t>(is);
    const std::size_t k_count = get<std::uint32_t>(is);
    const std::size_t n = get<std::uint32_t>(is);
    if (m == 0 || k_count == 0)
        throw IoError("dataset has zero dimension");

    std::vector<ChannelSample> out(n);
    for (auto &s : out)
    {
        s.h = CMatrix(m, k_count);
        for (std::size_t k = 0; k < k_count; ++k)
            for (std::size_t i = 0; i < m; ++i)
            {
                const double re = get<double>(is);
                const double im = get<double>(is);
                s.h(i, k) = {re, im};
            }
        s.power_budget = get<double>(is);
        s.capacity = get<double>(is);
    }
    return out;
}

} // namespace cran
