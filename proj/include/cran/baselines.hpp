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

#ifndef CRAN_BASELINES_HPP
#define CRAN_BASELINES_HPP

#include "cran/cranmodel.hpp"

#include <cstdint>
#include <vector>

namespace cran
{

/// Matched filter per UE with a common power, then scaled into the feasible
/// set. A zero channel column gets a zero beam.
Solution mrt_uniform(const SystemInstance &instance);

struct LocalSearchConfig
{
    double initial_step = 0.1;  // relative to ||v||_F
    std::size_t max_iterations = 1000;
    double tolerance = 1e-9;    // stop once an accepted step gains less than this (bit)
    std::size_t restarts = 3;   // MRT, regularised zero-forcing, then random starts
    std::uint64_t seed = 0;     // random restarts only

    void validate() const;
};

struct LocalSearchResult
{
    Solution solution;
    double sum_rate = 0.0;
    bool converged = false;      // best restart stopped on tolerance, not on the iteration cap
    std::size_t iterations = 0;  // summed over restarts
    std::size_t best_restart = 0;
    std::vector<double> history; // objective after each accepted step of the best restart
};

/// Projected gradient ascent on the real and imaginary coordinates of v.
/// Every iterate is rescaled onto the feasible boundary, and a step is only
/// accepted if it raises the sum rate (backtracking: halve on rejection,
/// double on acceptance).
LocalSearchResult local_search(const SystemInstance &instance, const LocalSearchConfig &config = {});

struct OracleResult
{
    double sum_rate = 0.0;
    Solution solution;
    std::size_t evaluated = 0;
};

/// Exhaustive grid over per-entry amplitudes {j/resolution} and phases
/// {2 pi j/resolution}; the first entry is kept real. Refuses M*K > 3.
OracleResult brute_force_oracle(const SystemInstance &instance, std::size_t resolution);

inline constexpr std::size_t kOracleMaxEntries = 3;

} // namespace cran

#endif
