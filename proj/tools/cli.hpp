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

#ifndef CRAN_TOOLS_CLI_HPP
#define CRAN_TOOLS_CLI_HPP

#include "cran/baselines.hpp"
#include "cran/channel.hpp"
#include "cran/neuralnet.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace cran::cli
{

enum ExitCode : int
{
    kOk = 0,
    kVerifyFailed = 1,
    kUsage = 2,
    kIo = 3,
};

/// Every tunable the subcommands read. Filled from a preset, then CRAN_SEED,
/// then a key=value config file, then command-line flags.
struct RunConfig
{
    std::string preset = "desk";
    std::size_t m = 3;
    std::size_t k = 3;
    std::string variant = "proposed";
    std::size_t depth = 5;
    std::size_t width = 0; // 0: 13 M K
    std::size_t batch = 256;
    std::size_t max_iter = 50000;
    std::size_t val_interval = 500;
    std::size_t patience = 10;
    double lr = 1e-3;
    double lr_decay = 0.5;
    std::size_t lr_patience = 3;
    std::size_t stats_samples = 4096;
    std::size_t n_val = 1000;
    std::size_t n_test = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;

    std::size_t ls_restarts = 3;
    std::size_t ls_max_iter = 1000;
    double ls_tol = 1e-9;
    double ls_step = 0.1;

    OneRingParams ring;
    ConstraintBounds bounds;

    /// Throws ConfigError on an unknown key or a malformed value.
    void set(const std::string &key, const std::string &value);
    /// key=value lines in a stable order, for CSV metadata.
    std::vector<std::string> describe() const;
    LocalSearchConfig local_search() const;
};

/// Names accepted by RunConfig::set, in describe() order.
const std::vector<std::string> &config_keys();

RunConfig preset(const std::string &name);

/// Flat key=value file; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string &path);

/// Distinct, reproducible seeds for the data streams of one master seed.
std::uint64_t derived_seed(std::uint64_t master, std::uint64_t purpose);

enum SeedPurpose : std::uint64_t
{
    kTrainStream = 1,
    kValidationSet = 2,
    kTestSet = 3,
    kModelInit = 4,
    kLocalSearch = 5,
};

std::string git_describe();

/// '#'-prefixed replay header shared by every CSV the tool writes.
void write_csv_metadata(std::ostream &os, const std::string &command, const RunConfig &rc,
                        const std::vector<std::string> &extra = {});

/// Runs the property suites behind `cranopt verify`.
struct VerifyOptions
{
    std::uint64_t seed = 1;
    std::size_t feasibility_samples = 10000;
    std::size_t gradient_configs = 5;
    bool inject_scale_fault = false;
};

int run_verify(const VerifyOptions &opts, std::ostream &out);

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace cran::cli

#endif
