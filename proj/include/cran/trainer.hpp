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

#ifndef CRAN_TRAINER_HPP
#define CRAN_TRAINER_HPP

#include "cran/channel.hpp"
#include "cran/cranmodel.hpp"
#include "cran/neuralnet.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran
{

/// Training hit a NaN/Inf loss. `sample` is the position inside the offending
/// mini-batch, or -1 if the loss was finite per sample but the gradient was not.
class NonFiniteLossError : public std::runtime_error
{
public:
    NonFiniteLossError(std::size_t iteration, long sample, const std::string &what);
    std::size_t iteration() const { return iteration_; }
    long sample() const { return sample_; }

private:
    std::size_t iteration_;
    long sample_;
};

struct TrainConfig
{
    Variant variant = Variant::proposed;
    std::size_t num_aps = 3;
    std::size_t num_ues = 3;
    std::size_t depth = 5;
    std::size_t hidden_width = 0; // 0: 13 M K

    std::size_t batch_size = 256;
    std::size_t max_iterations = 50000;
    std::size_t validation_interval = 500;
    std::size_t patience = 10;    // validations without improvement before stopping
    double learning_rate = 1e-3;
    double lr_decay = 0.5;        // applied after every `lr_patience` stale validations
    std::size_t lr_patience = 3;
    std::size_t stats_samples = 4096; // input standardisation and eval-mode statistics set
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::filesystem::path checkpoint_path; // if set, best snapshot is written on each improvement

    MlpConfig model_config() const;
    void validate() const;
};

/// Supplies training mini-batches. Implementations must be deterministic given
/// their construction arguments.
class BatchSource
{
public:
    virtual ~BatchSource() = default;
    virtual std::vector<SystemInstance> next_batch(std::size_t size) = 0;
    /// Fixed sample set used to finalise batch-norm statistics.
    virtual std::vector<SystemInstance> stats_set(std::size_t max_size) const = 0;
};

/// Infinite-data regime: every batch is freshly drawn from the channel model.
class OnlineSource : public BatchSource
{
public:
    OnlineSource(std::size_t num_aps, std::size_t num_ues, OneRingParams params, ConstraintBounds bounds,
                 std::uint64_t seed);
    std::vector<SystemInstance> next_batch(std::size_t size) override;
    std::vector<SystemInstance> stats_set(std::size_t max_size) const override;

private:
    std::size_t m_;
    std::size_t k_;
    OneRingParams params_;
    ConstraintBounds bounds_;
    std::uint64_t seed_;
    std::uint64_t cursor_ = 0;
};

/// Fixed finite training set, reshuffled every epoch.
class DatasetSource : public BatchSource
{
public:
    DatasetSource(std::vector<ChannelSample> samples, std::uint64_t seed);
    std::vector<SystemInstance> next_batch(std::size_t size) override;
    std::vector<SystemInstance> stats_set(std::size_t max_size) const override;

private:
    void reshuffle();

    std::vector<SystemInstance> samples_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
    std::uint64_t seed_;
    std::uint64_t epoch_ = 0;
};

std::vector<SystemInstance> to_instances(std::span<const ChannelSample> samples);

struct HistoryRow
{
    std::size_t iteration = 0;
    double train_loss = 0.0;    // mean mini-batch loss since the previous row
    double val_sum_rate = 0.0;  // eval-mode mean sum rate on the validation set
    double learning_rate = 0.0;
    double wall_ms = 0.0;       // since the start of training
};

struct TrainReport
{
    std::vector<HistoryRow> history;
    std::size_t best_iteration = 0;
    double best_val_sum_rate = 0.0;
    std::size_t iterations_run = 0;
    std::string stop_reason; // "patience" or "max_iterations"
    double mean_iteration_ms = 0.0;
    std::size_t excluded_samples = 0;
};

struct TrainResult
{
    MlpModel model; // best-validation snapshot, statistics finalised
    TrainReport report;
};

using ValidationHook = std::function<void(const HistoryRow &)>;

TrainResult train(const TrainConfig &config, BatchSource &source, std::span<const SystemInstance> validation,
                  const ValidationHook &hook = {});

/// -(1/|B|) sum of recovered sum rates, train-mode forward.
double loss_on_batch(const MlpModel &model, std::span<const SystemInstance> batch);

/// -(1/|B|) sum_b sum_rate(solutions[b]); the objective both variants share.
double loss_of_solutions(std::span<const SystemInstance> batch, std::span<const Solution> solutions);

struct EvalReport
{
    double mean_sum_rate = 0.0;
    std::vector<double> per_sample;
    std::size_t violations = 0;
    std::size_t degenerate = 0; // all-zero beamformers; rate counted as 0
    std::size_t nonfinite = 0;  // NaN/Inf network outputs; rate NaN, so the mean is NaN too
};

/// Eval-mode inference, recovery and feasibility check on every sample.
EvalReport evaluate(const MlpModel &model, std::span<const SystemInstance> samples, std::size_t threads = 1);

void write_history_csv(std::ostream &os, const TrainReport &report);

} // namespace cran

#endif
