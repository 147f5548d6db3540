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

#include "cran/trainer.hpp"
#include "cran/parallel.hpp"
#include "cran/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cran
{

NonFiniteLossError::NonFiniteLossError(std::size_t iteration, long sample, const std::string &what)
    : std::runtime_error(what), iteration_(iteration), sample_(sample)
{
}

MlpConfig TrainConfig::model_config() const
{
    MlpConfig c;
    c.num_aps = num_aps;
    c.num_ues = num_ues;
    c.variant = variant;
    c.depth = depth;
    c.hidden_width = hidden_width == 0 ? MlpConfig::desk_width(num_aps, num_ues) : hidden_width;
    return c;
}

void TrainConfig::validate() const
{
    model_config().validate();
    if (batch_size < 2)
        throw ConfigError("train: batch size must be at least 2");
    if (patience < 1 || lr_patience < 1)
        throw ConfigError("train: patience must be at least 1");
    if (validation_interval < 1)
        throw ConfigError("train: validation interval must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("train: learning rate must be finite and nonnegative");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
        throw ConfigError("train: learning-rate decay must lie in (0, 1]");
    if (stats_samples < 1)
        throw ConfigError("train: statistics set must be nonempty");
    if (threads < 1)
        throw ConfigError("train: need at least one thread");
}

// ---- batch sources ------------------------------------------------------------------

std::vector<SystemInstance> to_instances(std::span<const ChannelSample> samples)
{
    std::vector<SystemInstance> out;
    out.reserve(samples.size());
    for (const auto &s : samples)
        out.push_back(SystemInstance::from_sample(s));
    return out;
}

namespace
{
// separates the statistics set from the training batches of the same seed
constexpr std::uint64_t kStatsStreamSalt = 0x5eed'57a7'0000'0001ULL;
} // namespace

OnlineSource::OnlineSource(std::size_t num_aps, std::size_t num_ues, OneRingParams params, ConstraintBounds bounds,
                           std::uint64_t seed)
    : m_(num_aps), k_(num_ues), params_(params), bounds_(bounds), seed_(seed)
{
    params_.validate();
    bounds_.validate();
}

std::vector<SystemInstance> OnlineSource::next_batch(std::size_t size)
{
    std::vector<SystemInstance> out;
    out.reserve(size);
    for (std::size_t b = 0; b < size; ++b)
        out.push_back(SystemInstance::from_sample(generate_sample(seed_, cursor_++, m_, k_, params_, bounds_)));
    return out;
}

std::vector<SystemInstance> OnlineSource::stats_set(std::size_t max_size) const
{
    std::vector<SystemInstance> out;
    out.reserve(max_size);
    for (std::size_t b = 0; b < max_size; ++b)
        out.push_back(
            SystemInstance::from_sample(generate_sample(seed_ ^ kStatsStreamSalt, b, m_, k_, params_, bounds_)));
    return out;
}

DatasetSource::DatasetSource(std::vector<ChannelSample> samples, std::uint64_t seed)
    : samples_(to_instances(samples)), seed_(seed)
{
    if (samples_.empty())
        throw ConfigError("DatasetSource: training set is empty");
    order_.resize(samples_.size());
    reshuffle();
}

void DatasetSource::reshuffle()
{
    for (std::size_t i = 0; i < order_.size(); ++i)
        order_[i] = i;
    Rng rng = Rng::stream(seed_, epoch_++);
    for (std::size_t i = order_.size(); i > 1; --i)
        std::swap(order_[i - 1], order_[rng.below(i)]);
    pos_ = 0;
}

std::vector<SystemInstance> DatasetSource::next_batch(std::size_t size)
{
    std::vector<SystemInstance> out;
    out.reserve(size);
    for (std::size_t b = 0; b < size; ++b)
    {
        if (pos_ == order_.size())
            reshuffle();
        out.push_back(samples_[order_[pos_++]]);
    }
    return out;
}

std::vector<SystemInstance> DatasetSource::stats_set(std::size_t max_size) const
{
    const std::size_t n = std::min(max_size, samples_.size());
    return {samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(n)};
}

// ---- losses and evaluation ------------------------------------------------------------

double loss_of_solutions(std::span<const SystemInstance> batch, std::span<const Solution> solutions)
{
    if (batch.empty() || batch.size() != solutions.size())
        throw ConfigError("loss_of_solutions: batch and solutions must be nonempty and of equal length");
    double total = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b)
        total += sum_rate(batch[b].h(), solutions[b].v, solutions[b].omega);
    return -total / static_cast<double>(batch.size());
}

double loss_on_batch(const MlpModel &model, std::span<const SystemInstance> batch)
{
    if (batch.empty())
        throw ConfigError("loss_on_batch: empty batch");
    const Matrix out = forward(model, build_input_batch(batch), Mode::train).output;
    double total = 0.0;
    std::size_t valid = 0;
    for (std::size_t b = 0; b < batch.size(); ++b)
    {
        if (!out.col(static_cast<Eigen::Index>(b)).allFinite())
            return std::numeric_limits<double>::quiet_NaN();
        try
        {
            const Solution s =
                solution_from_output(model.config.variant, batch[b], out.col(static_cast<Eigen::Index>(b)));
            total += sum_rate(batch[b].h(), s.v, s.omega);
            ++valid;
        }
        catch (const DegenerateInputError &)
        {
        }
    }
    return valid == 0 ? 0.0 : -total / static_cast<double>(valid);
}

EvalReport evaluate(const MlpModel &model, std::span<const SystemInstance> samples, std::size_t threads)
{
    EvalReport r;
    if (samples.empty())
        return r;
    const Matrix out = predict(model, build_input_batch(samples));
    r.per_sample.assign(samples.size(), 0.0);
    std::vector<char> violated(samples.size(), 0);
    std::vector<char> degenerate(samples.size(), 0);
    std::vector<char> nonfinite(samples.size(), 0);
    parallel_for(samples.size(), threads, [&](std::size_t b) {
        if (!out.col(static_cast<Eigen::Index>(b)).allFinite())
        {
            r.per_sample[b] = std::numeric_limits<double>::quiet_NaN();
            nonfinite[b] = 1;
            return;
        }
        try
        {
            const Solution s =
                solution_from_output(model.config.variant, samples[b], out.col(static_cast<Eigen::Index>(b)));
            r.per_sample[b] = sum_rate(samples[b].h(), s.v, s.omega);
            violated[b] =
                check_feasibility(s.v, s.omega, samples[b].power_budget(), samples[b].beta).feasible ? 0 : 1;
        }
        catch (const DegenerateInputError &)
        {
            degenerate[b] = 1;
        }
    });
    double total = 0.0;
    for (std::size_t b = 0; b < samples.size(); ++b)
    {
        total += r.per_sample[b];
        r.violations += violated[b];
        r.degenerate += degenerate[b];
        r.nonfinite += nonfinite[b];
    }
    r.mean_sum_rate = total / static_cast<double>(samples.size());
    return r;
}

// ---- training loop ----------------------------------------------------------------------

namespace
{
bool all_finite(ParameterSet &grads)
{
    for (const auto &view : tensor_views(grads))
        for (double x : view.values)
            if (!std::isfinite(x))
                return false;
    return true;
}
} // namespace

TrainResult train(const TrainConfig &config, BatchSource &source, std::span<const SystemInstance> validation,
                  const ValidationHook &hook)
{
    config.validate();
    if (validation.empty())
        throw ConfigError("train: validation set is empty");
    const MlpConfig mcfg = config.model_config();
    for (const auto &inst : validation)
        if (inst.h().rows() != mcfg.num_aps || inst.h().cols() != mcfg.num_ues)
            throw ConfigError("train: validation samples do not match (M, K)");

    const auto start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };

    MlpModel model = MlpModel::init(mcfg, config.seed);
    AdamState adam = AdamState::for_model(model, config.learning_rate);
    const std::vector<SystemInstance> stats = source.stats_set(config.stats_samples);
    const Matrix stats_inputs = build_input_batch(std::span<const SystemInstance>(stats));
    fit_input_normalization(model, stats_inputs);

    TrainResult result;
    TrainReport &rep = result.report;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    // evaluates a finalised snapshot; returns true when training should stop
    auto validate_now = [&](std::size_t iteration, double train_loss) {
        MlpModel snapshot = model;
        finalize_statistics(snapshot, stats_inputs);
        const double val = evaluate(snapshot, validation, config.threads).mean_sum_rate;
        HistoryRow row{iteration, train_loss, val, adam.learning_rate, elapsed_ms()};
        rep.history.push_back(row);
        if (hook)
            hook(row);
        if (val > best)
        {
            best = val;
            stale = 0;
            rep.best_iteration = iteration;
            rep.best_val_sum_rate = val;
            result.model = std::move(snapshot);
            if (!config.checkpoint_path.empty())
                save_checkpoint(config.checkpoint_path, result.model);
            return false;
        }
        ++stale;
        if (stale >= config.patience)
            return true;
        if (stale % config.lr_patience == 0)
            adam.learning_rate *= config.lr_decay;
        return false;
    };

    std::vector<SystemInstance> batch = source.next_batch(config.batch_size);
    validate_now(0, loss_on_batch(model, batch));

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    rep.stop_reason = "max_iterations";
    for (std::size_t it = 1; it <= config.max_iterations; ++it)
    {
        if (it > 1)
            batch = source.next_batch(config.batch_size);
        ForwardCache cache;
        PipelineGradient pg = pipeline_gradient(model, batch, config.threads, &cache);
        for (std::size_t b = 0; b < batch.size(); ++b)
            if (!pg.excluded_mask[b] && !std::isfinite(pg.sample_rates[b]))
                throw NonFiniteLossError(it, static_cast<long>(b),
                                         "non-finite sum rate at iteration " + std::to_string(it) +
                                             ", batch position " + std::to_string(b));
        if (!std::isfinite(pg.loss) || !all_finite(pg.grads))
            throw NonFiniteLossError(it, -1, "non-finite loss or gradient at iteration " + std::to_string(it));
        rep.excluded_samples += pg.excluded;
        loss_sum += pg.loss;
        ++loss_count;

        update_running_statistics(model, cache);
        adam_step(model, pg.grads, adam);
        rep.iterations_run = it;

        if (it % config.validation_interval == 0 || it == config.max_iterations)
        {
            const bool stop = validate_now(it, loss_sum / static_cast<double>(loss_count));
            loss_sum = 0.0;
            loss_count = 0;
            if (stop)
            {
                rep.stop_reason = "patience";
                break;
            }
        }
    }
    rep.mean_iteration_ms = rep.iterations_run == 0 ? 0.0 : elapsed_ms() / static_cast<double>(rep.iterations_run);
    return result;
}

void write_history_csv(std::ostream &os, const TrainReport &report)
{
    os << "iteration,train_loss,val_sum_rate,lr,wall_ms\n";
    char buf[160];
    for (const auto &r : report.history)
    {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.3f\n", r.iteration, r.train_loss, r.val_sum_rate,
                      r.learning_rate, r.wall_ms);
        os << buf;
    }
}

} // namespace cran
