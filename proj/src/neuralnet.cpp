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

#include "cran/neuralnet.hpp"
#include "cran/parallel.hpp"
#include "cran/random.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cran
{

std::string to_string(Variant v)
{
    return v == Variant::proposed ? "proposed" : "dilearn";
}

Variant variant_from_string(const std::string &s)
{
    if (s == "proposed")
        return Variant::proposed;
    if (s == "dilearn")
        return Variant::dilearn;
    throw ConfigError("unknown network variant '" + s + "' (expected proposed or dilearn)");
}

std::size_t MlpConfig::output_dim() const
{
    return variant == Variant::proposed ? 2 * num_ues + num_aps : 2 * num_aps * num_ues;
}

void MlpConfig::validate() const
{
    if (num_aps < 1 || num_ues < 1)
        throw ConfigError("MlpConfig: need at least one AP and one UE");
    if (depth < 2)
        throw ConfigError("MlpConfig: depth must be at least 2");
    if (hidden_width < 1)
        throw ConfigError("MlpConfig: hidden width must be positive");
    if (!(leak > 0.0 && leak < 1.0))
        throw ConfigError("MlpConfig: LReLU slope must lie in (0, 1)");
}

MlpModel MlpModel::init(const MlpConfig &config, std::uint64_t seed)
{
    config.validate();
    MlpModel model;
    model.config = config;
    model.input_mean = Vector::Zero(static_cast<Eigen::Index>(config.input_dim()));
    model.input_scale = Vector::Ones(static_cast<Eigen::Index>(config.input_dim()));
    Rng rng(seed);
    std::size_t fan_in = config.input_dim();
    for (std::size_t l = 0; l < config.depth; ++l)
    {
        const bool output = l + 1 == config.depth;
        const std::size_t fan_out = output ? config.output_dim() : config.hidden_width;
        const double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
        LayerTensors t;
        t.weight.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
        for (Eigen::Index r = 0; r < t.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < t.weight.cols(); ++c)
                t.weight(r, c) = rng.uniform(-bound, bound);
        t.bias = Vector::Zero(static_cast<Eigen::Index>(fan_out));
        if (!output && config.batch_norm)
        {
            t.bn_scale = Vector::Ones(static_cast<Eigen::Index>(fan_out));
            t.bn_shift = Vector::Zero(static_cast<Eigen::Index>(fan_out));
            model.stats.push_back({Vector::Zero(t.bias.size()), Vector::Ones(t.bias.size())});
        }
        model.params.push_back(std::move(t));
        fan_in = fan_out;
    }
    return model;
}

// ---- features and activations -----------------------------------------------------

Vector build_input_features(const ChannelSample &sample)
{
    const std::size_t m = sample.num_aps();
    const std::size_t k_count = sample.num_ues();
    Vector f(static_cast<Eigen::Index>(2 * m * k_count + 2));
    Eigen::Index j = 0;
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t i = 0; i < m; ++i)
        {
            f(j++) = sample.h(i, k).real();
            f(j++) = sample.h(i, k).imag();
        }
    f(j++) = 10.0 * std::log10(sample.power_budget);
    f(j++) = sample.capacity;
    return f;
}

Matrix build_input_batch(std::span<const ChannelSample> samples)
{
    if (samples.empty())
        return {};
    Matrix x(static_cast<Eigen::Index>(2 * samples[0].num_aps() * samples[0].num_ues() + 2),
             static_cast<Eigen::Index>(samples.size()));
    for (std::size_t b = 0; b < samples.size(); ++b)
        x.col(static_cast<Eigen::Index>(b)) = build_input_features(samples[b]);
    return x;
}

Matrix build_input_batch(std::span<const SystemInstance> instances)
{
    if (instances.empty())
        return {};
    Matrix x(static_cast<Eigen::Index>(2 * instances[0].h().rows() * instances[0].h().cols() + 2),
             static_cast<Eigen::Index>(instances.size()));
    for (std::size_t b = 0; b < instances.size(); ++b)
        x.col(static_cast<Eigen::Index>(b)) = build_input_features(instances[b].sample);
    return x;
}

double sigplus(double z)
{
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ---- forward / backward ---------------------------------------------------------------

namespace
{
bool is_hidden(const MlpModel &model, std::size_t l)
{
    return l + 1 < model.params.size();
}

Matrix standardize(const MlpModel &model, const Eigen::Ref<const Matrix> &inputs)
{
    return ((inputs.colwise() - model.input_mean).array().colwise() * model.input_scale.array()).matrix();
}
} // namespace

void fit_input_normalization(MlpModel &model, const Matrix &inputs)
{
    if (inputs.rows() != static_cast<Eigen::Index>(model.config.input_dim()) || inputs.cols() < 1)
        throw ConfigError("fit_input_normalization: inputs do not match the model");
    const double n = static_cast<double>(inputs.cols());
    model.input_mean = inputs.rowwise().mean();
    const Vector var = (inputs.colwise() - model.input_mean).array().square().rowwise().sum() / n;
    model.input_scale.resize(var.size());
    for (Eigen::Index i = 0; i < var.size(); ++i)
        model.input_scale(i) = var(i) > 0.0 ? 1.0 / std::sqrt(var(i)) : 1.0;
}

ForwardResult forward(const MlpModel &model, const Matrix &inputs, Mode mode)
{
    const MlpConfig &cfg = model.config;
    if (inputs.rows() != static_cast<Eigen::Index>(cfg.input_dim()))
        throw ConfigError("forward: input feature length does not match the model");
    if (inputs.cols() < 1)
        throw ConfigError("forward: empty batch");
    if (mode == Mode::train && cfg.batch_norm && inputs.cols() < 2)
        throw ConfigError("forward: train mode needs a batch of at least two samples");

    const double n = static_cast<double>(inputs.cols());
    ForwardResult res;
    res.cache.mode = mode;
    res.cache.revision = model.revision;
    res.cache.batch = static_cast<std::size_t>(inputs.cols());
    res.cache.layers.resize(model.params.size());

    Matrix d = standardize(model, inputs);
    for (std::size_t l = 0; l < model.params.size(); ++l)
    {
        const LayerTensors &t = model.params[l];
        LayerCache &c = res.cache.layers[l];
        c.input = std::move(d);
        c.preact = (t.weight * c.input).colwise() + t.bias;
        if (!is_hidden(model, l))
        {
            if (cfg.variant == Variant::proposed)
                res.output = c.preact.unaryExpr([](double z) { return sigplus(z); });
            else
                res.output = c.preact;
            break;
        }
        if (cfg.batch_norm)
        {
            if (mode == Mode::train)
            {
                c.mean = c.preact.rowwise().mean();
                const Vector var = (c.preact.colwise() - c.mean).array().square().rowwise().sum() / n;
                c.inv_std = (var.array() + kBatchNormEpsilon).rsqrt();
            }
            else
            {
                c.mean = model.stats[l].mean;
                c.inv_std = (model.stats[l].var.array() + kBatchNormEpsilon).rsqrt();
            }
            c.normed = (c.preact.colwise() - c.mean).array().colwise() * c.inv_std.array();
            c.activ_in = (c.normed.array().colwise() * t.bn_scale.array()).matrix().colwise() + t.bn_shift;
        }
        else
        {
            c.activ_in = c.preact;
        }
        const double leak = cfg.leak;
        d = c.activ_in.unaryExpr([leak](double z) { return lrelu(z, leak); });
    }
    return res;
}

Matrix predict(const MlpModel &model, const Matrix &inputs)
{
    const MlpConfig &cfg = model.config;
    if (inputs.rows() != static_cast<Eigen::Index>(cfg.input_dim()))
        throw ConfigError("predict: input feature length does not match the model");
    if (inputs.cols() < 1)
        throw ConfigError("predict: empty batch");

    // fold bias and normalisation into one per-unit affine map after the product
    const std::size_t layers = model.params.size();
    std::vector<Vector> gain(layers);
    std::vector<Vector> offset(layers);
    for (std::size_t l = 0; l < layers; ++l)
    {
        const LayerTensors &t = model.params[l];
        if (is_hidden(model, l) && cfg.batch_norm)
        {
            const Vector inv_std = (model.stats[l].var.array() + kBatchNormEpsilon).rsqrt();
            gain[l] = t.bn_scale.cwiseProduct(inv_std);
            offset[l] = t.bn_shift + gain[l].cwiseProduct(t.bias - model.stats[l].mean);
        }
        else
        {
            gain[l] = Vector::Ones(t.bias.size());
            offset[l] = t.bias;
        }
    }

    constexpr Eigen::Index kChunk = 256;
    const Eigen::Index total = inputs.cols();
    Matrix out(static_cast<Eigen::Index>(cfg.output_dim()), total);
    Matrix a;
    Matrix z;
    const double leak = cfg.leak;
    for (Eigen::Index c0 = 0; c0 < total; c0 += kChunk)
    {
        const Eigen::Index n = std::min(kChunk, total - c0);
        a = standardize(model, inputs.middleCols(c0, n));
        for (std::size_t l = 0; l < layers; ++l)
        {
            z.noalias() = model.params[l].weight * a;
            auto za = z.array();
            za = (za.colwise() * gain[l].array()).colwise() + offset[l].array();
            if (is_hidden(model, l))
                za = za.max(leak * za); // leak < 1
            else if (cfg.variant == Variant::proposed)
                za = za.unaryExpr([](double y) { return sigplus(y); });
            std::swap(a, z);
        }
        out.middleCols(c0, n) = a;
    }
    return out;
}

void update_running_statistics(MlpModel &model, const ForwardCache &cache, double momentum)
{
    if (!model.config.batch_norm)
        return;
    if (cache.mode != Mode::train || cache.layers.size() != model.params.size())
        throw ContractError("update_running_statistics: needs a train-mode cache of this model");
    const double n = static_cast<double>(cache.batch);
    for (std::size_t l = 0; l + 1 < model.params.size(); ++l)
    {
        const LayerCache &c = cache.layers[l];
        const Vector var = (c.preact.colwise() - c.mean).array().square().rowwise().sum() / n;
        model.stats[l].mean = momentum * model.stats[l].mean + (1.0 - momentum) * c.mean;
        model.stats[l].var = momentum * model.stats[l].var + (1.0 - momentum) * var;
    }
}

void finalize_statistics(MlpModel &model, const Matrix &inputs)
{
    if (!model.config.batch_norm)
        return;
    if (inputs.cols() < 1)
        throw ConfigError("finalize_statistics: empty dataset");
    const double n = static_cast<double>(inputs.cols());
    Matrix d = standardize(model, inputs);
    for (std::size_t l = 0; l + 1 < model.params.size(); ++l)
    {
        const LayerTensors &t = model.params[l];
        const Matrix a = (t.weight * d).colwise() + t.bias;
        const Vector mean = a.rowwise().mean();
        const Vector var = (a.colwise() - mean).array().square().rowwise().sum() / n;
        model.stats[l] = {mean, var};
        const Vector inv_std = (var.array() + kBatchNormEpsilon).rsqrt();
        const Matrix z = (((a.colwise() - mean).array().colwise() * inv_std.array()).colwise() * t.bn_scale.array())
                             .matrix()
                             .colwise() +
                         t.bn_shift;
        const double leak = model.config.leak;
        d = z.unaryExpr([leak](double v) { return lrelu(v, leak); });
    }
}

ParameterSet zeros_like(const ParameterSet &params)
{
    ParameterSet out;
    out.reserve(params.size());
    for (const auto &t : params)
        out.push_back({Matrix::Zero(t.weight.rows(), t.weight.cols()), Vector::Zero(t.bias.size()),
                       Vector::Zero(t.bn_scale.size()), Vector::Zero(t.bn_shift.size())});
    return out;
}

ParameterSet backward(const MlpModel &model, const ForwardCache &cache, const Matrix &d_output)
{
    if (cache.mode != Mode::train)
        throw ContractError("backward: cache was produced in eval mode");
    if (cache.revision != model.revision || cache.layers.size() != model.params.size())
        throw ContractError("backward: cache is stale or belongs to another model");
    if (d_output.rows() != static_cast<Eigen::Index>(model.config.output_dim()) ||
        d_output.cols() != static_cast<Eigen::Index>(cache.batch))
        throw ContractError("backward: upstream gradient has the wrong shape");

    const MlpConfig &cfg = model.config;
    const double n = static_cast<double>(cache.batch);
    ParameterSet grads = zeros_like(model.params);

    Matrix upstream = d_output; // d loss / d (layer output)
    for (std::size_t l = model.params.size(); l-- > 0;)
    {
        const LayerTensors &t = model.params[l];
        const LayerCache &c = cache.layers[l];
        LayerTensors &g = grads[l];
        Matrix d_pre;
        if (!is_hidden(model, l))
        {
            if (cfg.variant == Variant::proposed)
                d_pre = upstream.array() * c.preact.unaryExpr([](double z) { return sigmoid(z); }).array();
            else
                d_pre = upstream;
        }
        else
        {
            const double leak = cfg.leak;
            const Matrix d_act =
                upstream.array() * c.activ_in.unaryExpr([leak](double z) { return z >= 0.0 ? 1.0 : leak; }).array();
            if (cfg.batch_norm)
            {
                g.bn_shift = d_act.rowwise().sum();
                g.bn_scale = (d_act.array() * c.normed.array()).rowwise().sum();
                const Matrix d_norm = d_act.array().colwise() * t.bn_scale.array();
                const Vector sum_d = d_norm.rowwise().sum();
                const Vector sum_dx = (d_norm.array() * c.normed.array()).rowwise().sum();
                Matrix centred = (n * d_norm).colwise() - sum_d;
                centred -= (c.normed.array().colwise() * sum_dx.array()).matrix();
                d_pre = (centred.array().colwise() * (c.inv_std.array() / n)).matrix();
            }
            else
            {
                d_pre = d_act;
            }
        }
        g.weight.noalias() = d_pre * c.input.transpose();
        g.bias = d_pre.rowwise().sum();
        if (l > 0)
            upstream.noalias() = t.weight.transpose() * d_pre;
    }
    return grads;
}

std::vector<TensorView> tensor_views(ParameterSet &params)
{
    std::vector<TensorView> out;
    for (std::size_t l = 0; l < params.size(); ++l)
    {
        auto &t = params[l];
        const std::string p = "layer" + std::to_string(l) + ".";
        out.push_back({p + "weight", {t.weight.data(), static_cast<std::size_t>(t.weight.size())}});
        out.push_back({p + "bias", {t.bias.data(), static_cast<std::size_t>(t.bias.size())}});
        if (t.bn_scale.size() > 0)
        {
            out.push_back({p + "bn_scale", {t.bn_scale.data(), static_cast<std::size_t>(t.bn_scale.size())}});
            out.push_back({p + "bn_shift", {t.bn_shift.data(), static_cast<std::size_t>(t.bn_shift.size())}});
        }
    }
    return out;
}

// ---- output decoding ----------------------------------------------------------------

IntermediateParams params_from_output(const Eigen::Ref<const Vector> &column, std::size_t num_aps,
                                      std::size_t num_ues)
{
    IntermediateParams p;
    p.p.resize(num_ues);
    p.lambda.resize(num_ues);
    p.mu.resize(num_aps);
    for (std::size_t k = 0; k < num_ues; ++k)
    {
        p.p[k] = column(static_cast<Eigen::Index>(k));
        p.lambda[k] = column(static_cast<Eigen::Index>(num_ues + k));
    }
    for (std::size_t i = 0; i < num_aps; ++i)
        p.mu[i] = column(static_cast<Eigen::Index>(2 * num_ues + i));
    return p;
}

Beamformer beamformer_from_output(const Eigen::Ref<const Vector> &column, std::size_t num_aps, std::size_t num_ues)
{
    const std::size_t mk = num_aps * num_ues;
    Beamformer v{CMatrix(num_aps, num_ues)};
    for (std::size_t k = 0; k < num_ues; ++k)
        for (std::size_t i = 0; i < num_aps; ++i)
        {
            const auto j = static_cast<Eigen::Index>(k * num_aps + i);
            v.v(i, k) = {column(j), column(j + static_cast<Eigen::Index>(mk))};
        }
    return v;
}

Solution solution_from_output(Variant variant, const SystemInstance &instance,
                              const Eigen::Ref<const Vector> &column)
{
    const std::size_t m = instance.h().rows();
    const std::size_t k = instance.h().cols();
    if (variant == Variant::proposed)
        return recover_solution(instance, params_from_output(column, m, k));
    return finalize_beamformer(instance, beamformer_from_output(column, m, k));
}

// ---- pipeline gradient ------------------------------------------------------------------

PipelineGradient pipeline_gradient(const MlpModel &model, std::span<const SystemInstance> batch, std::size_t threads,
                                   ForwardCache *cache_out)
{
    if (batch.empty())
        throw ConfigError("pipeline_gradient: empty batch");
    const std::size_t m = model.config.num_aps;
    const std::size_t k_count = model.config.num_ues;
    for (const auto &inst : batch)
        if (inst.h().rows() != m || inst.h().cols() != k_count)
            throw ConfigError("pipeline_gradient: instance dimensions do not match the model");

    ForwardResult fr = forward(model, build_input_batch(batch), Mode::train);
    const std::size_t b_count = batch.size();
    Matrix d_rate = Matrix::Zero(fr.output.rows(), fr.output.cols());
    std::vector<double> rates(b_count, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> excluded(b_count, 0);
    const Variant variant = model.config.variant;

    parallel_for(b_count, threads, [&](std::size_t b) {
        const auto col = static_cast<Eigen::Index>(b);
        if (!fr.output.col(col).allFinite())
            return; // rate stays NaN, the caller decides what to do
        try
        {
            if (variant == Variant::proposed)
            {
                const ParamsGradient g =
                    recover_solution_gradient(batch[b], params_from_output(fr.output.col(col), m, k_count));
                rates[b] = g.value;
                for (std::size_t k = 0; k < k_count; ++k)
                {
                    d_rate(static_cast<Eigen::Index>(k), col) = g.d_p[k];
                    d_rate(static_cast<Eigen::Index>(k_count + k), col) = g.d_lambda[k];
                }
                for (std::size_t i = 0; i < m; ++i)
                    d_rate(static_cast<Eigen::Index>(2 * k_count + i), col) = g.d_mu[i];
            }
            else
            {
                const ScaledRateGradient g =
                    scaled_rate_gradient(batch[b], beamformer_from_output(fr.output.col(col), m, k_count));
                rates[b] = g.value;
                const std::size_t mk = m * k_count;
                for (std::size_t k = 0; k < k_count; ++k)
                    for (std::size_t i = 0; i < m; ++i)
                    {
                        const auto j = static_cast<Eigen::Index>(k * m + i);
                        d_rate(j, col) = g.d_unscaled(i, k).real();
                        d_rate(j + static_cast<Eigen::Index>(mk), col) = g.d_unscaled(i, k).imag();
                    }
            }
        }
        catch (const DegenerateInputError &)
        {
            excluded[b] = 1;
        }
    });

    PipelineGradient out;
    std::size_t valid = 0;
    double total = 0.0;
    for (std::size_t b = 0; b < b_count; ++b)
        if (!excluded[b])
        {
            ++valid;
            total += rates[b];
        }
        else
            ++out.excluded;
    out.sample_rates = std::move(rates);
    out.excluded_mask = std::move(excluded);
    if (valid == 0)
    {
        out.grads = zeros_like(model.params);
        out.loss = 0.0;
    }
    else
    {
        out.loss = -total / static_cast<double>(valid);
        const Matrix d_output = d_rate * (-1.0 / static_cast<double>(valid));
        out.grads = backward(model, fr.cache, d_output);
    }
    if (cache_out)
        *cache_out = std::move(fr.cache);
    return out;
}

// ---- Adam -------------------------------------------------------------------------------

AdamState AdamState::for_model(const MlpModel &model, double learning_rate)
{
    AdamState s;
    s.learning_rate = learning_rate;
    s.first_moment = zeros_like(model.params);
    s.second_moment = zeros_like(model.params);
    return s;
}

void adam_step(MlpModel &model, const ParameterSet &grads, AdamState &state)
{
    ParameterSet &g = const_cast<ParameterSet &>(grads);
    auto params = tensor_views(model.params);
    auto gv = tensor_views(g);
    auto mv = tensor_views(state.first_moment);
    auto vv = tensor_views(state.second_moment);
    if (gv.size() != params.size() || mv.size() != params.size() || vv.size() != params.size())
        throw ConfigError("adam_step: gradient/state layout does not match the model");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t j = 0; j < params.size(); ++j)
    {
        auto &p = params[j].values;
        const auto &gr = gv[j].values;
        auto &m1 = mv[j].values;
        auto &m2 = vv[j].values;
        if (gr.size() != p.size() || m1.size() != p.size() || m2.size() != p.size())
            throw ConfigError("adam_step: tensor shape mismatch in " + params[j].name);
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            m1[i] = state.beta1 * m1[i] + (1.0 - state.beta1) * gr[i];
            m2[i] = state.beta2 * m2[i] + (1.0 - state.beta2) * gr[i] * gr[i];
            const double mhat = m1[i] / bc1;
            const double vhat = m2[i] / bc2;
            p[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
    ++model.revision;
}

// ---- checkpoint ---------------------------------------------------------------------------

namespace
{
using nlohmann::json;

json matrix_to_json(const Matrix &m)
{
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            arr.push_back(m(r, c));
    return arr;
}

json vector_to_json(const Vector &v)
{
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(v(i));
    return arr;
}

Matrix matrix_from_json(const json &j, Eigen::Index rows, Eigen::Index cols)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw IoError("checkpoint: matrix has the wrong number of entries");
    Matrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[idx++].get<double>();
    return m;
}

Vector vector_from_json(const json &j, Eigen::Index n)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw IoError("checkpoint: vector has the wrong number of entries");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json tensors_to_json(const ParameterSet &ps)
{
    json layers = json::array();
    for (const auto &t : ps)
    {
        json l;
        l["weight"] = matrix_to_json(t.weight);
        l["bias"] = vector_to_json(t.bias);
        if (t.bn_scale.size() > 0)
        {
            l["bn_scale"] = vector_to_json(t.bn_scale);
            l["bn_shift"] = vector_to_json(t.bn_shift);
        }
        layers.push_back(std::move(l));
    }
    return layers;
}

ParameterSet tensors_from_json(const json &j, const ParameterSet &shape)
{
    if (!j.is_array() || j.size() != shape.size())
        throw IoError("checkpoint: layer count mismatch");
    ParameterSet out = zeros_like(shape);
    for (std::size_t l = 0; l < shape.size(); ++l)
    {
        const json &jl = j[l];
        out[l].weight = matrix_from_json(jl.at("weight"), shape[l].weight.rows(), shape[l].weight.cols());
        out[l].bias = vector_from_json(jl.at("bias"), shape[l].bias.size());
        if (shape[l].bn_scale.size() > 0)
        {
            out[l].bn_scale = vector_from_json(jl.at("bn_scale"), shape[l].bn_scale.size());
            out[l].bn_shift = vector_from_json(jl.at("bn_shift"), shape[l].bn_shift.size());
        }
    }
    return out;
}

std::uint64_t fnv1a64(const std::string &s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}
} // namespace

std::string serialize_checkpoint(const MlpModel &model, const AdamState *optimizer)
{
    json payload;
    payload["format"] = "cranopt-checkpoint";
    payload["version"] = kCheckpointVersion;
    const MlpConfig &c = model.config;
    payload["config"] = {{"M", c.num_aps},
                         {"K", c.num_ues},
                         {"variant", to_string(c.variant)},
                         {"depth", c.depth},
                         {"hidden_width", c.hidden_width},
                         {"input_dim", c.input_dim()},
                         {"output_dim", c.output_dim()},
                         {"leak", c.leak},
                         {"batch_norm", c.batch_norm}};
    payload["revision"] = model.revision;
    payload["input_mean"] = vector_to_json(model.input_mean);
    payload["input_scale"] = vector_to_json(model.input_scale);
    payload["layers"] = tensors_to_json(model.params);
    json stats = json::array();
    for (const auto &s : model.stats)
        stats.push_back({{"running_mean", vector_to_json(s.mean)}, {"running_var", vector_to_json(s.var)}});
    payload["batch_norm_stats"] = std::move(stats);
    if (optimizer)
    {
        payload["optimizer"] = {{"learning_rate", optimizer->learning_rate},
                                {"beta1", optimizer->beta1},
                                {"beta2", optimizer->beta2},
                                {"epsilon", optimizer->epsilon},
                                {"step", optimizer->step},
                                {"first_moment", tensors_to_json(optimizer->first_moment)},
                                {"second_moment", tensors_to_json(optimizer->second_moment)}};
    }
    const std::string body = payload.dump();
    json doc;
    doc["payload"] = std::move(payload);
    doc["checksum"] = "fnv1a64:" + hex64(fnv1a64(body));
    return doc.dump(1) + "\n";
}

Checkpoint deserialize_checkpoint(const std::string &text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::exception &e)
    {
        throw IoError(std::string("checkpoint: malformed document: ") + e.what());
    }
    try
    {
        const json &payload = doc.at("payload");
        const std::string expected = "fnv1a64:" + hex64(fnv1a64(payload.dump()));
        if (doc.at("checksum").get<std::string>() != expected)
            throw IoError("checkpoint: checksum mismatch");
        if (payload.at("format").get<std::string>() != "cranopt-checkpoint")
            throw IoError("checkpoint: unknown format");
        if (payload.at("version").get<int>() != kCheckpointVersion)
            throw IoError("checkpoint: unsupported version");

        const json &jc = payload.at("config");
        MlpConfig cfg;
        cfg.num_aps = jc.at("M").get<std::size_t>();
        cfg.num_ues = jc.at("K").get<std::size_t>();
        cfg.variant = variant_from_string(jc.at("variant").get<std::string>());
        cfg.depth = jc.at("depth").get<std::size_t>();
        cfg.hidden_width = jc.at("hidden_width").get<std::size_t>();
        cfg.leak = jc.at("leak").get<double>();
        cfg.batch_norm = jc.at("batch_norm").get<bool>();
        if (jc.at("input_dim").get<std::size_t>() != cfg.input_dim() ||
            jc.at("output_dim").get<std::size_t>() != cfg.output_dim())
            throw IoError("checkpoint: declared dimensions are inconsistent");

        Checkpoint ck;
        ck.model = MlpModel::init(cfg, 0);
        const auto in_dim = static_cast<Eigen::Index>(cfg.input_dim());
        ck.model.input_mean = vector_from_json(payload.at("input_mean"), in_dim);
        ck.model.input_scale = vector_from_json(payload.at("input_scale"), in_dim);
        ck.model.params = tensors_from_json(payload.at("layers"), ck.model.params);
        const json &stats = payload.at("batch_norm_stats");
        if (stats.size() != ck.model.stats.size())
            throw IoError("checkpoint: batch-norm statistics count mismatch");
        for (std::size_t l = 0; l < stats.size(); ++l)
        {
            const auto n = ck.model.stats[l].mean.size();
            ck.model.stats[l].mean = vector_from_json(stats[l].at("running_mean"), n);
            ck.model.stats[l].var = vector_from_json(stats[l].at("running_var"), n);
        }
        ck.model.revision = payload.at("revision").get<std::uint64_t>();
        if (payload.contains("optimizer"))
        {
            const json &jo = payload.at("optimizer");
            AdamState s = AdamState::for_model(ck.model, jo.at("learning_rate").get<double>());
            s.beta1 = jo.at("beta1").get<double>();
            s.beta2 = jo.at("beta2").get<double>();
            s.epsilon = jo.at("epsilon").get<double>();
            s.step = jo.at("step").get<std::uint64_t>();
            s.first_moment = tensors_from_json(jo.at("first_moment"), ck.model.params);
            s.second_moment = tensors_from_json(jo.at("second_moment"), ck.model.params);
            ck.optimizer = std::move(s);
        }
        return ck;
    }
    catch (const json::exception &e)
    {
        throw IoError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path &path, const MlpModel &model, const AdamState *optimizer)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open checkpoint for writing: " + path.string());
    os << serialize_checkpoint(model, optimizer);
    if (!os)
        throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open checkpoint: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return deserialize_checkpoint(ss.str());
}

} // namespace cran
