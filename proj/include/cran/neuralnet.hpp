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

#ifndef CRAN_NEURALNET_HPP
#define CRAN_NEURALNET_HPP

#include "cran/channel.hpp"
#include "cran/cranmodel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when backward() is handed a cache that does not belong to the model.
class ContractError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// proposed: the network emits (p, lambda, mu) and the structured recovery
/// builds v. dilearn: the network emits the 2MK real coordinates of v directly.
enum class Variant
{
    proposed,
    dilearn
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string &s);

struct MlpConfig
{
    std::size_t num_aps = 0;
    std::size_t num_ues = 0;
    Variant variant = Variant::proposed;
    std::size_t depth = 5; // affine layers, the last one is the output layer
    std::size_t hidden_width = 0;
    double leak = 0.3;
    bool batch_norm = true;

    std::size_t input_dim() const { return 2 * num_aps * num_ues + 2; }
    std::size_t output_dim() const;
    void validate() const;

    /// ceil(13 M K) hidden neurons.
    static std::size_t desk_width(std::size_t num_aps, std::size_t num_ues) { return 13 * num_aps * num_ues; }
};

/// Trainable tensors of one affine layer. bn_scale/bn_shift are empty on the
/// output layer and when batch normalisation is disabled.
struct LayerTensors
{
    Matrix weight; // out x in
    Vector bias;
    Vector bn_scale;
    Vector bn_shift;
};

using ParameterSet = std::vector<LayerTensors>;

struct BatchNormStats
{
    Vector mean;
    Vector var;
};

struct MlpModel
{
    MlpConfig config;
    ParameterSet params;
    std::vector<BatchNormStats> stats; // one per hidden layer when batch_norm is on

    // Fixed input standardisation (x - input_mean) * input_scale, not trained.
    Vector input_mean;
    Vector input_scale;

    // Bumped by every optimiser step; forward caches record it.
    std::uint64_t revision = 0;

    static MlpModel init(const MlpConfig &config, std::uint64_t seed);
};

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kRunningStatsMomentum = 0.99;

/// [Re h, Im h interleaved, column-major by UE..., 10 log10 P, C]
Vector build_input_features(const ChannelSample &sample);
Matrix build_input_batch(std::span<const ChannelSample> samples);
Matrix build_input_batch(std::span<const SystemInstance> instances);

inline double lrelu(double z, double leak = 0.3) { return z >= 0.0 ? z : leak * z; }
double sigplus(double z);
double sigmoid(double z);

enum class Mode
{
    train,
    eval
};

struct LayerCache
{
    Matrix input;   // d_{l-1}
    Matrix preact;  // W d + b
    Matrix normed;  // batch-normalised preact (hidden layers with BN)
    Vector inv_std; // 1 / sqrt(var + eps) per unit
    Vector mean;    // batch mean per unit
    Matrix activ_in; // argument of the activation function
};

struct ForwardCache
{
    Mode mode = Mode::eval;
    std::uint64_t revision = 0;
    std::size_t batch = 0;
    std::vector<LayerCache> layers;
};

struct ForwardResult
{
    Matrix output; // output_dim x batch
    ForwardCache cache;
};

/// Hidden layers: affine -> batch norm -> LReLU. Output layer: affine -> sigplus
/// (proposed) or identity (dilearn). Train mode normalises with batch
/// statistics and needs at least two samples; eval mode uses the stored ones.
ForwardResult forward(const MlpModel &model, const Matrix &inputs, Mode mode);

/// Batch-mode inference with the stored statistics. Agrees with
/// forward(..., Mode::eval).output up to rounding; cheaper because nothing is cached.
Matrix predict(const MlpModel &model, const Matrix &inputs);

/// Exponential moving update of the running statistics from a train-mode cache.
void update_running_statistics(MlpModel &model, const ForwardCache &cache, double momentum = kRunningStatsMomentum);

/// Sets the input standardisation to the per-feature mean and 1/std over
/// `inputs` (features with zero spread keep scale 1).
void fit_input_normalization(MlpModel &model, const Matrix &inputs);

/// Sets every layer's statistics to the exact population values over `inputs`,
/// layer by layer. Afterwards eval-mode outputs on `inputs` equal train-mode
/// outputs computed on `inputs` as a single batch.
void finalize_statistics(MlpModel &model, const Matrix &inputs);

/// Gradients of a scalar loss with respect to all trainable tensors, given
/// d loss / d output. Requires a train-mode cache produced from this model revision.
ParameterSet backward(const MlpModel &model, const ForwardCache &cache, const Matrix &d_output);

ParameterSet zeros_like(const ParameterSet &params);

struct TensorView
{
    std::string name;
    std::span<double> values;
};

std::vector<TensorView> tensor_views(ParameterSet &params);

// ---- output decoding --------------------------------------------------------

IntermediateParams params_from_output(const Eigen::Ref<const Vector> &column, std::size_t num_aps,
                                      std::size_t num_ues);

/// DiLearn layout: entries [0, MK) are real parts, [MK, 2MK) imaginary parts,
/// both indexed k*M + i.
Beamformer beamformer_from_output(const Eigen::Ref<const Vector> &column, std::size_t num_aps, std::size_t num_ues);

/// Recovered (v, omega) for each column of `outputs`. Throws
/// DegenerateInputError for a column that yields an all-zero beamformer.
Solution solution_from_output(Variant variant, const SystemInstance &instance,
                              const Eigen::Ref<const Vector> &column);

// ---- end-to-end gradient ------------------------------------------------------

struct PipelineGradient
{
    double loss = 0.0;               // -(1/|B|) sum of recovered sum rates over non-excluded samples
    ParameterSet grads;
    std::vector<double> sample_rates; // NaN for excluded or non-finite samples
    std::vector<char> excluded_mask;  // 1 where the sample was dropped
    std::size_t excluded = 0;         // degenerate samples dropped from the mean
};

/// Loss and exact gradient through the network, the recovery map and the rate.
PipelineGradient pipeline_gradient(const MlpModel &model, std::span<const SystemInstance> batch,
                                   std::size_t threads = 1, ForwardCache *cache_out = nullptr);

// ---- optimiser ----------------------------------------------------------------

struct AdamState
{
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    ParameterSet first_moment;
    ParameterSet second_moment;

    static AdamState for_model(const MlpModel &model, double learning_rate = 1e-3);
};

void adam_step(MlpModel &model, const ParameterSet &grads, AdamState &state);

// ---- checkpoint -----------------------------------------------------------------
//
// JSON document: format/version, config block, per-layer flat float64 arrays
// (weights row-major), running statistics, optional optimiser state and an
// FNV-1a checksum over the serialised payload.

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint
{
    MlpModel model;
    std::optional<AdamState> optimizer;
};

std::string serialize_checkpoint(const MlpModel &model, const AdamState *optimizer = nullptr);
Checkpoint deserialize_checkpoint(const std::string &text);

void save_checkpoint(const std::filesystem::path &path, const MlpModel &model, const AdamState *optimizer = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace cran

#endif
