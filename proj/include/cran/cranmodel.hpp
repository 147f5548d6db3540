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

#ifndef CRAN_CRANMODEL_HPP
#define CRAN_CRANMODEL_HPP

#include "cran/channel.hpp"
#include "cran/linalg.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cran
{

/// Raised when the recovery pipeline is fed an all-zero beamformer.
class DegenerateInputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Beamforming vectors, stored M x K so that column k is v_k and row i holds
/// everything AP i transmits.
struct Beamformer
{
    CMatrix v;

    std::size_t num_aps() const { return v.rows(); }
    std::size_t num_ues() const { return v.cols(); }
};

struct QuantNoise
{
    std::vector<double> omega; // one per AP, >= 0
};

/// Network outputs that parameterise a solution: K powers, K dual weights on
/// the channel outer products, M diagonal loadings.
struct IntermediateParams
{
    std::vector<double> p;
    std::vector<double> lambda;
    std::vector<double> mu;
};

struct Solution
{
    Beamformer v;
    QuantNoise omega;
};

struct SystemInstance
{
    ChannelSample sample;
    double beta = 0.0; // 2^C - 1

    static SystemInstance from_sample(ChannelSample sample);

    /// P / (1 + 1/beta): the per-AP beamforming power cap that keeps both the
    /// power and the fronthaul constraint satisfied once omega = power / beta.
    double virtual_power() const;

    const CMatrix &h() const { return sample.h; }
    double power_budget() const { return sample.power_budget; }
};

double beta_from_capacity(double capacity);

/// Achievable rate of UE k in bit/symbol:
///   log2(1 + |h_k^H v_k|^2 / (1 + h_k^H diag(omega) h_k + sum_{l != k} |h_k^H v_l|^2))
double user_rate(const CMatrix &h, const Beamformer &v, const QuantNoise &omega, std::size_t k);
double sum_rate(const CMatrix &h, const Beamformer &v, const QuantNoise &omega);

/// sum_k |v_{k,i}|^2 for each AP i.
std::vector<double> per_ap_power(const Beamformer &v);

/// Unit-norm directions (sum_l lambda_l h_l h_l^H + diag(mu))^{-1} h_k, normalised.
/// Requires mu > 0 and lambda >= 0; throws std::invalid_argument otherwise.
CMatrix recover_direction(const CMatrix &h, const std::vector<double> &lambda, const std::vector<double> &mu);

/// v_k = sqrt(p_k) u_k
Beamformer assemble_beamformer(const std::vector<double> &p, const CMatrix &directions);

struct ScalingInfo
{
    double factor = 1.0;
    std::size_t argmax_ap = 0; // lowest index among ties
    double max_power = 0.0;
};

ScalingInfo scaling_for(const Beamformer &v, double power_budget, double beta);

/// Scales all beams by one common factor so that the busiest AP transmits
/// exactly P/(1+1/beta). Throws DegenerateInputError on an all-zero v.
Beamformer scale_to_feasible(const Beamformer &v, double power_budget, double beta);

/// omega_i = (1/beta) sum_k |v_{k,i}|^2 ; zero-power APs get omega_i = 0.
QuantNoise recover_quant_noise(const Beamformer &v, double beta);

/// Full recovery map: direction -> assemble -> scale -> quantisation noise.
Solution recover_solution(const SystemInstance &instance, const IntermediateParams &params);

/// Scale + quantisation noise for a beamformer produced elsewhere (direct
/// learning, heuristics, local search iterates).
Solution finalize_beamformer(const SystemInstance &instance, const Beamformer &unscaled);

struct FeasibilityReport
{
    bool feasible = true;
    double worst_power_slack = 0.0;     // min_i P - sum_k |v_{k,i}|^2 - omega_i
    double worst_fronthaul_slack = 0.0; // min_i beta*omega_i - sum_k |v_{k,i}|^2
    std::size_t worst_power_ap = 0;
    std::size_t worst_fronthaul_ap = 0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

FeasibilityReport check_feasibility(const Beamformer &v, const QuantNoise &omega, double power_budget, double beta,
                                    double tol = kFeasibilityTolerance);

// ---- reverse-mode derivatives -------------------------------------------------
//
// Complex gradients use the convention G = dL/dRe(z) + i dL/dIm(z), so that
// dL = Re(conj(G) dz) summed over entries.

struct RateGradient
{
    double value = 0.0;
    CMatrix d_v;                  // M x K
    std::vector<double> d_omega; // M
};

/// Sum rate and its gradient with respect to v and omega (treated as independent).
RateGradient sum_rate_gradient(const CMatrix &h, const Beamformer &v, const QuantNoise &omega);

struct ScaledRateGradient
{
    double value = 0.0;
    CMatrix d_unscaled; // gradient w.r.t. the beamformer before scaling
    Solution solution;
    ScalingInfo scaling;
};

/// Sum rate of finalize_beamformer(instance, unscaled) and its gradient with
/// respect to `unscaled`, propagated through omega = power/beta and the max-AP
/// scaling (subgradient credited to the argmax AP).
ScaledRateGradient scaled_rate_gradient(const SystemInstance &instance, const Beamformer &unscaled);

struct ParamsGradient
{
    double value = 0.0;
    std::vector<double> d_p;
    std::vector<double> d_lambda;
    std::vector<double> d_mu;
    Solution solution;
};

/// Sum rate of recover_solution(instance, params) and its gradient with respect
/// to (p, lambda, mu), including the adjoint of the linear solve.
ParamsGradient recover_solution_gradient(const SystemInstance &instance, const IntermediateParams &params);

} // namespace cran

#endif
