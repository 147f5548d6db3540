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

#include "cran/cranmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cran
{

SystemInstance SystemInstance::from_sample(ChannelSample sample)
{
    SystemInstance inst;
    inst.beta = beta_from_capacity(sample.capacity);
    inst.sample = std::move(sample);
    return inst;
}

double SystemInstance::virtual_power() const
{
    return sample.power_budget / (1.0 + 1.0 / beta);
}

double beta_from_capacity(double capacity)
{
    if (!(capacity >= 0.0))
        throw std::invalid_argument("beta_from_capacity: capacity must be nonnegative");
    return std::exp2(capacity) - 1.0;
}

namespace
{
void check_shapes(const CMatrix &h, const Beamformer &v, const QuantNoise &omega)
{
    if (v.v.rows() != h.rows() || v.v.cols() != h.cols() || omega.omega.size() != h.rows())
        throw std::invalid_argument("rate: dimensions of h, v and omega disagree");
}

// c(k, l) = h_k^H v_l
CMatrix cross_gains(const CMatrix &h, const CMatrix &v)
{
    const std::size_t m = h.rows();
    const std::size_t k_count = h.cols();
    CMatrix c(k_count, k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t l = 0; l < k_count; ++l)
        {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                acc += std::conj(h(i, k)) * v(i, l);
            c(k, l) = acc;
        }
    return c;
}

// h_k^H diag(omega) h_k
double quant_noise_at(const CMatrix &h, const QuantNoise &omega, std::size_t k)
{
    double q = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i)
        q += std::norm(h(i, k)) * omega.omega[i];
    return q;
}
} // namespace

double user_rate(const CMatrix &h, const Beamformer &v, const QuantNoise &omega, std::size_t k)
{
    check_shapes(h, v, omega);
    if (k >= h.cols())
        throw std::out_of_range("user_rate: UE index out of range");
    const std::size_t m = h.rows();
    double interference = 1.0 + quant_noise_at(h, omega, k);
    double signal = 0.0;
    for (std::size_t l = 0; l < h.cols(); ++l)
    {
        cplx g = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            g += std::conj(h(i, k)) * v.v(i, l);
        if (l == k)
            signal = std::norm(g);
        else
            interference += std::norm(g);
    }
    return std::log2(1.0 + signal / interference);
}

double sum_rate(const CMatrix &h, const Beamformer &v, const QuantNoise &omega)
{
    check_shapes(h, v, omega);
    const CMatrix c = cross_gains(h, v.v);
    double total = 0.0;
    for (std::size_t k = 0; k < h.cols(); ++k)
    {
        double interference = 1.0 + quant_noise_at(h, omega, k);
        for (std::size_t l = 0; l < h.cols(); ++l)
            if (l != k)
                interference += std::norm(c(k, l));
        total += std::log2(1.0 + std::norm(c(k, k)) / interference);
    }
    return total;
}

std::vector<double> per_ap_power(const Beamformer &v)
{
    std::vector<double> out(v.num_aps(), 0.0);
    for (std::size_t i = 0; i < v.num_aps(); ++i)
        for (const auto &x : v.v.row(i))
            out[i] += std::norm(x);
    return out;
}

namespace
{
struct DirectionTrace
{
    CholeskyFactor factor;
    CMatrix raw;              // x_k = A^{-1} h_k
    std::vector<double> norm; // |x_k|
    CMatrix unit;             // u_k
};

DirectionTrace trace_direction(const CMatrix &h, const std::vector<double> &lambda, const std::vector<double> &mu)
{
    const std::size_t m = h.rows();
    const std::size_t k_count = h.cols();
    if (lambda.size() != k_count || mu.size() != m)
        throw std::invalid_argument("recover_direction: lambda must have K entries and mu M entries");
    for (double l : lambda)
        if (!(l >= 0.0) || !std::isfinite(l))
            throw std::invalid_argument("recover_direction: lambda must be finite and nonnegative");
    for (double u : mu)
        if (!(u > 0.0) || !std::isfinite(u))
            throw std::invalid_argument("recover_direction: mu must be finite and strictly positive");

    CMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        a(i, i) = mu[i];
    for (std::size_t l = 0; l < k_count; ++l)
    {
        if (lambda[l] == 0.0)
            continue;
        for (std::size_t i = 0; i < m; ++i)
        {
            a(i, i) += lambda[l] * std::norm(h(i, l));
            for (std::size_t j = i + 1; j < m; ++j)
            {
                const cplx e = lambda[l] * h(i, l) * std::conj(h(j, l));
                a(i, j) += e;
                a(j, i) += std::conj(e);
            }
        }
    }

    DirectionTrace t{CholeskyFactor(a), CMatrix(m, k_count), std::vector<double>(k_count), CMatrix(m, k_count)};
    for (std::size_t k = 0; k < k_count; ++k)
    {
        const CVector x = t.factor.solve(h.col(k));
        const double n = vec_norm2(x);
        t.raw.set_col(k, x);
        t.norm[k] = n;
        if (n > 0.0)
            for (std::size_t i = 0; i < m; ++i)
                t.unit(i, k) = x[i] / n;
    }
    return t;
}
} // namespace

CMatrix recover_direction(const CMatrix &h, const std::vector<double> &lambda, const std::vector<double> &mu)
{
    return trace_direction(h, lambda, mu).unit;
}

Beamformer assemble_beamformer(const std::vector<double> &p, const CMatrix &directions)
{
    if (p.size() != directions.cols())
        throw std::invalid_argument("assemble_beamformer: need one power per direction");
    Beamformer out{CMatrix(directions.rows(), directions.cols())};
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        if (!(p[k] >= 0.0))
            throw std::invalid_argument("assemble_beamformer: powers must be nonnegative");
        const double amp = std::sqrt(p[k]);
        for (std::size_t i = 0; i < directions.rows(); ++i)
            out.v(i, k) = amp * directions(i, k);
    }
    return out;
}

ScalingInfo scaling_for(const Beamformer &v, double power_budget, double beta)
{
    if (!(power_budget > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("scale_to_feasible: P and beta must be positive");
    const std::vector<double> power = per_ap_power(v);
    ScalingInfo info;
    for (std::size_t i = 0; i < power.size(); ++i)
        if (power[i] > info.max_power)
        {
            info.max_power = power[i];
            info.argmax_ap = i;
        }
    if (!(info.max_power > 0.0))
        throw DegenerateInputError("scale_to_feasible: beamformer is identically zero");
    const double target = power_budget / (1.0 + 1.0 / beta);
    info.factor = std::sqrt(target / info.max_power);
    return info;
}

Beamformer scale_to_feasible(const Beamformer &v, double power_budget, double beta)
{
    const ScalingInfo info = scaling_for(v, power_budget, beta);
    Beamformer out = v;
    out.v *= info.factor;
    return out;
}

QuantNoise recover_quant_noise(const Beamformer &v, double beta)
{
    if (!(beta > 0.0))
        throw std::invalid_argument("recover_quant_noise: beta must be positive");
    QuantNoise q{per_ap_power(v)};
    for (auto &w : q.omega)
        w /= beta;
    return q;
}

Solution finalize_beamformer(const SystemInstance &instance, const Beamformer &unscaled)
{
    Solution s;
    s.v = scale_to_feasible(unscaled, instance.power_budget(), instance.beta);
    s.omega = recover_quant_noise(s.v, instance.beta);
    return s;
}

Solution recover_solution(const SystemInstance &instance, const IntermediateParams &params)
{
    const CMatrix u = recover_direction(instance.h(), params.lambda, params.mu);
    return finalize_beamformer(instance, assemble_beamformer(params.p, u));
}

FeasibilityReport check_feasibility(const Beamformer &v, const QuantNoise &omega, double power_budget, double beta,
                                    double tol)
{
    if (!(tol >= 0.0))
        throw std::invalid_argument("check_feasibility: tolerance must be nonnegative");
    if (omega.omega.size() != v.num_aps())
        throw std::invalid_argument("check_feasibility: omega length mismatch");
    const std::vector<double> power = per_ap_power(v);
    FeasibilityReport r;
    r.worst_power_slack = std::numeric_limits<double>::infinity();
    r.worst_fronthaul_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < power.size(); ++i)
    {
        const double ps = power_budget - power[i] - omega.omega[i];
        const double fs = beta * omega.omega[i] - power[i];
        if (ps < r.worst_power_slack)
        {
            r.worst_power_slack = ps;
            r.worst_power_ap = i;
        }
        if (fs < r.worst_fronthaul_slack)
        {
            r.worst_fronthaul_slack = fs;
            r.worst_fronthaul_ap = i;
        }
    }
    bool ok = r.worst_power_slack >= -tol && r.worst_fronthaul_slack >= -tol;
    for (double w : omega.omega)
        ok = ok && w >= 0.0;
    r.feasible = ok;
    return r;
}

// ---- gradients ------------------------------------------------------------------

RateGradient sum_rate_gradient(const CMatrix &h, const Beamformer &v, const QuantNoise &omega)
{
    check_shapes(h, v, omega);
    const std::size_t m = h.rows();
    const std::size_t k_count = h.cols();
    const CMatrix c = cross_gains(h, v.v);
    constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

    RateGradient g;
    g.d_v = CMatrix(m, k_count);
    g.d_omega.assign(m, 0.0);

    for (std::size_t k = 0; k < k_count; ++k)
    {
        // total = interference + signal
        double interference = 1.0 + quant_noise_at(h, omega, k);
        for (std::size_t l = 0; l < k_count; ++l)
            if (l != k)
                interference += std::norm(c(k, l));
        const double total = interference + std::norm(c(k, k));
        g.value += std::log2(total / interference);

        const double inv_total = inv_ln2 / total;
        const double inv_interf = inv_ln2 / interference;
        for (std::size_t l = 0; l < k_count; ++l)
        {
            const double w = (l == k) ? inv_total : inv_total - inv_interf;
            const cplx gc = 2.0 * w * c(k, l); // gradient w.r.t. c(k, l)
            for (std::size_t i = 0; i < m; ++i)
                g.d_v(i, l) += h(i, k) * gc;
        }
        const double dq = inv_total - inv_interf;
        for (std::size_t i = 0; i < m; ++i)
            g.d_omega[i] += std::norm(h(i, k)) * dq;
    }
    return g;
}

ScaledRateGradient scaled_rate_gradient(const SystemInstance &instance, const Beamformer &unscaled)
{
    const std::size_t m = unscaled.num_aps();
    const std::size_t k_count = unscaled.num_ues();
    const double beta = instance.beta;

    ScaledRateGradient out;
    out.scaling = scaling_for(unscaled, instance.power_budget(), beta);
    out.solution.v = unscaled;
    out.solution.v.v *= out.scaling.factor;
    out.solution.omega = recover_quant_noise(out.solution.v, beta);

    RateGradient rg = sum_rate_gradient(instance.h(), out.solution.v, out.solution.omega);
    out.value = rg.value;

    // omega_i = sum_k |v_{k,i}|^2 / beta
    CMatrix d_v = rg.d_v;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < k_count; ++k)
            d_v(i, k) += 2.0 * out.solution.v.v(i, k) * (rg.d_omega[i] / beta);

    // v = s * w with s = sqrt(P~ / rho_{i*}(w))
    const double s = out.scaling.factor;
    double d_s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < k_count; ++k)
            d_s += (std::conj(d_v(i, k)) * unscaled.v(i, k)).real();
    const double d_rho = d_s * (-0.5 * s / out.scaling.max_power);

    out.d_unscaled = d_v;
    out.d_unscaled *= s;
    const std::size_t star = out.scaling.argmax_ap;
    for (std::size_t k = 0; k < k_count; ++k)
        out.d_unscaled(star, k) += 2.0 * d_rho * unscaled.v(star, k);
    return out;
}

ParamsGradient recover_solution_gradient(const SystemInstance &instance, const IntermediateParams &params)
{
    const CMatrix &h = instance.h();
    const std::size_t m = h.rows();
    const std::size_t k_count = h.cols();

    const DirectionTrace dir = trace_direction(h, params.lambda, params.mu);
    const Beamformer w = assemble_beamformer(params.p, dir.unit);
    ScaledRateGradient sg = scaled_rate_gradient(instance, w);

    ParamsGradient out;
    out.value = sg.value;
    out.solution = std::move(sg.solution);
    out.d_p.assign(k_count, 0.0);
    out.d_lambda.assign(k_count, 0.0);
    out.d_mu.assign(m, 0.0);

    // x_k^{bar}, then y_k = A^{-1} x_k^{bar}
    CMatrix y(m, k_count);
    for (std::size_t k = 0; k < k_count; ++k)
    {
        const double sqrt_p = std::sqrt(params.p[k]);
        double dp = 0.0;
        CVector gu(m);
        for (std::size_t i = 0; i < m; ++i)
        {
            dp += (std::conj(sg.d_unscaled(i, k)) * dir.unit(i, k)).real();
            gu[i] = sqrt_p * sg.d_unscaled(i, k);
        }
        out.d_p[k] = sqrt_p > 0.0 ? dp / (2.0 * sqrt_p) : 0.0;

        if (!(dir.norm[k] > 0.0))
            continue;
        double radial = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            radial += (std::conj(dir.unit(i, k)) * gu[i]).real();
        CVector gx(m);
        for (std::size_t i = 0; i < m; ++i)
            gx[i] = (gu[i] - radial * dir.unit(i, k)) / dir.norm[k];
        y.set_col(k, dir.factor.solve(gx));
    }

    // dA = sum_l dlambda_l h_l h_l^H + diag(dmu);  dL = -Re sum_k y_k^H dA x_k
    for (std::size_t l = 0; l < k_count; ++l)
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
        {
            cplx yh = 0.0;
            cplx hx = 0.0;
            for (std::size_t i = 0; i < m; ++i)
            {
                yh += std::conj(y(i, k)) * h(i, l);
                hx += std::conj(h(i, l)) * dir.raw(i, k);
            }
            acc += (yh * hx).real();
        }
        out.d_lambda[l] = -acc;
    }
    for (std::size_t i = 0; i < m; ++i)
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
            acc += (std::conj(y(i, k)) * dir.raw(i, k)).real();
        out.d_mu[i] = -acc;
    }
    return out;
}

} // namespace cran
