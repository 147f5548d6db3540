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

#include "cran/baselines.hpp"
#include "cran/random.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace cran
{

Solution mrt_uniform(const SystemInstance &instance)
{
    const CMatrix &h = instance.h();
    Beamformer v{CMatrix(h.rows(), h.cols())};
    for (std::size_t k = 0; k < h.cols(); ++k)
    {
        const CVector col = h.col(k);
        const double n = vec_norm2(col);
        if (n == 0.0)
            continue;
        for (std::size_t i = 0; i < h.rows(); ++i)
            v.v(i, k) = col[i] / n;
    }
    return finalize_beamformer(instance, v);
}

void LocalSearchConfig::validate() const
{
    if (!(initial_step > 0.0))
        throw ConfigError("local_search: step size must be positive");
    if (!(tolerance > 0.0))
        throw ConfigError("local_search: tolerance must be positive");
    if (max_iterations < 1)
        throw ConfigError("local_search: need at least one iteration");
    if (restarts < 1)
        throw ConfigError("local_search: need at least one restart");
}

namespace
{

Beamformer zf_start(const SystemInstance &instance)
{
    const std::size_t m = instance.h().rows();
    const std::size_t k = instance.h().cols();
    const std::vector<double> lambda(k, 1.0);
    const std::vector<double> mu(m, static_cast<double>(k) / instance.virtual_power());
    return assemble_beamformer(std::vector<double>(k, 1.0), recover_direction(instance.h(), lambda, mu));
}

Beamformer random_start(const SystemInstance &instance, Rng &rng)
{
    Beamformer v{CMatrix(instance.h().rows(), instance.h().cols())};
    for (auto &x : v.v.data())
        x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return v;
}

double scaled_rate(const SystemInstance &instance, const Beamformer &v)
{
    const Solution s = finalize_beamformer(instance, v);
    return sum_rate(instance.h(), s.v, s.omega);
}

struct RunOutcome
{
    Beamformer v;
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<double> history;
};

RunOutcome ascend(const SystemInstance &instance, Beamformer start, const LocalSearchConfig &cfg)
{
    RunOutcome run;
    run.v = finalize_beamformer(instance, start).v;
    run.value = scaled_rate(instance, run.v);
    run.history.push_back(run.value);
    double step = cfg.initial_step;
    const double min_step = 1e-14;

    while (run.iterations < cfg.max_iterations)
    {
        ++run.iterations;
        const ScaledRateGradient g = scaled_rate_gradient(instance, run.v);
        const double gnorm = frobenius_norm(g.d_unscaled);
        if (!(gnorm > 0.0))
        {
            run.converged = true;
            break;
        }
        // the objective is invariant to the scale of v, so measure steps relative to it
        const double vnorm = frobenius_norm(run.v.v);
        bool accepted = false;
        while (step >= min_step)
        {
            Beamformer cand = run.v;
            const cplx a = step * vnorm / gnorm;
            for (std::size_t j = 0; j < cand.v.data().size(); ++j)
                cand.v.data()[j] += a * g.d_unscaled.data()[j];
            double value = -std::numeric_limits<double>::infinity();
            try
            {
                value = scaled_rate(instance, cand);
            }
            catch (const DegenerateInputError &)
            {
            }
            if (value > run.value)
            {
                const double gain = value - run.value;
                run.v = finalize_beamformer(instance, cand).v;
                run.value = value;
                run.history.push_back(value);
                step = std::min(2.0 * step, 1.0);
                accepted = true;
                if (gain < cfg.tolerance)
                    run.converged = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            run.converged = true;
        if (run.converged)
            break;
    }
    return run;
}

} // namespace

LocalSearchResult local_search(const SystemInstance &instance, const LocalSearchConfig &config)
{
    config.validate();
    Rng rng = Rng::stream(config.seed, 0);
    LocalSearchResult best;
    best.sum_rate = -std::numeric_limits<double>::infinity();
    std::size_t total_iterations = 0;
    for (std::size_t r = 0; r < config.restarts; ++r)
    {
        Beamformer start;
        if (r == 0)
            start = mrt_uniform(instance).v;
        else if (r == 1)
            start = zf_start(instance);
        else
            start = random_start(instance, rng);
        RunOutcome run = ascend(instance, std::move(start), config);
        total_iterations += run.iterations;
        if (run.value > best.sum_rate)
        {
            best.sum_rate = run.value;
            best.solution = finalize_beamformer(instance, run.v);
            best.converged = run.converged;
            best.best_restart = r;
            best.history = std::move(run.history);
        }
    }
    best.iterations = total_iterations;
    return best;
}

// ---- brute force ---------------------------------------------------------------------

OracleResult brute_force_oracle(const SystemInstance &instance, std::size_t resolution)
{
    const CMatrix &h = instance.h();
    const std::size_t m = h.rows();
    const std::size_t kk = h.cols();
    const std::size_t entries = m * kk;
    if (entries > kOracleMaxEntries)
        throw ConfigError("brute_force_oracle: M*K must not exceed 3");
    if (resolution < 1)
        throw ConfigError("brute_force_oracle: resolution must be positive");

    const double beta = instance.beta;
    const double target = instance.virtual_power();
    std::vector<cplx> phasor(resolution);
    for (std::size_t j = 0; j < resolution; ++j)
        phasor[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(resolution));

    // odometer over amplitudes of every entry and phases of every entry but the first
    std::array<std::size_t, kOracleMaxEntries> amp{};
    std::array<std::size_t, kOracleMaxEntries> ph{};
    std::array<cplx, kOracleMaxEntries> v{};
    std::array<cplx, kOracleMaxEntries> best_v{};
    double best = -std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;

    auto evaluate = [&]() {
        // entry e = k * M + i
        std::array<double, kOracleMaxEntries> rho{};
        double max_rho = 0.0;
        for (std::size_t i = 0; i < m; ++i)
        {
            for (std::size_t k = 0; k < kk; ++k)
                rho[i] += std::norm(v[k * m + i]);
            max_rho = std::max(max_rho, rho[i]);
        }
        if (max_rho <= 0.0)
            return;
        const double s2 = target / max_rho;
        const double s = std::sqrt(s2);
        double total = 0.0;
        for (std::size_t k = 0; k < kk; ++k)
        {
            double noise = 1.0;
            for (std::size_t i = 0; i < m; ++i)
                noise += std::norm(h(i, k)) * s2 * rho[i] / beta;
            double signal = 0.0;
            for (std::size_t l = 0; l < kk; ++l)
            {
                cplx g = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    g += std::conj(h(i, k)) * v[l * m + i];
                const double p = std::norm(s * g);
                if (l == k)
                    signal = p;
                else
                    noise += p;
            }
            total += std::log2(1.0 + signal / noise);
        }
        ++evaluated;
        if (total > best)
        {
            best = total;
            best_v = v;
        }
    };

    const double inv = 1.0 / static_cast<double>(resolution);
    for (;;)
    {
        for (std::size_t e = 0; e < entries; ++e)
            v[e] = static_cast<double>(amp[e]) * inv * (e == 0 ? cplx(1.0) : phasor[ph[e]]);
        evaluate();

        // advance phases (entries 1..), then amplitudes
        std::size_t e = 1;
        for (; e < entries; ++e)
        {
            if (++ph[e] < resolution)
                break;
            ph[e] = 0;
        }
        if (e < entries)
            continue;
        e = 0;
        for (; e < entries; ++e)
        {
            if (++amp[e] <= resolution)
                break;
            amp[e] = 0;
        }
        if (e == entries)
            break;
    }

    OracleResult out;
    out.evaluated = evaluated;
    Beamformer bv{CMatrix(m, kk)};
    for (std::size_t k = 0; k < kk; ++k)
        for (std::size_t i = 0; i < m; ++i)
            bv.v(i, k) = best_v[k * m + i];
    out.solution = finalize_beamformer(instance, bv);
    out.sum_rate = sum_rate(h, out.solution.v, out.solution.omega);
    return out;
}

} // namespace cran
