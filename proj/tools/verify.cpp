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

#include "cli.hpp"

#include "cran/baselines.hpp"
#include "cran/neuralnet.hpp"
#include "cran/random.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

namespace cran::cli
{

namespace
{

struct SuiteResult
{
    std::string name;
    std::size_t passed = 0;
    std::size_t total = 0;
    std::optional<std::string> first_failure = std::nullopt;
};

std::string fmt(const char *format, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

std::string case_tag(std::uint64_t seed, std::size_t index, std::size_t m, std::size_t k)
{
    return "seed=" + std::to_string(seed) + " index=" + std::to_string(index) + " M=" + std::to_string(m) +
           " K=" + std::to_string(k);
}

void record(SuiteResult &s, bool ok, const std::function<std::string()> &describe)
{
    ++s.total;
    if (ok)
        ++s.passed;
    else if (!s.first_failure)
        s.first_failure = describe();
}

// Random instance and intermediate parameters for draw `index`; M, K in 1..6.
struct Draw
{
    SystemInstance instance;
    IntermediateParams params;
};

Draw make_draw(std::uint64_t seed, std::size_t index)
{
    Rng rng = Rng::stream(seed, index);
    const std::size_t m = 1 + rng.below(6);
    const std::size_t k = 1 + rng.below(6);
    ChannelSample s = generate_sample(seed, index, m, k, OneRingParams{}, ConstraintBounds{});
    auto positive = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto &x : v)
            x = std::pow(10.0, rng.uniform(-3.0, 3.0));
        return v;
    };
    IntermediateParams p;
    p.p = positive(k);
    p.lambda = positive(k);
    p.mu = positive(m);
    return {SystemInstance::from_sample(std::move(s)), std::move(p)};
}

SuiteResult feasibility_suite(const VerifyOptions &o)
{
    SuiteResult s{"feasibility"};
    for (std::size_t i = 0; i < o.feasibility_samples; ++i)
    {
        const Draw d = make_draw(o.seed, i);
        Solution sol = recover_solution(d.instance, d.params);
        if (o.inject_scale_fault)
        {
            sol.v.v *= 1.01;
            sol.omega = recover_quant_noise(sol.v, d.instance.beta);
        }
        const double p = d.instance.power_budget();
        const FeasibilityReport r = check_feasibility(sol.v, sol.omega, p, d.instance.beta);
        // the fronthaul constraint is met with equality by construction
        const bool tight = std::abs(r.worst_fronthaul_slack) <= 1e-9 * p;
        record(s, r.feasible && tight, [&]() {
            return "invariant=power/fronthaul feasibility " +
                   case_tag(o.seed, i, d.instance.h().rows(), d.instance.h().cols()) +
                   " worst_power_slack=" + fmt("%.6g", r.worst_power_slack) + " (AP " +
                   std::to_string(r.worst_power_ap) + ") worst_fronthaul_slack=" +
                   fmt("%.6g", r.worst_fronthaul_slack) + " P=" + fmt("%.6g", p);
        });
    }
    return s;
}

SuiteResult direction_suite(const VerifyOptions &o)
{
    SuiteResult s{"direction"};
    for (std::size_t i = 0; i < o.feasibility_samples; ++i)
    {
        Draw d = make_draw(o.seed ^ 0xd1dULL, i);
        const CMatrix u = recover_direction(d.instance.h(), d.params.lambda, d.params.mu);
        Rng rng = Rng::stream(o.seed ^ 0xd1eULL, i);
        const double c = std::pow(10.0, rng.uniform(-2.0, 2.0));
        for (auto &x : d.params.lambda)
            x *= c;
        for (auto &x : d.params.mu)
            x *= c;
        const CMatrix w = recover_direction(d.instance.h(), d.params.lambda, d.params.mu);
        double norm_err = 0.0;
        double scale_err = 0.0;
        for (std::size_t k = 0; k < u.cols(); ++k)
        {
            norm_err = std::max(norm_err, std::abs(vec_norm2(u.col(k)) - 1.0));
            for (std::size_t r = 0; r < u.rows(); ++r)
                scale_err = std::max(scale_err, std::abs(u(r, k) - w(r, k)));
        }
        record(s, norm_err <= 1e-12 && scale_err <= 1e-10, [&]() {
            return "invariant=unit norm and (lambda, mu) scale invariance " +
                   case_tag(o.seed, i, u.rows(), u.cols()) + " norm_err=" + fmt("%.3g", norm_err) +
                   " scale_err=" + fmt("%.3g", scale_err);
        });
    }
    return s;
}

SuiteResult gradient_suite(const VerifyOptions &o)
{
    SuiteResult s{"gradient"};
    for (Variant v : {Variant::proposed, Variant::dilearn})
        for (std::size_t c = 0; c < o.gradient_configs; ++c)
        {
            Rng rng = Rng::stream(o.seed ^ 0x9aadULL, c + (v == Variant::dilearn ? 1000 : 0));
            MlpModel model = MlpModel::init({2, 2, v, 4, 32}, rng.next_u64());
            for (auto &t : model.params)
                for (Eigen::Index i = 0; i < t.bn_scale.size(); ++i)
                {
                    t.bn_scale(i) = rng.uniform(0.5, 1.5);
                    t.bn_shift(i) = rng.uniform(-0.5, 0.5);
                }
            std::vector<SystemInstance> batch;
            for (std::size_t b = 0; b < 8; ++b)
                batch.push_back(SystemInstance::from_sample(
                    generate_sample(o.seed ^ 0x9abULL, c * 8 + b, 2, 2, OneRingParams{}, ConstraintBounds{})));
            fit_input_normalization(model, build_input_batch(std::span<const SystemInstance>(batch)));
            PipelineGradient pg = pipeline_gradient(model, batch);
            auto gv = tensor_views(pg.grads);
            auto pv = tensor_views(model.params);
            const double step = 1e-5;
            double worst = 0.0;
            std::string where;
            for (std::size_t t = 0; t < pv.size(); ++t)
                for (int probe = 0; probe < 3; ++probe)
                {
                    const std::size_t i = rng.below(pv[t].values.size());
                    const double orig = pv[t].values[i];
                    pv[t].values[i] = orig + step;
                    const double up = pipeline_gradient(model, batch).loss;
                    pv[t].values[i] = orig - step;
                    const double down = pipeline_gradient(model, batch).loss;
                    pv[t].values[i] = orig;
                    const double fd = (up - down) / (2.0 * step);
                    const double a = gv[t].values[i];
                    const double err = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-5});
                    if (err > worst)
                    {
                        worst = err;
                        where = pv[t].name + "[" + std::to_string(i) + "]";
                    }
                }
            record(s, worst < 1e-4, [&]() {
                return "invariant=analytic gradient vs central differences variant=" + to_string(v) +
                       " config=" + std::to_string(c) + " seed=" + std::to_string(o.seed) + " worst=" + where +
                       " rel_err=" + fmt("%.3g", worst);
            });
        }
    return s;
}

double scalar_closed_form(const SystemInstance &inst)
{
    const double g = std::norm(inst.h()(0, 0));
    const double p = inst.power_budget();
    const double pt = inst.virtual_power();
    return std::log2(1.0 + pt * g / (1.0 + g * p / (1.0 + inst.beta)));
}

SuiteResult oracle_suite(const VerifyOptions &o)
{
    SuiteResult s{"scalar_oracle"};
    for (std::size_t i = 0; i < 20; ++i)
    {
        const auto inst = SystemInstance::from_sample(
            generate_sample(o.seed ^ 0x04acULL, i, 1, 1, OneRingParams{}, ConstraintBounds{}));
        const double exact = scalar_closed_form(inst);
        const double ls = local_search(inst).sum_rate;
        const double bf = brute_force_oracle(inst, 32).sum_rate;
        record(s, std::abs(ls - exact) <= 1e-6 && std::abs(bf - exact) <= 1e-3, [&]() {
            return "invariant=M=K=1 closed form " + case_tag(o.seed, i, 1, 1) + " closed=" + fmt("%.12g", exact) +
                   " local_search=" + fmt("%.12g", ls) + " oracle=" + fmt("%.12g", bf);
        });
    }
    return s;
}

SuiteResult baseline_suite(const VerifyOptions &o)
{
    SuiteResult s{"baselines"};
    for (std::size_t i = 0; i < 40; ++i)
    {
        const Draw d = make_draw(o.seed ^ 0xba5eULL, i);
        const Solution mrt = mrt_uniform(d.instance);
        LocalSearchConfig cfg;
        cfg.seed = o.seed + i;
        const LocalSearchResult ls = local_search(d.instance, cfg);
        const double p = d.instance.power_budget();
        const bool ok = check_feasibility(mrt.v, mrt.omega, p, d.instance.beta).feasible &&
                        check_feasibility(ls.solution.v, ls.solution.omega, p, d.instance.beta).feasible &&
                        ls.sum_rate >= sum_rate(d.instance.h(), mrt.v, mrt.omega);
        record(s, ok, [&]() {
            return "invariant=baseline feasibility and local_search >= mrt " +
                   case_tag(o.seed, i, d.instance.h().rows(), d.instance.h().cols());
        });
    }
    return s;
}

} // namespace

int run_verify(const VerifyOptions &opts, std::ostream &out)
{
    if (opts.inject_scale_fault)
        out << "note: injected fault: beamformer scaling factor multiplied by 1.01\n";
    std::vector<SuiteResult> suites;
    suites.push_back(feasibility_suite(opts));
    suites.push_back(direction_suite(opts));
    suites.push_back(gradient_suite(opts));
    suites.push_back(oracle_suite(opts));
    suites.push_back(baseline_suite(opts));

    bool all = true;
    for (const auto &s : suites)
    {
        const bool ok = s.passed == s.total;
        all = all && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-4s %-14s %zu/%zu\n", ok ? "PASS" : "FAIL", s.name.c_str(), s.passed,
                      s.total);
        out << buf;
    }
    for (const auto &s : suites)
        if (s.first_failure)
        {
            out << "first failure in " << s.name << ": " << *s.first_failure << "\n";
            break;
        }
    return all ? kOk : kVerifyFailed;
}

} // namespace cran::cli
