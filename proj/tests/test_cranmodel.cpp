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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cran/cranmodel.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace cran;
using namespace std::complex_literals;

namespace
{
CMatrix column_matrix(std::initializer_list<CVector> cols)
{
    const std::size_t m = cols.begin()->size();
    CMatrix out(m, cols.size());
    std::size_t k = 0;
    for (const auto &c : cols)
        out.set_col(k++, c);
    return out;
}

double max_ap_power(const Beamformer &v)
{
    const auto p = per_ap_power(v);
    return *std::max_element(p.begin(), p.end());
}
} // namespace

TEST_CASE("beta_from_capacity")
{
    CHECK(beta_from_capacity(2.0) == 3.0);
    CHECK(beta_from_capacity(10.0) == 1023.0);
    CHECK(beta_from_capacity(0.0) == 0.0);
    CHECK_THROWS_AS((void)beta_from_capacity(-1.0), std::invalid_argument);
}

TEST_CASE("user_rate and sum_rate: hand-computed cases")
{
    // M = K = 1, h = 1, v = sqrt(3), omega = 1 -> log2(1 + 3/2)
    CMatrix h(1, 1);
    h(0, 0) = 1.0;
    Beamformer v{CMatrix(1, 1)};
    v.v(0, 0) = std::sqrt(3.0);
    CHECK(user_rate(h, v, QuantNoise{{1.0}}, 0) == doctest::Approx(std::log2(2.5)).epsilon(1e-14));
    CHECK(std::abs(user_rate(h, v, QuantNoise{{1.0}}, 0) - 1.321928) < 1e-6);

    Beamformer zero{CMatrix(1, 1)};
    CHECK(user_rate(h, zero, QuantNoise{{1.0}}, 0) == 0.0);

    // orthogonal channels: no interference
    const double p = 7.0;
    const CMatrix h2 = column_matrix({{1.0, 0.0}, {0.0, 1.0}});
    Beamformer v2{column_matrix({{std::sqrt(p), 0.0}, {0.0, std::sqrt(p)}})};
    const QuantNoise w0{{0.0, 0.0}};
    CHECK(user_rate(h2, v2, w0, 0) == doctest::Approx(std::log2(1.0 + p)));
    CHECK(user_rate(h2, v2, w0, 1) == doctest::Approx(std::log2(1.0 + p)));
    CHECK(sum_rate(h2, v2, w0) == doctest::Approx(2.0 * std::log2(1.0 + p)));
    CHECK(sum_rate(h2, Beamformer{CMatrix(2, 2)}, w0) == 0.0);
}

TEST_CASE("sum_rate matches an independent scalar re-implementation")
{
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t m = 1 + trial % 4;
        const std::size_t k = 1 + (trial / 4) % 4;
        const CMatrix h = testing::random_cmatrix(rng, m, k);
        const Beamformer v{testing::random_cmatrix(rng, m, k)};
        const QuantNoise w{testing::random_positive(rng, m, 0.0, 2.0)};
        const double expected = testing::scalar_sum_rate(h, v.v, w.omega);
        CHECK(std::abs(sum_rate(h, v, w) - expected) <= 1e-12 * std::max(1.0, expected));
        double by_user = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk)
            by_user += user_rate(h, v, w, kk);
        CHECK(std::abs(by_user - expected) <= 1e-12 * std::max(1.0, expected));
    }
}

TEST_CASE("user_rate is strictly decreasing in each omega_i")
{
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial)
    {
        const std::size_t m = 3;
        const std::size_t k = 2;
        const CMatrix h = testing::random_cmatrix(rng, m, k);
        const Beamformer v{testing::random_cmatrix(rng, m, k)};
        QuantNoise w{testing::random_positive(rng, m, 0.0, 1.0)};
        for (std::size_t kk = 0; kk < k; ++kk)
            for (std::size_t i = 0; i < m; ++i)
            {
                QuantNoise bumped = w;
                bumped.omega[i] += 0.1;
                CHECK(user_rate(h, v, bumped, kk) < user_rate(h, v, w, kk));
            }
    }
}

TEST_CASE("sum_rate is invariant to per-UE phase rotations")
{
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial)
    {
        const CMatrix h = testing::random_cmatrix(rng, 3, 3);
        Beamformer v{testing::random_cmatrix(rng, 3, 3)};
        const QuantNoise w{testing::random_positive(rng, 3, 0.0, 1.0)};
        const double before = sum_rate(h, v, w);
        for (std::size_t k = 0; k < 3; ++k)
        {
            const cplx rot = std::polar(1.0, rng.uniform(0.0, 6.28));
            for (std::size_t i = 0; i < 3; ++i)
                v.v(i, k) *= rot;
        }
        CHECK(std::abs(sum_rate(h, v, w) - before) <= 1e-12);
    }
}

TEST_CASE("recover_direction")
{
    Rng rng(21);
    SUBCASE("K = 1, lambda = 0, mu = 1 gives the matched filter")
    {
        const CMatrix h = testing::random_cmatrix(rng, 4, 1);
        const CMatrix u = recover_direction(h, {0.0}, {1.0, 1.0, 1.0, 1.0});
        const double n = vec_norm2(h.col(0));
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(u(i, 0) - h(i, 0) / n) < 1e-15);
    }
    SUBCASE("M = 1 gives a unit-modulus scalar h/|h|")
    {
        const CMatrix h = testing::random_cmatrix(rng, 1, 3);
        const CMatrix u = recover_direction(h, testing::random_positive(rng, 3), {0.7});
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::abs(u(0, k) - h(0, k) / std::abs(h(0, k))) < 1e-15);
    }
    SUBCASE("parallel to the dense-inverse oracle")
    {
        for (int trial = 0; trial < 100; ++trial)
        {
            const CMatrix h = testing::random_cmatrix(rng, 3, 2);
            const auto lambda = testing::random_positive(rng, 2);
            const auto mu = testing::random_positive(rng, 3);
            CMatrix a(3, 3);
            for (std::size_t i = 0; i < 3; ++i)
                a(i, i) = mu[i];
            for (std::size_t l = 0; l < 2; ++l)
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 3; ++j)
                        a(i, j) += lambda[l] * h(i, l) * std::conj(h(j, l));
            const CMatrix inv = testing::dense_inverse(a);
            const CMatrix u = recover_direction(h, lambda, mu);
            for (std::size_t k = 0; k < 2; ++k)
            {
                const CVector x = inv * std::span<const cplx>(h.col(k));
                const CVector uk = u.col(k);
                const double cosine = std::abs(inner(uk, x)) / (vec_norm2(uk) * vec_norm2(x));
                CHECK(std::abs(cosine - 1.0) < 1e-10);
                CHECK(std::abs(vec_norm2(uk) - 1.0) < 1e-12);
            }
        }
    }
    SUBCASE("joint (lambda, mu) scaling leaves directions unchanged")
    {
        for (int trial = 0; trial < 100; ++trial)
        {
            const CMatrix h = testing::random_cmatrix(rng, 4, 3);
            auto lambda = testing::random_positive(rng, 3);
            auto mu = testing::random_positive(rng, 4);
            const CMatrix u = recover_direction(h, lambda, mu);
            const double c = std::pow(10.0, rng.uniform(-3.0, 3.0));
            for (auto &x : lambda)
                x *= c;
            for (auto &x : mu)
                x *= c;
            const CMatrix u2 = recover_direction(h, lambda, mu);
            for (std::size_t i = 0; i < u.data().size(); ++i)
                CHECK(std::abs(u.data()[i] - u2.data()[i]) < 1e-10);
        }
    }
    SUBCASE("non-positive mu is rejected")
    {
        const CMatrix h = testing::random_cmatrix(rng, 2, 1);
        CHECK_THROWS_AS((void)recover_direction(h, {1.0}, {1.0, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS((void)recover_direction(h, {-1.0}, {1.0, 1.0}), std::invalid_argument);
    }
}

TEST_CASE("assemble_beamformer")
{
    Rng rng(31);
    const CMatrix h = testing::random_cmatrix(rng, 3, 3);
    const CMatrix u = recover_direction(h, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const Beamformer v = assemble_beamformer({0.0, 4.0, 0.3}, u);
    CHECK(vec_norm2(v.v.col(0)) == 0.0);
    CHECK(vec_norm2(v.v.col(1)) == doctest::Approx(2.0).epsilon(1e-14));
    double power = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        power += std::norm(v.v(i, 2));
    CHECK(std::abs(power - 0.3) < 1e-12);
}

TEST_CASE("scale_to_feasible")
{
    SUBCASE("scalar arithmetic")
    {
        Beamformer v{CMatrix(1, 1)};
        v.v(0, 0) = 2.0;
        const Beamformer s = scale_to_feasible(v, 3.0, 3.0);
        CHECK(s.v(0, 0).real() == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(scaling_for(v, 3.0, 3.0).factor == doctest::Approx(0.75).epsilon(1e-15));
    }
    SUBCASE("already at the cap is unchanged")
    {
        Rng rng(41);
        Beamformer v{testing::random_cmatrix(rng, 3, 2)};
        const double p = 10.0;
        const double beta = 7.0;
        const Beamformer once = scale_to_feasible(v, p, beta);
        const Beamformer twice = scale_to_feasible(once, p, beta);
        for (std::size_t i = 0; i < once.v.data().size(); ++i)
            CHECK(std::abs(once.v.data()[i] - twice.v.data()[i]) < 1e-14);
    }
    SUBCASE("random: cap reached exactly, argmax preserved, common factor")
    {
        Rng rng(42);
        for (int trial = 0; trial < 200; ++trial)
        {
            const std::size_t m = 1 + trial % 6;
            const std::size_t k = 1 + (trial / 6) % 6;
            Beamformer v{testing::random_cmatrix(rng, m, k)};
            const double p = std::pow(10.0, rng.uniform(0.0, 3.0));
            const double beta = std::exp2(rng.uniform(2.0, 10.0)) - 1.0;
            const Beamformer s = scale_to_feasible(v, p, beta);
            const double p_tilde = p / (1.0 + 1.0 / beta);
            CHECK(std::abs(max_ap_power(s) - p_tilde) <= 1e-12 * p_tilde);
            const auto before = per_ap_power(v);
            const auto after = per_ap_power(s);
            CHECK(std::max_element(before.begin(), before.end()) - before.begin() ==
                  std::max_element(after.begin(), after.end()) - after.begin());
            const cplx ratio = s.v(0, 0) / v.v(0, 0);
            CHECK(std::abs(ratio.imag()) < 1e-12);
            CHECK(ratio.real() > 0.0);
        }
    }
    SUBCASE("zero beamformer is degenerate")
    {
        CHECK_THROWS_AS((void)scale_to_feasible(Beamformer{CMatrix(2, 2)}, 1.0, 1.0), DegenerateInputError);
    }
}

TEST_CASE("recover_quant_noise")
{
    Beamformer v{CMatrix(2, 3)};
    v.v(0, 0) = 1.0;
    v.v(0, 1) = 1.0i;
    v.v(0, 2) = -1.0;
    const QuantNoise q = recover_quant_noise(v, 3.0);
    CHECK(q.omega[0] == doctest::Approx(1.0));
    CHECK(q.omega[1] == 0.0);
    const FeasibilityReport r = check_feasibility(v, q, 10.0, 3.0);
    CHECK(r.feasible);

    CHECK(recover_quant_noise(Beamformer{CMatrix(2, 2)}, 3.0).omega == std::vector<double>{0.0, 0.0});
}

TEST_CASE("recover_solution")
{
    Rng rng(51);
    SUBCASE("M = K = 1: scalar power pinned at P~")
    {
        for (int trial = 0; trial < 50; ++trial)
        {
            const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 1, 1));
            const Solution s = recover_solution(inst, testing::random_params(rng, 1, 1));
            const cplx h = inst.h()(0, 0);
            const cplx expected = std::sqrt(inst.virtual_power()) * h / std::abs(h);
            CHECK(std::abs(s.v.v(0, 0) - expected) < 1e-12 * std::sqrt(inst.virtual_power()));
            CHECK(s.omega.omega[0] == doctest::Approx(inst.power_budget() / (1.0 + inst.beta)).epsilon(1e-12));
        }
    }
    SUBCASE("random instances are feasible with fronthaul equality")
    {
        for (int trial = 0; trial < 500; ++trial)
        {
            const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 3, 3));
            const Solution s = recover_solution(inst, testing::random_params(rng, 3, 3));
            const auto r = check_feasibility(s.v, s.omega, inst.power_budget(), inst.beta);
            CHECK(r.feasible);
            CHECK(std::abs(r.worst_fronthaul_slack) <= 1e-9);
            CHECK(std::abs(sum_rate(inst.h(), s.v, s.omega) -
                           testing::scalar_sum_rate(inst.h(), s.v.v, s.omega.omega)) <= 1e-12 * 10.0);
        }
    }
    SUBCASE("only UE 1 served when p = (1, 0, 0)")
    {
        const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 3, 3));
        IntermediateParams prm = testing::random_params(rng, 3, 3);
        prm.p = {1.0, 0.0, 0.0};
        const Solution s = recover_solution(inst, prm);
        CHECK(vec_norm2(s.v.v.col(1)) == 0.0);
        CHECK(vec_norm2(s.v.v.col(2)) == 0.0);
        CHECK(user_rate(inst.h(), s.v, s.omega, 0) > 0.0);
        // UEs 2 and 3 only see v_1 as interference, so their rate is zero
        CHECK(user_rate(inst.h(), s.v, s.omega, 1) == 0.0);
    }
    SUBCASE("all-zero powers are degenerate")
    {
        const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 2, 2));
        IntermediateParams prm = testing::random_params(rng, 2, 2);
        prm.p = {0.0, 0.0};
        CHECK_THROWS_AS((void)recover_solution(inst, prm), DegenerateInputError);
    }
}

TEST_CASE("check_feasibility flags constructed violations")
{
    Rng rng(61);
    const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 4, 3));
    const Solution s = recover_solution(inst, testing::random_params(rng, 4, 3));
    const double p = inst.power_budget();

    const auto ok = check_feasibility(s.v, s.omega, p, inst.beta);
    CHECK(ok.feasible);
    CHECK(std::abs(ok.worst_fronthaul_slack) <= 1e-9);

    Beamformer doubled = s.v;
    doubled.v *= 2.0;
    const auto pw = check_feasibility(doubled, s.omega, p, inst.beta);
    CHECK_FALSE(pw.feasible);
    CHECK(pw.worst_power_slack < 0.0);
    const auto power = per_ap_power(s.v);
    CHECK(pw.worst_power_ap == static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin()));

    QuantNoise halved = s.omega;
    for (auto &w : halved.omega)
        w *= 0.5;
    const auto fh = check_feasibility(s.v, halved, p, inst.beta);
    CHECK_FALSE(fh.feasible);
    CHECK(fh.worst_fronthaul_slack < 0.0);
}

// ---- gradients against central differences ------------------------------------

namespace
{
double rel_err(double a, double b, double floor)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}
} // namespace

TEST_CASE("sum_rate_gradient matches central differences")
{
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial)
    {
        const CMatrix h = testing::random_cmatrix(rng, 3, 2);
        Beamformer v{testing::random_cmatrix(rng, 3, 2)};
        QuantNoise w{testing::random_positive(rng, 3, 0.1, 1.0)};
        const RateGradient g = sum_rate_gradient(h, v, w);
        CHECK(g.value == doctest::Approx(sum_rate(h, v, w)).epsilon(1e-14));
        const double step = 1e-6;
        for (std::size_t idx = 0; idx < v.v.data().size(); ++idx)
            for (int part = 0; part < 2; ++part)
            {
                const cplx delta = part == 0 ? cplx(step, 0.0) : cplx(0.0, step);
                Beamformer vp = v, vm = v;
                vp.v.data()[idx] += delta;
                vm.v.data()[idx] -= delta;
                const double fd = (sum_rate(h, vp, w) - sum_rate(h, vm, w)) / (2.0 * step);
                const double an = part == 0 ? g.d_v.data()[idx].real() : g.d_v.data()[idx].imag();
                CHECK(rel_err(an, fd, 1e-6) < 1e-6);
            }
        for (std::size_t i = 0; i < 3; ++i)
        {
            QuantNoise wp = w, wm = w;
            wp.omega[i] += step;
            wm.omega[i] -= step;
            const double fd = (sum_rate(h, v, wp) - sum_rate(h, v, wm)) / (2.0 * step);
            CHECK(rel_err(g.d_omega[i], fd, 1e-6) < 1e-6);
            CHECK(g.d_omega[i] < 0.0);
        }
    }
}

TEST_CASE("recover_solution_gradient matches central differences")
{
    Rng rng(72);
    for (int trial = 0; trial < 30; ++trial)
    {
        const std::size_t m = 1 + trial % 4;
        const std::size_t k = 1 + (trial / 4) % 3;
        const auto inst = SystemInstance::from_sample(testing::random_sample(rng, m, k, 1.0, 1e3));
        IntermediateParams prm = testing::random_params(rng, m, k);
        const ParamsGradient g = recover_solution_gradient(inst, prm);

        auto value = [&](const IntermediateParams &q) {
            const Solution s = recover_solution(inst, q);
            return sum_rate(inst.h(), s.v, s.omega);
        };
        CHECK(g.value == doctest::Approx(value(prm)).epsilon(1e-13));

        auto check_block = [&](std::vector<double> IntermediateParams::*field, const std::vector<double> &grad) {
            for (std::size_t j = 0; j < (prm.*field).size(); ++j)
            {
                const double x = (prm.*field)[j];
                const double step = 1e-4 * std::max(1.0, x);
                IntermediateParams qp = prm, qm = prm;
                (qp.*field)[j] = x + step;
                (qm.*field)[j] = x - step;
                const double fd = (value(qp) - value(qm)) / (2.0 * step);
                CHECK(rel_err(grad[j], fd, 1e-5) < 1e-5);
            }
        };
        check_block(&IntermediateParams::p, g.d_p);
        check_block(&IntermediateParams::lambda, g.d_lambda);
        check_block(&IntermediateParams::mu, g.d_mu);
    }
}

TEST_CASE("scaled_rate_gradient matches central differences")
{
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto inst = SystemInstance::from_sample(testing::random_sample(rng, 3, 2));
        const Beamformer w{testing::random_cmatrix(rng, 3, 2)};
        const ScaledRateGradient g = scaled_rate_gradient(inst, w);
        auto value = [&](const Beamformer &x) {
            const Solution s = finalize_beamformer(inst, x);
            return sum_rate(inst.h(), s.v, s.omega);
        };
        const double step = 1e-7;
        for (std::size_t idx = 0; idx < w.v.data().size(); ++idx)
            for (int part = 0; part < 2; ++part)
            {
                const cplx delta = part == 0 ? cplx(step, 0.0) : cplx(0.0, step);
                Beamformer wp = w, wm = w;
                wp.v.data()[idx] += delta;
                wm.v.data()[idx] -= delta;
                const double fd = (value(wp) - value(wm)) / (2.0 * step);
                const double an = part == 0 ? g.d_unscaled.data()[idx].real() : g.d_unscaled.data()[idx].imag();
                CHECK(rel_err(an, fd, 1e-5) < 1e-5);
            }
    }
}
