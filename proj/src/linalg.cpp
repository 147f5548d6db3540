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

#include "cran/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cran
{

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("CMatrix: entry count does not match rows*cols");
}

CVector CMatrix::col(std::size_t c) const
{
    CVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

void CMatrix::set_col(std::size_t c, std::span<const cplx> values)
{
    if (values.size() != rows_)
        throw std::invalid_argument("CMatrix::set_col: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r)
        (*this)(r, c) = values[r];
}

CMatrix CMatrix::identity(std::size_t n)
{
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        out(i, i) = 1.0;
    return out;
}

CMatrix CMatrix::conj_transpose() const
{
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out(c, r) = std::conj((*this)(r, c));
    return out;
}

CMatrix &CMatrix::operator+=(const CMatrix &rhs)
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("CMatrix::operator+=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += rhs.data_[i];
    return *this;
}

CMatrix &CMatrix::operator*=(cplx s)
{
    for (auto &x : data_)
        x *= s;
    return *this;
}

CMatrix operator*(const CMatrix &a, const CMatrix &b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("CMatrix product: inner dimension mismatch");
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
        {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

CVector operator*(const CMatrix &a, std::span<const cplx> x)
{
    if (a.cols() != x.size())
        throw std::invalid_argument("CMatrix-vector product: dimension mismatch");
    CVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

namespace
{
std::string definiteness_message(std::size_t pivot, double value)
{
    std::ostringstream os;
    os << "matrix is not positive definite: pivot " << pivot << " = " << value;
    return os.str();
}
} // namespace

DefinitenessError::DefinitenessError(std::size_t pivot, double value)
    : std::runtime_error(definiteness_message(pivot, value)), pivot_(pivot), value_(value)
{
}

CholeskyFactor::CholeskyFactor(const CMatrix &a)
{
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n)
        throw std::invalid_argument("CholeskyFactor: matrix must be square and nonempty");

    double max_abs = 0.0;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        max_diag = std::max(max_diag, a(i, i).real());
        for (std::size_t j = 0; j < n; ++j)
            max_abs = std::max(max_abs, std::abs(a(i, j)));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > kHermitianTolerance * std::max(max_abs, 1.0))
                throw std::invalid_argument("CholeskyFactor: matrix is not Hermitian");

    const double threshold = kPivotThreshold * max_diag;
    lower_ = CMatrix(n, n);
    CMatrix &l = lower_;
    for (std::size_t j = 0; j < n; ++j)
    {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(l(j, k));
        if (!(d > threshold) || !std::isfinite(d))
            throw DefinitenessError(j, d);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i)
        {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
}

CVector CholeskyFactor::solve(std::span<const cplx> b) const
{
    const std::size_t n = size();
    if (b.size() != n)
        throw std::invalid_argument("CholeskyFactor::solve: length mismatch");
    const CMatrix &l = lower_;

    // L y = b
    CVector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i)
    {
        cplx s = y[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= l(i, k) * y[k];
        y[i] = s / l(i, i).real();
    }
    // L^H x = y
    for (std::size_t ii = n; ii-- > 0;)
    {
        cplx s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k)
            s -= std::conj(l(k, ii)) * y[k];
        y[ii] = s / l(ii, ii).real();
    }
    return y;
}

CVector hermitian_pd_solve(const CMatrix &a, std::span<const cplx> b)
{
    return CholeskyFactor(a).solve(b);
}

CMatrix outer_hermitian(std::span<const cplx> h)
{
    if (h.empty())
        throw std::invalid_argument("outer_hermitian: empty vector");
    const std::size_t n = h.size();
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out(i, i) = std::norm(h[i]);
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const cplx v = h[i] * std::conj(h[j]);
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    return out;
}

double vec_norm2(std::span<const cplx> h)
{
    double scale = 0.0;
    for (const auto &x : h)
        scale = std::max({scale, std::abs(x.real()), std::abs(x.imag())});
    if (scale == 0.0)
        return 0.0;
    double ssq = 0.0;
    for (const auto &x : h)
    {
        const double re = x.real() / scale;
        const double im = x.imag() / scale;
        ssq += re * re + im * im;
    }
    return scale * std::sqrt(ssq);
}

double frobenius_norm(const CMatrix &a)
{
    return vec_norm2(a.data());
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("inner: length mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

} // namespace cran
