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

#ifndef CRAN_LINALG_HPP
#define CRAN_LINALG_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran
{

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Dense complex matrix, row-major. Sizes here never exceed a few dozen, so
// everything is stored by value.
class CMatrix
{
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    CVector col(std::size_t c) const;
    void set_col(std::size_t c, std::span<const cplx> values);

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    static CMatrix identity(std::size_t n);

    CMatrix conj_transpose() const;
    CMatrix &operator+=(const CMatrix &rhs);
    CMatrix &operator*=(cplx s);

    bool operator==(const CMatrix &rhs) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix &a, const CMatrix &b);
CVector operator*(const CMatrix &a, std::span<const cplx> x);

/// Thrown when a Cholesky pivot falls below the definiteness threshold.
class DefinitenessError : public std::runtime_error
{
public:
    DefinitenessError(std::size_t pivot, double value);
    std::size_t pivot() const { return pivot_; }
    double value() const { return value_; }

private:
    std::size_t pivot_;
    double value_;
};

/// Lower-triangular factor L with A = L L^H.
///
/// A pivot smaller than 1e-12 times the largest diagonal entry of A raises
/// DefinitenessError carrying the offending pivot index. Inputs are checked
/// for Hermitian symmetry to 1e-10 (relative to the largest entry).
class CholeskyFactor
{
public:
    explicit CholeskyFactor(const CMatrix &a);

    std::size_t size() const { return lower_.rows(); }
    const CMatrix &lower() const { return lower_; }

    CVector solve(std::span<const cplx> b) const;

private:
    CMatrix lower_;
};

inline constexpr double kPivotThreshold = 1e-12;
inline constexpr double kHermitianTolerance = 1e-10;

CVector hermitian_pd_solve(const CMatrix &a, std::span<const cplx> b);

/// h h^H. Exactly Hermitian: the (j, i) entry is written as conj of (i, j).
CMatrix outer_hermitian(std::span<const cplx> h);

double vec_norm2(std::span<const cplx> h);

double frobenius_norm(const CMatrix &a);

// <a, b> = a^H b
cplx inner(std::span<const cplx> a, std::span<const cplx> b);

} // namespace cran

#endif
