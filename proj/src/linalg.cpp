// SPDX-License-Identifier: Apache-2.0
#include "rrce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace rrce::linalg {

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix elementary(Index size, Index l)
{
    CMatrix e = CMatrix::Zero(size, size);
    e(l, l) = 1.0;
    return e;
}

CMatrix user_delay_selector(Index num_users, Index memory, Index l)
{
    CMatrix e = CMatrix::Zero(num_users * memory, num_users * memory);
    for (Index k = 0; k < num_users; ++k) {
        e(k * memory + l, k * memory + l) = 1.0;
    }
    return e;
}

CMatrix hermitian_part(const CMatrix& m)
{
    return 0.5 * (m + m.adjoint());
}

double hermitian_defect(const CMatrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void normalize_phase(Eigen::Ref<CVector> v)
{
    if (v.size() == 0) {
        return;
    }
    Index imax = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        // Strict comparison with a small relative margin so that near-ties
        // resolve to the lowest index regardless of rounding.
        const double a = std::abs(v(i));
        if (a > best * (1.0 + 1e-9)) {
            best = a;
            imax = i;
        }
    }
    if (best > 0.0) {
        v *= std::conj(v(imax)) / best;
    }
}

HermitianEig hermitian_eig(const CMatrix& m)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw ConditioningError("hermitian_eig: eigensolver did not converge");
    }
    const Index n = m.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    // Solver output is ascending; walk it backwards then stable-sort so that
    // exact ties keep a fixed order.
    std::reverse(order.begin(), order.end());
    const RVector& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return ev(a) > ev(b); });

    HermitianEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        out.values(i) = ev(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
        normalize_phase(out.vectors.col(i));
    }
    return out;
}

namespace {

double pinv_cutoff(const CMatrix& m, double sigma_max)
{
    return static_cast<double>(std::max(m.rows(), m.cols())) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

} // namespace

CMatrix pinv(const CMatrix& m)
{
    if (m.size() == 0) {
        return CMatrix::Zero(m.cols(), m.rows());
    }
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? pinv_cutoff(m, s(0)) : 0.0;
    RVector inv = RVector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) {
            inv(i) = 1.0 / s(i);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Index numerical_rank(const CMatrix& m)
{
    if (m.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<CMatrix> svd(m);
    const RVector& s = svd.singularValues();
    if (s.size() == 0) {
        return 0;
    }
    const double cutoff = pinv_cutoff(m, s(0));
    return (s.array() > cutoff).count();
}

double logdet_hpd(const CMatrix& m)
{
    Eigen::LLT<CMatrix> llt(hermitian_part(m));
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("logdet_hpd: matrix is not positive definite");
    }
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Index i = 0; i < diag.size(); ++i) {
        acc += 2.0 * std::log(diag(i).real());
    }
    return acc;
}

CMatrix inverse_hpd(const CMatrix& m)
{
    Eigen::LLT<CMatrix> llt(hermitian_part(m));
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("inverse_hpd: matrix is not positive definite");
    }
    return llt.solve(CMatrix::Identity(m.rows(), m.cols()));
}

CMatrix complex_normal(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix out(rows, cols);
    // Column-major fill, real part first, so draws are reproducible.
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = cdouble(re, im);
        }
    }
    return out;
}

CMatrix random_hpd(Index n, std::mt19937_64& rng, double shift)
{
    const CMatrix a = complex_normal(n, n, rng);
    return hermitian_part(a * a.adjoint() + shift * CMatrix::Identity(n, n));
}

} // namespace rrce::linalg
