// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "rrce/linalg.hpp"
#include "test_util.hpp"

using namespace rrce;
using rrce::testing::max_abs;

namespace {

CMatrix random_matrix(Index r, Index c, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return linalg::complex_normal(r, c, rng);
}

} // namespace

TEST_CASE("kron matches the entrywise definition")
{
    const CMatrix a = random_matrix(2, 3, 1);
    const CMatrix b = random_matrix(4, 2, 2);
    const CMatrix k = linalg::kron(a, b);
    REQUIRE(k.rows() == 8);
    REQUIRE(k.cols() == 6);
    double worst = 0.0;
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j)
            for (Index p = 0; p < 4; ++p)
                for (Index q = 0; q < 2; ++q)
                    worst = std::max(worst, std::abs(k(i * 4 + p, j * 2 + q) - a(i, j) * b(p, q)));
    CHECK(worst == 0.0);
}

TEST_CASE("selectors")
{
    const CMatrix e = linalg::elementary(3, 1);
    CHECK(e.sum() == cdouble(1.0));
    CHECK(e(1, 1) == cdouble(1.0));
    const CMatrix sel = linalg::user_delay_selector(2, 3, 2);
    CHECK(max_abs(sel, linalg::kron(CMatrix::Identity(2, 2), linalg::elementary(3, 2))) == 0.0);
}

TEST_CASE("hermitian_eig reconstructs and sorts descending")
{
    std::mt19937_64 rng(3);
    const CMatrix m = linalg::random_hpd(7, rng);
    const auto eig = linalg::hermitian_eig(m);
    for (Index i = 1; i < eig.values.size(); ++i) {
        CHECK(eig.values(i - 1) >= eig.values(i));
    }
    const CMatrix rec = eig.vectors * eig.values.cast<cdouble>().asDiagonal() * eig.vectors.adjoint();
    CHECK(max_abs(rec, m) < 1e-10);
    for (Index j = 0; j < eig.vectors.cols(); ++j) {
        Index arg = 0;
        eig.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(std::abs(eig.vectors(arg, j).imag()) < 1e-12);
        CHECK(eig.vectors(arg, j).real() > 0.0);
    }
}

TEST_CASE("pinv satisfies the Penrose conditions on a rank-deficient matrix")
{
    const CMatrix a = random_matrix(6, 2, 4) * random_matrix(2, 5, 5);
    const CMatrix p = linalg::pinv(a);
    CHECK(linalg::numerical_rank(a) == 2);
    CHECK(max_abs(a * p * a, a) < 1e-10);
    CHECK(max_abs(p * a * p, p) < 1e-10);
    CHECK(linalg::hermitian_defect(a * p) < 1e-10);
    CHECK(linalg::hermitian_defect(p * a) < 1e-10);
}

TEST_CASE("logdet and inverse of an HPD matrix")
{
    std::mt19937_64 rng(6);
    const CMatrix m = linalg::random_hpd(5, rng);
    CHECK(std::abs(linalg::logdet_hpd(m) - std::log(m.determinant().real())) < 1e-10);
    CHECK(max_abs(linalg::inverse_hpd(m) * m, CMatrix::Identity(5, 5)) < 1e-10);
    CMatrix bad = -CMatrix::Identity(3, 3);
    CHECK_THROWS_AS(linalg::logdet_hpd(bad), ConditioningError);
}

TEST_CASE("complex_normal has unit variance and zero mean")
{
    std::mt19937_64 rng(7);
    const CMatrix z = linalg::complex_normal(200000, 1, rng);
    const double n = static_cast<double>(z.size());
    const double power = z.squaredNorm() / n;
    // Var(|z|^2) = 1 for CN(0,1).
    CHECK(std::abs(power - 1.0) < 4.0 / std::sqrt(n));
    CHECK(std::abs(z.mean()) < 4.0 / std::sqrt(n));
    // Circular symmetry: E[z^2] = 0.
    CHECK(std::abs(z.array().square().mean()) < 4.0 / std::sqrt(n));
}
