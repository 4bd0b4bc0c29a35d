// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "rrce/evaluation.hpp"
#include "rrce/interference.hpp"
#include "rrce/linalg.hpp"
#include "test_util.hpp"

using namespace rrce;
using rrce::testing::max_abs;

TEST_CASE("no interferers leaves white noise")
{
    InterferenceProfile p;
    p.noise_power = 2.5;
    const ArrayGeometry g{6, 0.5};
    const NoiseCovariance nc = interference_covariance(p, 10.0, g, 0.999, 64);
    CHECK(max_abs(nc.r_eta, 2.5 * CMatrix::Identity(6, 6)) == 0.0);
    CHECK(max_abs(nc.chol * nc.chol.adjoint(), nc.r_eta) < 1e-12);
}

TEST_CASE("single point-source interferer")
{
    const ArrayGeometry g{8, 0.5};
    InterferenceProfile p;
    p.interferers.push_back(Interferer{GroupSpec::uniform(1, 1, {AngularSector{20.0, 20.0}}), 1.0});
    const double es = 7.0;
    const NoiseCovariance nc = interference_covariance(p, es, g, 0.999, 64);
    const CVector a = steering_vector(g, 20.0);
    const CMatrix expect = es * a * a.adjoint() / 8.0 + CMatrix::Identity(8, 8);
    CHECK(max_abs(nc.r_eta, expect) < 1e-12);
}

TEST_CASE("seven three-user groups add 21 E_s to the trace")
{
    const Scenario sc = default_scenario();
    InterferenceProfile p;
    p.interferers = sc.interferers;
    const double es = 1000.0;
    const NoiseCovariance nc = interference_covariance(p, es, sc.geom, 0.999, 464);
    CHECK(std::abs(nc.r_eta.trace().real() - (21.0 * es + 100.0)) < 1e-8 * (21.0 * es));
    CHECK(linalg::hermitian_defect(nc.r_eta) < 1e-12);
    CHECK(linalg::hermitian_eig(nc.r_eta).values.minCoeff() >= 1.0 - 1e-9);
}

TEST_CASE("space-time apply equals the dense Kronecker product")
{
    std::mt19937_64 rng(8);
    const NoiseCovariance nc = make_noise_covariance(linalg::random_hpd(6, rng));
    const CVector v = linalg::complex_normal(18, 1, rng).col(0);
    const CMatrix dense = linalg::kron(CMatrix::Identity(3, 3), nc.r_eta);
    CHECK(max_abs(spacetime_noise_apply(nc, 3, v), dense * v) < 1e-12);

    const CVector v1 = v.head(6);
    CHECK(max_abs(spacetime_noise_apply(nc, 1, v1), nc.r_eta * v1) < 1e-12);

    const NoiseCovariance id = make_noise_covariance(CMatrix::Identity(6, 6));
    CHECK(max_abs(spacetime_noise_apply(id, 3, v), v) == 0.0);
    CHECK_THROWS_AS(spacetime_noise_apply(nc, 4, v), ValidationError);
}

TEST_CASE("space-time noise draws have covariance I_T kron R_eta")
{
    std::mt19937_64 rng(9);
    const NoiseCovariance nc = make_noise_covariance(linalg::random_hpd(3, rng, 0.5));
    const Index t = 2;
    const Index dim = 3 * t;
    const CMatrix expect = linalg::kron(CMatrix::Identity(t, t), nc.r_eta);
    const int trials = 100000;
    CMatrix sum = CMatrix::Zero(dim, dim);
    RMatrix sum_sq = RMatrix::Zero(dim, dim);
    for (int i = 0; i < trials; ++i) {
        const CVector x = sample_spacetime_noise(nc, t, rng);
        const CMatrix o = x * x.adjoint();
        sum += o;
        sum_sq += o.cwiseAbs2();
    }
    const CMatrix mean = sum / trials;
    int outside = 0;
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            const double se =
                std::sqrt(std::max(sum_sq(i, j) / trials - std::norm(mean(i, j)), 0.0) / trials);
            outside += std::abs(mean(i, j) - expect(i, j)) > 4.0 * se + 1e-12 ? 1 : 0;
        }
    }
    CHECK(outside <= 1);
}

TEST_CASE("invalid profiles are rejected")
{
    InterferenceProfile p;
    p.noise_power = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.noise_power = 1.0;
    p.interferers.push_back(Interferer{GroupSpec::uniform(1, 1, {AngularSector{0, 1}}), -1.0});
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_THROWS_AS(make_noise_covariance(-CMatrix::Identity(2, 2)), ConditioningError);
}
