// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "rrce/beamspace.hpp"
#include "rrce/estimators.hpp"
#include "rrce/evaluation.hpp"
#include "rrce/linalg.hpp"
#include "rrce/reference.hpp"
#include "test_util.hpp"

using namespace rrce;
using rrce::testing::max_abs;
using rrce::testing::rel_fro;

namespace {

// Conditional-mean map E[z | v] = C_zv R_v^{-1} built from first principles:
// y = (X kron I_N) h + xi, h ~ CN(0, R_full), xi ~ CN(0, I_T kron R_eta).
struct Dense {
    CMatrix r_y;      // NT x NT
    CMatrix c_h_y;    // NKL x NT
};

Dense dense_statistics(const GroupModel& m)
{
    const Index n = m.num_elements();
    const Index t = m.length();
    const CMatrix b = linalg::kron(m.train.complete, CMatrix::Identity(n, n));
    Dense d;
    d.r_y = b * m.statics.r_full * b.adjoint() +
            linalg::kron(CMatrix::Identity(t, t), m.noise.r_eta);
    d.c_h_y = m.statics.r_full * b.adjoint();
    return d;
}

CMatrix reduction(const CMatrix& s, Index t)
{
    return linalg::kron(CMatrix::Identity(t, t), s.adjoint());
}

Beamspace per_delay_beam(const GroupModel& m)
{
    // One column per delay, steered by the top eigenvector of each R_l.
    Beamspace b;
    b.s.resize(m.num_elements(), m.memory());
    for (Index l = 0; l < m.memory(); ++l) {
        b.s.col(l) = m.covs[static_cast<std::size_t>(l)].eigvecs.col(0);
        b.blocks.push_back(BeamBlock{{l}, {l}, 0});
    }
    return b;
}

GroupModel scalar_model(double snr_db)
{
    Scenario s;
    s.geom = ArrayGeometry{1, 0.5};
    s.intended = GroupSpec::uniform(0, 1, {AngularSector{0.0, 0.0}});
    s.training_length = 1;
    s.snr_db = snr_db;
    return build_scenario_model(s).model;
}

} // namespace

TEST_CASE("observation synthesis")
{
    const ScenarioModel sm = build_scenario_model(reference_scenario());
    const GroupModel& m = sm.model;
    std::mt19937_64 rng(31);
    const CVector h = linalg::complex_normal(m.num_elements() * m.num_users() * m.memory(), 1, rng);
    const CVector conv = convolve_training(m.train, h, m.num_elements());
    const CMatrix b = linalg::kron(m.train.complete, CMatrix::Identity(m.num_elements(), m.num_elements()));
    CHECK(max_abs(conv, b * h) < 1e-12);

    const GroupModel one = scalar_model(10.0);
    CVector h1(1);
    h1 << cdouble(0.3, -0.2);
    CHECK(std::abs(convolve_training(one.train, h1, 1)(0) - one.pilots.at(0, 0) * h1(0)) < 1e-15);

    const CMatrix s = linalg::complex_normal(m.num_elements(), 3, rng);
    const CVector y = conv;
    CHECK(max_abs(reduce_observation(s, y), reduction(s, m.length()) * y) < 1e-12);
    const Observation o = observe(y, s);
    CHECK(o.y_reduced.size() == 3 * m.length());
}

TEST_CASE("joint RR-MMSE equals the brute-force conditional mean on the reduced observation")
{
    const ScenarioModel sm = build_scenario_model(reference_scenario());
    const GroupModel& m = sm.model;
    const Beamspace geb = build_geb(m, 4);
    const LinearEstimator e = rr_mmse_joint(geb, m);
    const Dense d = dense_statistics(m);
    const CMatrix red = reduction(geb.s, m.length());
    const CMatrix r_v = red * d.r_y * red.adjoint();
    const CMatrix c_hv = d.c_h_y * red.adjoint();
    const CMatrix a_full = c_hv * r_v.inverse();
    const CMatrix eff = linalg::kron(CMatrix::Identity(m.num_users() * m.memory(), m.num_users() * m.memory()),
                                     geb.s.adjoint());
    CHECK(max_abs(*e.a_full, a_full) < 1e-8);
    CHECK(max_abs(e.a_eff, eff * a_full) < 1e-8);
    // Effective/full consistency.
    CHECK(max_abs(eff * *e.a_full, e.a_eff) < 1e-10);
}

TEST_CASE("scalar Wiener: nMSE = 1/(1+snr)")
{
    for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const GroupModel m = scalar_model(snr_db);
        const Beamspace beam = custom_beamspace(CMatrix::Identity(1, 1));
        const double snr = db_to_linear(snr_db);
        for (const LinearEstimator& e : {rr_mmse_joint(beam, m), rr_mmse_angle(beam, m)}) {
            const double mse = error_cov_linear(e, m, ErrorTarget::Full)(0, 0).real();
            CHECK(std::abs(mse - 1.0 / (1.0 + snr)) < 1e-12);
        }
    }
}

TEST_CASE("angle estimator equals the joint one for a single delay")
{
    Scenario s;
    s.geom = ArrayGeometry{8, 0.5};
    s.intended = GroupSpec::uniform(0, 2, {AngularSector{-15.0, 5.0}});
    s.interferers = {Interferer{GroupSpec::uniform(1, 1, {AngularSector{30.0, 45.0}}), 1.0}};
    s.training_length = 3;
    s.snr_db = 5.0;
    const GroupModel m = build_scenario_model(s).model;
    const Beamspace beam = build_geb(m, 3);
    const LinearEstimator j = rr_mmse_joint(beam, m);
    const LinearEstimator a = rr_mmse_angle(beam, m);
    CHECK(max_abs(j.a_eff, a.a_eff) < 1e-10 * std::max(1.0, j.a_eff.cwiseAbs().maxCoeff()));
    CHECK(max_abs(*j.a_full, *a.a_full) < 1e-10 * std::max(1.0, j.a_full->cwiseAbs().maxCoeff()));
}

TEST_CASE("identity beam without interference equals the full Wiener filter")
{
    const ScenarioModel sm = build_scenario_model(reference_scenario());
    const GroupModel m = sm.interference_free();
    const LinearEstimator rr = rr_mmse_joint(custom_beamspace(CMatrix::Identity(8, 8)), m);
    const LinearEstimator fw = full_wiener(m);
    CHECK(max_abs(*rr.w_full(), *fw.w_full()) < 1e-8);
    const Dense d = dense_statistics(m);
    CHECK(max_abs(*fw.w_full(), d.c_h_y * d.r_y.inverse()) < 1e-8);

    const double with_int = mse_per_user(error_cov_linear(full_wiener(sm.model), sm.model, ErrorTarget::Full), 2);
    const double without = mse_per_user(error_cov_linear(fw, m, ErrorTarget::Full), 2);
    CHECK(without < with_int);

    CHECK_THROWS_AS(full_wiener(m, 16), ValidationError);
}

TEST_CASE("MMSE estimates are invariant under a change of beam basis")
{
    const ScenarioModel sm = build_scenario_model(reference_scenario());
    const GroupModel& m = sm.model;
    std::mt19937_64 rng(32);
    const CMatrix s = build_geb(m, 3).s;
    const CMatrix t = linalg::complex_normal(3, 3, rng);
    for (auto make : {&rr_mmse_joint, &rr_mmse_angle}) {
        const CMatrix w1 = *make(custom_beamspace(s), m).w_full();
        const CMatrix w2 = *make(custom_beamspace(s * t), m).w_full();
        CHECK(rel_fro(w2, w1) < 1e-8);
    }
}

TEST_CASE("least squares in the beamspace")
{
    // Orthogonal training columns (Walsh codes, one delay).
    Scenario s;
    s.geom = ArrayGeometry{6, 0.5};
    s.intended = GroupSpec::uniform(0, 2, {AngularSector{-10.0, 10.0}});
    s.training_length = 4;
    s.snr_db = 3.0;
    const ScenarioModel sm = build_scenario_model(s);
    CVector w0(4), w1(4);
    w0 << 1, 1, 1, 1;
    w1 << 1, -1, 1, -1;
    const PilotSet p = pilot_set_custom(s.intended, 4, sm.energy, {w0, w1});
    const GroupModel m = make_group_model(s.geom, s.intended, sm.model.covs, sm.model.noise, p);
    const CMatrix& x = m.train.complete;
    const double c = (x.adjoint() * x)(0, 0).real();
    CHECK(max_abs(x.adjoint() * x, c * CMatrix::Identity(2, 2)) < 1e-12);
    const Beamspace beam = build_geb(m, 2);
    const LinearEstimator ls = ls_angle(beam, m);
    CHECK(max_abs(ls.a_eff, linalg::kron(x.adjoint() / c, CMatrix::Identity(2, 2))) < 1e-12);

    // Noiseless, interference-free recovery of the effective channel.
    const GroupModel& o = build_scenario_model(orthogonal_mpc_scenario(20.0)).model;
    REQUIRE(linalg::numerical_rank(o.train.complete) == o.num_users() * o.memory());
    std::mt19937_64 rng(33);
    const CVector h = linalg::complex_normal(o.num_elements() * 6, 1, rng);
    const Beamspace ob = build_geb(o, 4);
    const CVector y = convolve_training(o.train, h, o.num_elements());
    const CVector est = ls_angle(ob, o).a_eff * reduce_observation(ob.s, y);
    const CVector truth = linalg::kron(CMatrix::Identity(6, 6), ob.s.adjoint()) * h;
    CHECK(max_abs(est, truth) < 1e-10 * truth.cwiseAbs().maxCoeff());
}

TEST_CASE("correlator estimators")
{
    const GroupModel& o = build_scenario_model(orthogonal_mpc_scenario(20.0)).model;
    const Beamspace fingers = per_delay_beam(o);
    const LinearEstimator r1 = correlator_rank1(fingers, o);
    const LinearEstimator g1 = correlator_general(fingers, o);
    CHECK(max_abs(r1.a_eff, g1.a_eff) < 1e-12);

    Beamspace unified = fingers;
    unified.blocks = {BeamBlock{{0, 1, 2}, {0, 1, 2}, 0}};
    CHECK(max_abs(correlator_general(unified, o).a_eff, ls_angle(unified, o).a_eff) < 1e-10);

    // One delay, one column: the correlator is LS.
    Scenario s;
    s.geom = ArrayGeometry{6, 0.5};
    s.intended = GroupSpec::uniform(0, 1, {AngularSector{-5.0, 5.0}});
    s.training_length = 5;
    const GroupModel m1 = build_scenario_model(s).model;
    const Beamspace b1 = per_delay_beam(m1);
    CHECK(max_abs(correlator_rank1(b1, m1).a_eff, ls_angle(b1, m1).a_eff) < 1e-12);

    Beamspace wrong = fingers;
    wrong.blocks = {BeamBlock{{0, 1}, {0, 1}, 0}, BeamBlock{{2}, {2}, 0}};
    CHECK_THROWS_AS(correlator_rank1(wrong, o), ValidationError);
    Beamspace overlap = fingers;
    overlap.blocks = {BeamBlock{{0, 1}, {0, 1}, 0}, BeamBlock{{1, 2}, {2}, 0}};
    CHECK_THROWS_AS(correlator_general(overlap, o), ValidationError);
    Beamspace missing = fingers;
    missing.blocks = {BeamBlock{{0, 1, 2}, {0, 1}, 0}};
    CHECK_THROWS_AS(correlator_general(missing, o), ValidationError);
}

TEST_CASE("angle-domain estimator is never better than the joint one on the default scenario")
{
    static const ScenarioModel sm = build_scenario_model(default_scenario());
    for (Index d : {4, 6, 9}) {
        for (int kind = 0; kind < 2; ++kind) {
            const Beamspace b = kind == 0 ? build_geb(sm.model, d) : build_dft(sm.model, d);
            const double j = mse_per_user(error_cov_linear(rr_mmse_joint(b, sm.model), sm.model, ErrorTarget::Full), 2);
            const double a = mse_per_user(error_cov_linear(rr_mmse_angle(b, sm.model), sm.model, ErrorTarget::Full), 2);
            CHECK(a >= j * (1.0 - 1e-10));
        }
    }
}

TEST_CASE("orthogonality principle holds empirically")
{
    const ScenarioModel sm = build_scenario_model(reference_scenario());
    const GroupModel& m = sm.model;
    const Beamspace geb = build_geb(m, 4);
    const LinearEstimator e = rr_mmse_joint(geb, m);
    std::mt19937_64 rng(34);
    const int trials = 20000;
    const Index nz = e.a_eff.rows();
    const Index nv = e.a_eff.cols();
    CMatrix sum = CMatrix::Zero(nz, nv);
    RMatrix sq = RMatrix::Zero(nz, nv);
    for (int i = 0; i < trials; ++i) {
        const CVector h = sample_group_channels(m.group, m.basis, rng).stacked;
        const CVector v = reduce_observation(geb.s, synthesize_observation(m, h, rng));
        const CVector z = linalg::kron(CMatrix::Identity(4, 4), geb.s.adjoint()) * h;
        const CMatrix o = (z - e.a_eff * v) * v.adjoint();
        sum += o;
        sq += o.cwiseAbs2();
    }
    const CMatrix mean = sum / trials;
    int outside = 0;
    for (Index i = 0; i < nz; ++i) {
        for (Index j = 0; j < nv; ++j) {
            const double se = std::sqrt(std::max(sq(i, j) / trials - std::norm(mean(i, j)), 0.0) / trials);
            outside += std::abs(mean(i, j)) > 4.0 * se + 1e-12 ? 1 : 0;
        }
    }
    CHECK(outside <= 1);
}
