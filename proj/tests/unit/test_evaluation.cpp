// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "rrce/beamspace.hpp"
#include "rrce/estimators.hpp"
#include "rrce/evaluation.hpp"
#include "rrce/io.hpp"
#include "rrce/linalg.hpp"
#include "rrce/reference.hpp"
#include "test_util.hpp"

using namespace rrce;
using rrce::testing::max_abs;
using rrce::testing::rel_fro;

namespace {

const ScenarioModel& reference_model()
{
    static const ScenarioModel sm = build_scenario_model(reference_scenario());
    return sm;
}

CMatrix space_time(const GroupModel& m)
{
    return linalg::kron(m.train.complete, CMatrix::Identity(m.num_elements(), m.num_elements()));
}

double min_eig(const CMatrix& a)
{
    return linalg::hermitian_eig(0.5 * (a + a.adjoint())).values.minCoeff();
}

SweepSpec small_sweep()
{
    SweepSpec s;
    s.axis = SweepAxis::Dimension;
    s.grid = {2, 3, 4, 6};
    s.estimators = {"rr_mmse_joint", "rr_mmse_angle", "full_wiener_noint"};
    s.beams = {"geb", "dft"};
    return s;
}

} // namespace

TEST_CASE("observation covariances against dense construction")
{
    const GroupModel& m = reference_model().model;
    const CMatrix b = space_time(m);
    const Index t = m.length();
    const CMatrix r_y = b * m.statics.r_full * b.adjoint() +
                        linalg::kron(CMatrix::Identity(t, t), m.noise.r_eta);
    CHECK(rel_fro(observation_covariance(m), r_y) < 1e-12);

    const CMatrix s = build_geb(m, 3).s;
    const CMatrix red = linalg::kron(CMatrix::Identity(t, t), s.adjoint());
    CHECK(rel_fro(reduced_observation_covariance(m, s), red * r_y * red.adjoint()) < 1e-12);
    CHECK(rel_fro(target_cross_covariance(m, s, ErrorTarget::Full),
                  m.statics.r_full * b.adjoint() * red.adjoint()) < 1e-12);
    const Index kl = m.num_users() * m.memory();
    const CMatrix eff = linalg::kron(CMatrix::Identity(kl, kl), s.adjoint());
    CHECK(rel_fro(target_covariance(m, s, ErrorTarget::Effective),
                  eff * m.statics.r_full * eff.adjoint()) < 1e-12);
}

TEST_CASE("MMSE error covariance: three routes agree")
{
    const GroupModel& m = reference_model().model;
    const Beamspace geb = build_geb(m, 4);
    const CMatrix direct = error_cov_mmse(geb, m);

    const Index t = m.length();
    const CMatrix bred = linalg::kron(m.train.complete, geb.s.adjoint());
    const CMatrix r_v = bred * m.statics.r_full * bred.adjoint() +
                        linalg::kron(CMatrix::Identity(t, t), geb.s.adjoint() * m.noise.r_eta * geb.s);
    const CMatrix c = m.statics.r_full * bred.adjoint();
    const CMatrix oracle = m.statics.r_full - c * r_v.inverse() * c.adjoint();
    CHECK(rel_fro(direct, oracle) < 1e-9);

    const LinearEstimator e = rr_mmse_joint(geb, m);
    CHECK(rel_fro(error_cov_linear(e, m, ErrorTarget::Full), oracle) < 1e-9);
}

TEST_CASE("excess-error form for suboptimal estimators")
{
    const GroupModel& m = reference_model().model;
    const LinearEstimator fw = full_wiener(m);
    const CMatrix r_e_fw = error_cov_linear(fw, m, ErrorTarget::Full);
    const CMatrix r_y = observation_covariance(m);
    for (Index d : {2, 3, 5}) {
        const Beamspace beam = build_dft(m, d);
        for (const LinearEstimator& e : {rr_mmse_joint(beam, m), rr_mmse_angle(beam, m)}) {
            const CMatrix lhs = error_cov_linear(e, m, ErrorTarget::Full);
            const CMatrix rhs = error_cov_excess_form(*e.w_full(), *fw.w_full(), r_e_fw, r_y);
            CHECK(rel_fro(lhs, rhs) < 1e-8);
            CHECK(min_eig(lhs - r_e_fw) > -1e-9);
        }
    }
}

TEST_CASE("error covariances are ordered in the PSD sense")
{
    const GroupModel& m = reference_model().model;
    for (Index d : {2, 4, 6}) {
        for (int kind = 0; kind < 2; ++kind) {
            const Beamspace b = kind == 0 ? build_geb(m, d) : build_dft(m, d);
            const CMatrix j = error_cov_linear(rr_mmse_joint(b, m), m, ErrorTarget::Full);
            const CMatrix a = error_cov_linear(rr_mmse_angle(b, m), m, ErrorTarget::Full);
            CHECK(min_eig(a - j) > -1e-9);
            CHECK(min_eig(m.statics.r_full - j) > -1e-9);
            CHECK(mse_per_user(j, 2) == Catch::Approx(j.trace().real() / 2.0));
        }
    }
}

TEST_CASE("criterion identities on constructed full-rank instances")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const GroupModel m = full_rank_instance(seed, 6, 2, 2, 5);
        for (Index d : {1, 3, 6}) {
            std::mt19937_64 rng(seed * 10 + static_cast<std::uint64_t>(d));
            const Beamspace random_beam = custom_beamspace(linalg::complex_normal(6, d, rng));
            for (const Beamspace& b : {build_geb(m, d), random_beam}) {
                const IdentityReport rep = identity_checks(b, m, 1e-8);
                CHECK(rep.checks.size() == 3);
                for (const auto& c : rep.checks) {
                    INFO(c.name << " seed " << seed << " d " << d << " rel " << c.rel_error);
                    CHECK(c.pass);
                }
            }
        }
    }
}

TEST_CASE("Monte Carlo MSE agrees with the analytic value")
{
    const GroupModel& m = reference_model().model;
    const Beamspace geb = build_geb(m, 3);
    const LinearEstimator j = rr_mmse_joint(geb, m);
    const LinearEstimator a = rr_mmse_angle(geb, m);
    const LinearEstimator ls = ls_angle(geb, m);
    McOptions opts;
    opts.trials = 4000;
    opts.seed = 77;
    const auto mc = monte_carlo_mse({&j, &a, &ls}, {ErrorTarget::Full, ErrorTarget::Full, ErrorTarget::Effective},
                                    m, opts);
    const std::vector<double> analytic = {
        mse_per_user(error_cov_linear(j, m, ErrorTarget::Full), 2),
        mse_per_user(error_cov_linear(a, m, ErrorTarget::Full), 2),
        mse_per_user(error_cov_linear(ls, m, ErrorTarget::Effective), 2),
    };
    REQUIRE(mc.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        INFO("estimator " << i << " mc " << mc[i].mean << " +- " << mc[i].std_error << " analytic " << analytic[i]);
        CHECK(mc[i].trials == 4000);
        CHECK(std::abs(mc[i].mean - analytic[i]) <= 3.0 * mc[i].std_error);
    }

    const McResult single = monte_carlo_mse(j, m, ErrorTarget::Full, opts);
    CHECK(single.mean == mc[0].mean);
}

TEST_CASE("Monte Carlo is reproducible and thread-count independent")
{
    const GroupModel& m = reference_model().model;
    const LinearEstimator j = rr_mmse_joint(build_geb(m, 3), m);
    McOptions opts;
    opts.trials = 600;
    opts.seed = 5;
    const McResult one = monte_carlo_mse(j, m, ErrorTarget::Full, opts);
    opts.threads = 3;
    const McResult three = monte_carlo_mse(j, m, ErrorTarget::Full, opts);
    CHECK(one.mean == three.mean);
    CHECK(one.std_error == three.std_error);
    opts.seed = 6;
    CHECK(monte_carlo_mse(j, m, ErrorTarget::Full, opts).mean != one.mean);
}

TEST_CASE("sweep ordering, normalization and determinism")
{
    const Scenario sc = reference_scenario();
    SweepSpec spec = small_sweep();
    const SweepResult raw = run_sweep(sc, spec, 1);
    CHECK(raw.failures.empty());
    // full_wiener_noint has no beam: one row per grid point.
    REQUIRE(raw.points.size() == 4 * (2 * 2 + 1));
    CHECK(raw.points[0].axis_value == 2.0);
    CHECK(raw.points[0].estimator == "rr_mmse_joint");
    CHECK(raw.points[0].beam == "geb");
    CHECK(raw.points[1].beam == "dft");
    CHECK(raw.points[4].estimator == "full_wiener_noint");
    CHECK(raw.points[4].beam == "none");

    const ScenarioModel sm = build_scenario_model(sc);
    const Beamspace b3 = build_geb(sm.model, 3);
    const double expect = mse_per_user(error_cov_linear(rr_mmse_joint(b3, sm.model), sm.model,
                                                         ErrorTarget::Full), 2);
    CHECK(raw.points[5].axis_value == 3.0);
    CHECK(raw.points[5].mse_analytic == Catch::Approx(expect).epsilon(1e-12));

    spec.normalize_by = "full_wiener_noint";
    const SweepResult norm = run_sweep(sc, spec, 1);
    REQUIRE(norm.points.size() == raw.points.size());
    for (std::size_t i = 0; i < raw.points.size(); ++i) {
        const std::size_t base = (i / 5) * 5 + 4;
        CHECK(norm.points[i].mse_analytic ==
              Catch::Approx(raw.points[i].mse_analytic / raw.points[base].mse_analytic).epsilon(1e-14));
    }

    spec.normalize_by.reset();
    spec.mc_trials = 200;
    const std::string a = io::sweep_csv(run_sweep(sc, spec, 1));
    const std::string b = io::sweep_csv(run_sweep(sc, spec, 3));
    CHECK(a == b);
}

TEST_CASE("sweep validation")
{
    SweepSpec s = small_sweep();
    s.estimators = {"nope"};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_sweep();
    s.beams = {"geb", "random"};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_sweep();
    s.grid.clear();
    CHECK_THROWS_AS(s.validate(), ConfigError);
    // Per-point problems are collected, not thrown.
    s = small_sweep();
    s.estimators = {"ls_angle"};
    s.beams = {"geb"};
    const SweepResult ls_full = run_sweep(reference_scenario(), s, 1);
    CHECK(ls_full.points.empty());
    REQUIRE(ls_full.failures.size() == 4);
    CHECK(ls_full.failures[0].find("ls_angle/geb") != std::string::npos);
    s = small_sweep();
    s.normalize_by = "rr_mmse_joint:nope";
    CHECK_THROWS_AS(run_sweep(reference_scenario(), s, 1), ConfigError);
    s.normalize_by = "correlator_rank1:geb";
    const SweepResult missing = run_sweep(reference_scenario(), s, 1);
    CHECK(missing.points.empty());
    CHECK(!missing.failures.empty());
    CHECK(parse_axis("snr_db") == SweepAxis::SnrDb);
    CHECK_THROWS_AS(parse_axis("bandwidth"), ConfigError);
}
