// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <set>

#include "rrce/linalg.hpp"
#include "rrce/training.hpp"
#include "test_util.hpp"

using namespace rrce;
using rrce::testing::max_abs;

namespace {

std::set<int> all_correlations(const std::vector<BitSequence>& set)
{
    std::set<int> v;
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = 0; b < set.size(); ++b) {
            for (std::size_t k = 0; k < set[a].size(); ++k) {
                if (a == b && k == 0) {
                    continue;
                }
                v.insert(periodic_correlation(set[a], set[b], k));
            }
        }
    }
    return v;
}

GroupSpec group(Index k, Index l)
{
    std::vector<AngularSector> s(static_cast<std::size_t>(l), AngularSector{0.0, 1.0});
    return GroupSpec::uniform(0, k, s);
}

} // namespace

TEST_CASE("m-sequence is maximal length and balanced")
{
    for (int m : {4, 6, 8, 10}) {
        const BitSequence u = m_sequence(m);
        const std::size_t p = (std::size_t{1} << m) - 1;
        REQUIRE(u.size() == p);
        std::size_t ones = 0;
        for (auto b : u) {
            ones += b;
        }
        CHECK(ones == (p + 1) / 2);
        for (std::size_t k = 1; k < p; ++k) {
            CHECK(periodic_correlation(u, u, k) == -1);
        }
    }
}

TEST_CASE("small Kasami set sizes and three-valued correlation")
{
    const auto k6 = kasami_small_set(6);
    CHECK(k6.size() == 8);
    CHECK(k6.front().size() == 63);
    CHECK(all_correlations(k6) == std::set<int>{-9, -1, 7});

    const auto k4 = kasami_small_set(4);
    CHECK(k4.size() == 4);
    CHECK(k4.front().size() == 15);
    CHECK(all_correlations(k4) == std::set<int>{-5, -1, 3});

    CHECK(k6.front() == m_sequence(6));
    CHECK_THROWS_AS(kasami_small_set(5), ValidationError);
}

TEST_CASE("pilot set: BPSK mapping, energy, cyclic precursors, last K codes")
{
    const auto codes = kasami_small_set(6);
    const PilotSet p = pilot_set(group(2, 3), 6, 1.0);
    REQUIRE(p.symbols.size() == 2);
    CHECK(p.symbols[0].size() == 8);
    CHECK(p.code_indices == std::vector<int>{6, 7});
    for (Index k = 0; k < 2; ++k) {
        const BitSequence& c = codes[static_cast<std::size_t>(6 + k)];
        for (Index n = -2; n < 6; ++n) {
            const std::size_t idx = static_cast<std::size_t>((n + 63) % 63);
            const double expect = c[idx] ? -1.0 : 1.0;
            CHECK(p.at(k, n) == cdouble(expect));
        }
    }

    const GroupSpec one = group(1, 1);
    const PilotSet q = pilot_set(one, 1, 4.0);
    CHECK(std::abs(std::abs(q.at(0, 0)) - 2.0) < 1e-15);

    const PilotSet again = pilot_set(group(2, 3), 6, 1.0);
    CHECK(max_abs(again.symbols[1], p.symbols[1]) == 0.0);

    CHECK_THROWS_AS(pilot_set(group(2, 3), 62, 1.0), ValidationError);
    CHECK_THROWS_AS(pilot_set(group(9, 1), 4, 1.0), ValidationError);
}

TEST_CASE("training matrices are Toeplitz convolution matrices")
{
    const GroupSpec g = group(1, 2);
    CVector seq(4);
    seq << 1.0, cdouble(0.0, 1.0), -1.0, cdouble(0.0, -1.0);  // x_{-1}, x_0, x_1, x_2
    const PilotSet p = pilot_set_custom(g, 3, 1.0, {seq});
    const TrainingMatrices t = training_matrices(p, g);
    CMatrix expect(3, 2);
    expect << seq(1), seq(0), seq(2), seq(1), seq(3), seq(2);
    CHECK(max_abs(t.per_user[0], expect) == 0.0);

    const GroupSpec g1 = group(1, 1);
    CVector s1(2);
    s1 << 1.0, -1.0;
    const TrainingMatrices t1 = training_matrices(pilot_set_custom(g1, 2, 1.0, {s1}), g1);
    CHECK(max_abs(t1.complete, CMatrix(s1)) == 0.0);
}

TEST_CASE("code correlation matrices")
{
    const GroupSpec g = group(2, 3);
    const TrainingMatrices t = training_matrices(pilot_set(g, 6, 1.0), g);
    CHECK(t.complete.rows() == 6);
    CHECK(t.complete.cols() == 6);
    CMatrix sum = CMatrix::Zero(6, 6);
    for (Index l = 0; l < 3; ++l) {
        const CMatrix rc = r_code(t, l);
        CHECK(linalg::hermitian_defect(rc) < 1e-14);
        CHECK(linalg::numerical_rank(rc) <= 2);
        CHECK(linalg::hermitian_eig(rc).values.minCoeff() > -1e-12);
        // Independent oracle: sum over users of the delay-l column outer products.
        CMatrix direct = CMatrix::Zero(6, 6);
        for (Index k = 0; k < 2; ++k) {
            const CVector col = t.per_user[static_cast<std::size_t>(k)].col(l);
            direct += col * col.adjoint();
        }
        CHECK(max_abs(rc, direct) < 1e-12);
        sum += rc;
    }
    CHECK(max_abs(sum, r_code_total(t)) < 1e-12);

    const GroupSpec g1 = group(1, 2);
    const TrainingMatrices t1 = training_matrices(pilot_set(g1, 5, 3.0), g1);
    CHECK(linalg::numerical_rank(r_code(t1, 1)) == 1);
    CHECK(std::abs(r_code(t1, 1).trace().real() - 15.0) < 1e-12);

    const CMatrix cols = training_columns(t, {0, 2});
    CHECK(max_abs(cols, t.complete * linalg::kron(CMatrix::Identity(2, 2),
                                                  linalg::elementary(3, 0) +
                                                      linalg::elementary(3, 2))) == 0.0);
}

TEST_CASE("pseudoinverse of the pilot matrix acts as identity on its row space")
{
    const GroupSpec g = group(2, 3);
    const TrainingMatrices t = training_matrices(pilot_set(g, 6, 1.0), g);
    const CMatrix p = linalg::pinv(t.complete);
    CHECK(max_abs(t.complete * p * t.complete, t.complete) < 1e-10);
}
