// SPDX-License-Identifier: Apache-2.0
#include "rrce/reference.hpp"

#include <cmath>

#include "rrce/linalg.hpp"
#include "rrce/rng.hpp"

namespace rrce {

Scenario reference_scenario()
{
    Scenario s;
    s.geom = ArrayGeometry{8, 0.5};
    s.intended.id = 0;
    s.intended.num_users = 2;
    s.intended.memory = 2;
    s.intended.mpcs = {MpcSpec{0, 0.5, {-20.0, -10.0}, 1}, MpcSpec{1, 0.5, {15.0, 25.0}, 1}};
    s.interferers = {Interferer{GroupSpec::uniform(1, 2, {{40.0, 50.0}, {40.0, 50.0}}), 1.0}};
    s.training_length = 4;
    s.snr_db = 10.0;
    s.noise_power = 1.0;
    return s;
}

Scenario orthogonal_mpc_scenario(double snr_db)
{
    const auto point = [](double sin_theta) {
        const double deg = std::asin(sin_theta) * 180.0 / kPi;
        return AngularSector{deg, deg};
    };
    Scenario s;
    s.geom = ArrayGeometry{16, 0.5};
    s.intended = GroupSpec::uniform(0, 2, {point(0.0), point(0.25), point(-0.5)});
    s.interferers = {Interferer{GroupSpec::uniform(1, 1, {point(0.5)}), 1.0}};
    s.training_length = 10;
    s.snr_db = snr_db;
    s.noise_power = 1.0;
    return s;
}

GroupModel full_rank_instance(std::uint64_t seed, Index n, Index k, Index l, Index t)
{
    auto rng = make_stream(seed, 0xf011u);
    ArrayGeometry geom{n, 0.5};
    GroupSpec g;
    g.id = 0;
    g.num_users = k;
    g.memory = l;
    std::vector<SpatialCovariance> covs;
    for (Index i = 0; i < l; ++i) {
        // Distinct nominal sectors keep the spec valid; the covariances below
        // replace the sector model.
        g.mpcs.push_back(MpcSpec{i, 1.0 / static_cast<double>(l),
                                 {-60.0 + 10.0 * static_cast<double>(i),
                                  -55.0 + 10.0 * static_cast<double>(i)},
                                 std::nullopt});
        CMatrix r = linalg::random_hpd(n, rng, 0.5);
        r /= r.trace().real();
        covs.push_back(covariance_from_matrix(r));
    }
    CMatrix ri = linalg::random_hpd(n, rng, 0.1);
    ri /= ri.trace().real();
    const NoiseCovariance noise =
        make_noise_covariance(CMatrix::Identity(n, n) + 10.0 * ri);
    const PilotSet pilots = pilot_set(g, t, 10.0);
    return make_group_model(geom, g, covs, noise, pilots);
}

} // namespace rrce
