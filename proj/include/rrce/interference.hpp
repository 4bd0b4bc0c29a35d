// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "rrce/array_channel.hpp"
#include "rrce/common.hpp"

namespace rrce {

struct Interferer {
    GroupSpec group;
    double gamma = 1.0;  // received power relative to the intended group

    friend bool operator==(const Interferer&, const Interferer&) = default;
};

struct InterferenceProfile {
    std::vector<Interferer> interferers;
    double noise_power = 1.0;  // N_0

    void validate() const;
};

/// Spatial interference-plus-noise covariance R_eta. The spatio-temporal
/// covariance I_T kron R_eta is never formed; see `spacetime_noise_apply`.
struct NoiseCovariance {
    CMatrix r_eta;
    CMatrix chol;  // lower Cholesky factor of r_eta
    bool r_xi_factored = true;

    Index dim() const { return r_eta.rows(); }
};

/// Validates positive definiteness and caches the Cholesky factor.
NoiseCovariance make_noise_covariance(const CMatrix& r_eta);

/// R_eta = E_s sum_g gamma_g K_g sum_l rho_l R_l + N_0 I, with each interferer's
/// covariances built and truncated the same way as the intended group's.
NoiseCovariance interference_covariance(const InterferenceProfile& profile, double energy,
                                        const ArrayGeometry& geom, double energy_fraction,
                                        int quad_points);

/// Same sum from already built interferer covariances (one list per interferer).
NoiseCovariance interference_covariance(const InterferenceProfile& profile, double energy,
                                        const std::vector<std::vector<SpatialCovariance>>& covs,
                                        Index num_elements);

/// (I_T kron R_eta) v for v of length N T, without forming the Kronecker product.
CVector spacetime_noise_apply(const NoiseCovariance& nc, Index length, const CVector& v);

/// One draw of xi ~ CN(0, I_T kron R_eta).
CVector sample_spacetime_noise(const NoiseCovariance& nc, Index length, std::mt19937_64& rng);

} // namespace rrce
