// SPDX-License-Identifier: Apache-2.0
#include "rrce/interference.hpp"

#include <cmath>

#include "rrce/linalg.hpp"

namespace rrce {

void InterferenceProfile::validate() const
{
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw ValidationError("interference: noise_power must be > 0");
    }
    for (const Interferer& i : interferers) {
        if (!(i.gamma >= 0.0) || !std::isfinite(i.gamma)) {
            throw ValidationError("interference: gamma must be >= 0");
        }
        i.group.validate();
    }
}

NoiseCovariance make_noise_covariance(const CMatrix& r_eta)
{
    if (r_eta.rows() != r_eta.cols() || r_eta.rows() == 0) {
        throw ValidationError("noise covariance must be square and non-empty");
    }
    NoiseCovariance nc;
    nc.r_eta = linalg::hermitian_part(r_eta);
    Eigen::LLT<CMatrix> llt(nc.r_eta);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("noise covariance is not positive definite");
    }
    nc.chol = llt.matrixL();
    return nc;
}

NoiseCovariance interference_covariance(const InterferenceProfile& profile, double energy,
                                        const std::vector<std::vector<SpatialCovariance>>& covs,
                                        Index num_elements)
{
    profile.validate();
    if (covs.size() != profile.interferers.size()) {
        throw ValidationError("interference_covariance: one covariance list per interferer");
    }
    CMatrix r = profile.noise_power * CMatrix::Identity(num_elements, num_elements);
    for (std::size_t g = 0; g < covs.size(); ++g) {
        const Interferer& in = profile.interferers[g];
        const double w = energy * in.gamma * static_cast<double>(in.group.num_users);
        for (std::size_t l = 0; l < covs[g].size(); ++l) {
            if (covs[g][l].dim() != num_elements) {
                throw ValidationError("interference_covariance: covariance size mismatch");
            }
            r += w * in.group.mpcs[l].power * covs[g][l].matrix;
        }
    }
    return make_noise_covariance(r);
}

NoiseCovariance interference_covariance(const InterferenceProfile& profile, double energy,
                                        const ArrayGeometry& geom, double energy_fraction,
                                        int quad_points)
{
    std::vector<std::vector<SpatialCovariance>> covs;
    for (const Interferer& in : profile.interferers) {
        covs.push_back(group_covariances(geom, in.group, energy_fraction, quad_points));
    }
    return interference_covariance(profile, energy, covs, geom.num_elements);
}

CVector spacetime_noise_apply(const NoiseCovariance& nc, Index length, const CVector& v)
{
    const Index n = nc.dim();
    if (v.size() != n * length) {
        throw ValidationError("spacetime_noise_apply: vector length must be N T");
    }
    const Eigen::Map<const CMatrix> block(v.data(), n, length);
    CVector out(v.size());
    Eigen::Map<CMatrix>(out.data(), n, length) = nc.r_eta * block;
    return out;
}

CVector sample_spacetime_noise(const NoiseCovariance& nc, Index length, std::mt19937_64& rng)
{
    const CMatrix z = linalg::complex_normal(nc.dim(), length, rng);
    const CMatrix xi = nc.chol * z;
    return Eigen::Map<const CVector>(xi.data(), xi.size());
}

} // namespace rrce
