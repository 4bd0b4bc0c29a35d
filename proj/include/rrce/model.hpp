// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rrce/array_channel.hpp"
#include "rrce/interference.hpp"
#include "rrce/training.hpp"

namespace rrce {

/// Everything the design and estimation stages need to know about the
/// intended group: second-order channel statistics, the interference-plus-noise
/// covariance seen by it and its training.
struct GroupModel {
    ArrayGeometry geom;
    GroupSpec group;
    std::vector<SpatialCovariance> covs;  // truncated, one per delay
    GroupStatics statics;
    KltBasis basis;
    NoiseCovariance noise;
    PilotSet pilots;
    TrainingMatrices train;
    /// Delays sharing the same sector (and rank override) have the same
    /// spatial eigenspace and are handled as one cluster.
    std::vector<std::vector<Index>> clusters;

    Index num_elements() const { return geom.num_elements; }
    Index num_users() const { return group.num_users; }
    Index memory() const { return group.memory; }
    Index length() const { return train.length(); }
    double rho(Index l) const { return group.mpcs[static_cast<std::size_t>(l)].power; }
    const CMatrix& r(Index l) const { return covs[static_cast<std::size_t>(l)].matrix; }

    /// sum_l r_l.
    Index total_rank() const;
    /// Dimension of the spatial signal subspace, sum over clusters of r_c.
    Index spatial_rank() const;
};

/// Partition of the delays into clusters of MPCs with identical sector and
/// rank override, in order of first appearance.
std::vector<std::vector<Index>> mpc_clusters(const GroupSpec& group);

GroupModel make_group_model(const ArrayGeometry& geom, const GroupSpec& group,
                            const std::vector<SpatialCovariance>& covs, const NoiseCovariance& noise,
                            const PilotSet& pilots);

/// Copy of the model with the interference-plus-noise covariance replaced.
GroupModel with_noise(const GroupModel& model, const NoiseCovariance& noise);

} // namespace rrce
