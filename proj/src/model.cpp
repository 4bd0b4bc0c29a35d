// SPDX-License-Identifier: Apache-2.0
#include "rrce/model.hpp"

namespace rrce {

std::vector<std::vector<Index>> mpc_clusters(const GroupSpec& group)
{
    std::vector<std::vector<Index>> out;
    std::vector<Index> head;  // representative delay of each cluster
    for (Index l = 0; l < group.memory; ++l) {
        const MpcSpec& m = group.mpcs[static_cast<std::size_t>(l)];
        bool placed = false;
        for (std::size_t c = 0; c < head.size(); ++c) {
            const MpcSpec& h = group.mpcs[static_cast<std::size_t>(head[c])];
            if (h.sector == m.sector && h.rank_override == m.rank_override) {
                out[c].push_back(l);
                placed = true;
                break;
            }
        }
        if (!placed) {
            head.push_back(l);
            out.push_back({l});
        }
    }
    return out;
}

Index GroupModel::total_rank() const
{
    Index r = 0;
    for (const auto& c : covs) {
        r += c.rank;
    }
    return r;
}

Index GroupModel::spatial_rank() const
{
    Index r = 0;
    for (const auto& c : clusters) {
        r += covs[static_cast<std::size_t>(c.front())].rank;
    }
    return r;
}

GroupModel make_group_model(const ArrayGeometry& geom, const GroupSpec& group,
                            const std::vector<SpatialCovariance>& covs, const NoiseCovariance& noise,
                            const PilotSet& pilots)
{
    group.validate();
    if (static_cast<Index>(covs.size()) != group.memory) {
        throw ValidationError("group model: one covariance per delay required");
    }
    if (noise.dim() != geom.num_elements) {
        throw ValidationError("group model: noise covariance size differs from the array");
    }
    GroupModel m;
    m.geom = geom;
    m.group = group;
    m.covs = covs;
    m.statics = group_statics(group, covs);
    m.basis = klt_basis(group, covs);
    m.noise = noise;
    m.pilots = pilots;
    m.train = training_matrices(pilots, group);
    m.clusters = mpc_clusters(group);
    return m;
}

GroupModel with_noise(const GroupModel& model, const NoiseCovariance& noise)
{
    if (noise.dim() != model.num_elements()) {
        throw ValidationError("with_noise: noise covariance size differs from the array");
    }
    GroupModel m = model;
    m.noise = noise;
    return m;
}

} // namespace rrce
