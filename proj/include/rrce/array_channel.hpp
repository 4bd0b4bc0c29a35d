// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rrce/common.hpp"

/// Array geometry, per-MPC spatial covariances, the spatio-temporal
/// Karhunen-Loeve basis and random channel draws.
namespace rrce {

/// Uniform linear array along the y axis (azimuth-only model).
struct ArrayGeometry {
    Index num_elements = 100;
    double element_spacing = 0.5;  // in carrier wavelengths

    void validate() const;

    friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

/// Azimuth interval in degrees, lo < hi, both strictly inside (-90, 90).
struct AngularSector {
    double lo_deg = 0.0;
    double hi_deg = 0.0;

    double center_deg() const { return 0.5 * (lo_deg + hi_deg); }
    double width_deg() const { return hi_deg - lo_deg; }
    void validate() const;

    friend bool operator==(const AngularSector&, const AngularSector&) = default;
};

struct MpcSpec {
    Index delay = 0;
    double power = 1.0;  // pdp weight rho_l
    AngularSector sector;
    std::optional<Index> rank_override;  // forces r_{g,l}

    friend bool operator==(const MpcSpec&, const MpcSpec&) = default;
};

struct GroupSpec {
    int id = 0;
    Index num_users = 1;
    Index memory = 1;
    std::vector<MpcSpec> mpcs;

    /// Delays must be exactly 0..memory-1 in order and the pdp must sum to one.
    void validate() const;

    /// Convenience: `memory` MPCs with uniform pdp, one sector per delay.
    static GroupSpec uniform(int id, Index num_users, const std::vector<AngularSector>& sectors);

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Hermitian PSD spatial covariance together with its dominant eigenspace.
///
/// `matrix` is the model covariance U diag(eigvals) U^H used everywhere
/// downstream (channels are drawn from exactly this matrix). `unreduced`
/// keeps the covariance before eigenspace truncation.
struct SpatialCovariance {
    CMatrix matrix;
    CMatrix eigvecs;  // N x r
    RVector eigvals;  // r values, descending, all > 0
    Index rank = 0;
    bool trace_normalized = false;
    bool degenerate = false;  // zero-width sector collapsed to a point source
    CMatrix unreduced;

    Index dim() const { return matrix.rows(); }
};

/// Channel draw for one group. `per_user_mpcs[k][l]` is h_l for user k.
struct ChannelRealization {
    std::vector<std::vector<CVector>> per_user_mpcs;
    CVector stacked;      // h: users outer, delays, antennas innermost
    CVector klt_coeffs;   // c: users outer, delays, eigen-index innermost
};

struct KltBasis {
    CMatrix v;          // N L x sum_l r_l, block diagonal
    CMatrix upsilon_u;  // I_K kron V
    std::vector<Index> ranks;
};

/// ULA response exp(j 2 pi d n sin(theta)), n = 0..N-1.
/// Throws DomainError for theta outside (-90, 90).
CVector steering_vector(const ArrayGeometry& geom, double theta_deg);

/// Same phase law without the open-interval check (beam-pattern plotting
/// evaluates the closed interval [-90, 90]).
CVector array_response(const ArrayGeometry& geom, double theta_deg);

/// Uniform power-azimuth spectrum over the sector, Gauss-Legendre quadrature,
/// trace normalized. Returns a full-rank eigen description (rank = number of
/// positive eigenvalues); call `truncate_eigenspace` to reduce it.
SpatialCovariance sector_covariance(const ArrayGeometry& geom, const AngularSector& sector,
                                    int quad_points);

/// Eigen description of an arbitrary Hermitian PSD matrix (all positive
/// eigenvalues retained). `trace_normalized` is set when the trace is 1.
SpatialCovariance covariance_from_matrix(const CMatrix& m);

/// Default quadrature size for an N-element array.
int default_quad_points(Index num_elements);

/// Keeps the smallest r with sum_{i<=r} lambda_i >= fraction * trace and
/// renormalizes the retained eigenvalues so the model covariance has unit
/// trace again. A rank override (if any) replaces the energy rule.
SpatialCovariance truncate_eigenspace(const SpatialCovariance& cov, double energy_fraction,
                                      std::optional<Index> rank_override = std::nullopt);

/// Builds and truncates the covariance of every MPC of a group.
std::vector<SpatialCovariance> group_covariances(const ArrayGeometry& geom, const GroupSpec& group,
                                                 double energy_fraction, int quad_points);

KltBasis klt_basis(const GroupSpec& group, const std::vector<SpatialCovariance>& covs);

ChannelRealization sample_group_channels(const GroupSpec& group, const KltBasis& basis,
                                         std::uint64_t seed, std::uint64_t trial = 0);

/// Same as above but drawing from a caller-owned generator.
ChannelRealization sample_group_channels(const GroupSpec& group, const KltBasis& basis,
                                         std::mt19937_64& rng);

struct GroupStatics {
    SpatialCovariance r_sum;  // sum_l rho_l R_l, full eigen description
    CMatrix r_full;  // sum_l (I_K kron E_l) kron rho_l R_l
};

GroupStatics group_statics(const GroupSpec& group, const std::vector<SpatialCovariance>& covs);

} // namespace rrce
