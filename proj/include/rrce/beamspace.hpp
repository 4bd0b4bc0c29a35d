// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rrce/common.hpp"
#include "rrce/model.hpp"

namespace rrce {

enum class BeamKind { GEB, DFT, Custom };
enum class BeamNormalization { REtaOrthonormal, EuclideanOrthonormal, Unnormalized };

/// Columns of S that serve one MPC cluster. An empty `mpcs` list means the
/// block serves the whole group (no per-MPC structure).
struct BeamBlock {
    std::vector<Index> mpcs;
    std::vector<Index> columns;
    Index extra = 0;  // columns beyond the cluster's signal rank (zero design gain)

    Index d() const { return static_cast<Index>(columns.size()); }
};

/// N x D pre-beamformer with its per-cluster column structure.
///
/// For GEB beams with R_ETA_ORTHONORMAL normalization every block satisfies
/// S_c^H R_eta S_c = I; across blocks the columns are R_eta-orthogonal only
/// when the clusters' pencils share eigenvectors.
struct Beamspace {
    CMatrix s;
    std::vector<BeamBlock> blocks;
    BeamKind kind = BeamKind::Custom;
    BeamNormalization normalization = BeamNormalization::Unnormalized;
    std::vector<std::string> warnings;

    Index dim() const { return s.cols(); }
    std::vector<Index> block_dims() const;
};

std::string to_string(BeamKind kind);
std::string to_string(BeamNormalization norm);

/// Wraps an arbitrary full-column-rank matrix as a single unified block.
Beamspace custom_beamspace(const CMatrix& s);

/// Solution of R_num v = lambda R_den v by Cholesky whitening of R_den.
/// Vectors are R_den-orthonormal, values descending and clamped at zero.
struct GeneralizedEig {
    RVector values;
    CMatrix vectors;
};

/// Throws ConditioningError when min eig(R_den) < 1e-12 max eig(R_den).
GeneralizedEig generalized_eig(const CMatrix& r_num, const CMatrix& r_den);

/// rho (S^H R_eta S)^{-1} S^H R S.
struct SnrMatrix {
    CMatrix matrix;
    std::optional<Index> delay;  // empty for the total (angle-only) matrix
};

SnrMatrix snr_matrix(const CMatrix& s, const CMatrix& r, const NoiseCovariance& noise, double rho,
                     std::optional<Index> delay = std::nullopt);

/// SNR matrix of delay l of the model (per_delay mode).
SnrMatrix snr_matrix(const Beamspace& beam, const GroupModel& model, Index l);

/// SNR matrix built from R_sum with rho = 1.
SnrMatrix snr_matrix_total(const Beamspace& beam, const GroupModel& model);

struct CriterionReport {
    RVector f_eigvals;  // kappa_i, descending
    double nmse_trace = 0.0;
    double log_error_volume_reduction = 0.0;
    double mutual_info = 0.0;
};

/// F = sum_l R_code(l) kron SNR(l) (TD x TD, time outer). `f` is F itself;
/// `f_hermitian` is its similarity transform (I kron L^H) F (I kron L^{-H}) with
/// S^H R_eta S = L L^H, which is Hermitian PSD and shares F's eigenvalues.
struct FMatrix {
    CMatrix f;
    CMatrix f_hermitian;
    CriterionReport report;
};

FMatrix build_f(const Beamspace& beam, const GroupModel& model);

/// Criteria from a set of F eigenvalues; `total_rank` is K sum_l r_l.
CriterionReport criteria_from_kappa(const RVector& kappa, Index total_rank, Index t, Index d);

struct Allocation {
    std::vector<Index> dims;  // per cluster, signal-bearing columns
    Index clamped = 0;        // requested columns beyond the total signal rank
    double total_gain = 0.0;
    bool exhaustive_checked = false;
    bool exhaustive_agrees = true;
    std::vector<std::string> warnings;
};

/// Gains of adding the n-th generalized eigenvector of each cluster:
/// sum_m beta_m mu_n / (beta_m mu_n + 1).
std::vector<std::vector<double>> cluster_gains(const GroupModel& model);

/// Greedy pooled allocation of D columns to clusters, cross-checked by
/// exhaustive enumeration when there are at most 1e4 compositions.
Allocation allocate_dimensions(const GroupModel& model, Index d);

/// Maps a per-cluster allocation to per-delay d_l (cluster columns are
/// attributed to its first delay).
std::vector<Index> per_delay_dims(const GroupModel& model, const Allocation& alloc);

enum class AllocationRule {
    OrthogonalMpcGain,  // allocate_dimensions as is
    Criterion,          // composition maximizing log det(I + F), proxy as tie-break
};

/// Per-cluster top generalized eigenvectors of (sum_{l in c} rho_l R_l, R_eta).
/// With AllocationRule::Criterion every composition of D over the clusters is
/// scored by the exact mutual information when there are at most 1e3 of them.
Beamspace build_geb(const GroupModel& model, Index d,
                    AllocationRule rule = AllocationRule::Criterion);

/// Top-D eigenvectors of the group's summed covariance (before truncation).
/// Columns are attributed to the cluster whose covariance captures most of
/// their energy.
Beamspace build_dft(const GroupModel& model, Index d);

/// Same construction from an explicit R_sum, as a single unified block.
Beamspace build_dft(const SpatialCovariance& r_sum, Index d);

/// Thin-QR Euclidean orthonormalization, keeping the block metadata.
Beamspace orthonormalize(const Beamspace& beam);

/// Beam pattern over theta in [-90, 90]: per-column gain |a^H s|^2 / (N |s|^2)
/// and the aggregate a^H P_S a / N, both in dB.
struct BeamPattern {
    std::vector<double> theta_deg;
    RMatrix column_gain_db;   // thetas x D
    RVector aggregate_db;
};

BeamPattern beam_pattern(const Beamspace& beam, const ArrayGeometry& geom, double step_deg = 0.1);

} // namespace rrce
