// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rrce/beamspace.hpp"
#include "rrce/common.hpp"
#include "rrce/model.hpp"

namespace rrce {

enum class EstimatorKind { RrMmseJoint, RrMmseAngle, LsAngle, CorrRank1, CorrGeneral, FullWiener };

std::string to_string(EstimatorKind kind);

/// Explicit linear channel estimator.
///
/// The estimator acts on the pre-beamformed observation y_red = (I_T kron S^H) y.
/// `a_eff` maps y_red to the effective channel (I_KL kron S^H) h and `a_full`,
/// when available, maps y_red to the full channel h. The maps on the
/// unreduced observation are materialized on demand by `w_eff` / `w_full`.
struct LinearEstimator {
    EstimatorKind kind = EstimatorKind::RrMmseJoint;
    CMatrix s;  // N x D beam (identity for the full-dimensional estimator)
    CMatrix a_eff;
    std::optional<CMatrix> a_full;
    std::vector<std::string> warnings;

    Index beam_dim() const { return s.cols(); }
    CMatrix w_eff() const;
    std::optional<CMatrix> w_full() const;
};

/// y (length N T, time-major blocks of N) and its reduction (length D T).
struct Observation {
    CVector y;
    CVector y_reduced;
};

/// (I_T kron S^H) y without forming the Kronecker product.
CVector reduce_observation(const CMatrix& s, const CVector& y);

Observation observe(const CVector& y, const CMatrix& s);

/// sum_k sum_l x^{(k)}_{t-l} h_{k,l} for t = 0..T-1, evaluated as a direct
/// time-domain convolution.
CVector convolve_training(const TrainingMatrices& train, const CVector& h, Index num_elements);

/// y = (X kron I_N) h + xi with xi ~ CN(0, I_T kron R_eta) (statistical interference).
CVector synthesize_observation(const GroupModel& model, const CVector& h, std::mt19937_64& rng);

/// Interfering group transmitting i.i.d. BPSK symbols through sampled channels.
struct ExplicitInterferer {
    GroupSpec group;
    KltBasis basis;
    double amplitude = 1.0;  // sqrt(gamma E_s)
};

/// y with explicit interferer symbol streams plus white noise of power N_0.
CVector synthesize_observation_explicit(const GroupModel& model, const CVector& h,
                                        const std::vector<ExplicitInterferer>& interferers,
                                        double noise_power, std::mt19937_64& rng);

LinearEstimator rr_mmse_joint(const Beamspace& beam, const GroupModel& model);

LinearEstimator rr_mmse_angle(const Beamspace& beam, const GroupModel& model);

LinearEstimator ls_angle(const Beamspace& beam, const GroupModel& model);

/// Requires one column per MPC (D = L, every block a single delay with d = 1).
LinearEstimator correlator_rank1(const Beamspace& beam, const GroupModel& model);

/// Per-cluster pseudoinverse correlator. The beam's blocks supply the delay
/// clusters and their column sets; both must partition their index ranges.
LinearEstimator correlator_general(const Beamspace& beam, const GroupModel& model);

/// Full-dimensional LMMSE on the unreduced observation (S = I_N). Refuses
/// problems with N T above `max_nt`.
LinearEstimator full_wiener(const GroupModel& model, Index max_nt = 4096);

} // namespace rrce
