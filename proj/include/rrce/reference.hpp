// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "rrce/evaluation.hpp"
#include "rrce/model.hpp"

/// Small, fully specified instances used for validation runs.
namespace rrce {

/// N = 8 array, intended group K = 2, L = 2 with one rank-1 MPC per delay,
/// one interfering group, T = 4.
Scenario reference_scenario();

/// Grid-aligned point-source MPCs on an N = 16 array (sin(theta) in
/// {0, 0.25, -0.5}), so the steering vectors are exactly orthogonal; one
/// interferer at sin(theta) = 0.5. K = 2, L = 3, T = 10 (full column rank training).
Scenario orthogonal_mpc_scenario(double snr_db);

/// Random well-conditioned full-rank covariances (trace one) for every delay,
/// interference-plus-noise I + 10 R_i with R_i random, Kasami pilots at
/// E_s = 10. Deterministic in `seed`.
GroupModel full_rank_instance(std::uint64_t seed, Index n, Index k, Index l, Index t);

} // namespace rrce
