// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrce/array_channel.hpp"
#include "rrce/common.hpp"

namespace rrce {

/// Binary sequence with entries in {0, 1}.
using BitSequence = std::vector<std::uint8_t>;

/// Small Kasami set for an even LFSR degree m: the m-sequence u followed by
/// u xor (cyclic shift k of the decimated sequence), k = 0, 1, ...
/// The set has 2^(m/2) members of length 2^m - 1. Supported degrees: 4, 6, 8, 10.
std::vector<BitSequence> kasami_small_set(int degree);

/// Maximal-length sequence of the built-in primitive polynomial of `degree`.
BitSequence m_sequence(int degree);

/// Periodic cross-correlation of the +/-1 images of two equal-length bit
/// sequences at cyclic lag `shift`.
int periodic_correlation(const BitSequence& a, const BitSequence& b, std::size_t shift);

enum class PilotSource { KasamiTruncated, Custom };

/// Training symbols of one group. `symbols[k]` holds user k's sequence for
/// n = -(L-1) .. T-1, so symbol x_n is stored at index n + L - 1.
struct PilotSet {
    std::vector<CVector> symbols;
    Index length = 0;  // T
    Index memory = 1;  // L
    double energy = 1.0;
    PilotSource source = PilotSource::KasamiTruncated;
    std::vector<int> code_indices;  // which Kasami members were used

    cdouble at(Index user, Index n) const
    {
        return symbols[static_cast<std::size_t>(user)](n + memory - 1);
    }
};

/// Pilots from the last K Kasami sequences of the degree-6 set (BPSK,
/// 0 -> +1, 1 -> -1, scaled by sqrt(E_s)); precursors wrap around cyclically.
PilotSet pilot_set(const GroupSpec& group, Index length, double energy);

/// Pilots from caller-supplied unit-modulus sequences (each of length T + L - 1,
/// starting at n = -(L-1)), scaled by sqrt(E_s).
PilotSet pilot_set_custom(const GroupSpec& group, Index length, double energy,
                          const std::vector<CVector>& unit_sequences);

/// The same pilots with every symbol rescaled to a new energy.
PilotSet rescale_pilots(const PilotSet& pilots, double energy);

struct TrainingMatrices {
    std::vector<CMatrix> per_user;  // T x L Toeplitz, X_k(n, l) = x_{n-l}
    CMatrix complete;               // T x K L, [X_1 ... X_K]
    Index num_users = 0;
    Index memory = 0;

    Index length() const { return complete.rows(); }
};

TrainingMatrices training_matrices(const PilotSet& pilots, const GroupSpec& group);

/// X (I_K kron E_l) X^H.
CMatrix r_code(const TrainingMatrices& train, Index l);

/// X X^H, the sum of r_code over all delays.
CMatrix r_code_total(const TrainingMatrices& train);

/// X (I_K kron sum_{l in delays} E_l): the columns of X belonging to the given delays
/// (others zeroed).
CMatrix training_columns(const TrainingMatrices& train, const std::vector<Index>& delays);

} // namespace rrce
