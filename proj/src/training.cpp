// SPDX-License-Identifier: Apache-2.0
#include "rrce/training.hpp"

#include <cmath>
#include <string>

#include "rrce/linalg.hpp"

namespace rrce {

namespace {

// Feedback taps (exponents below the leading term) of the primitive polynomials.
std::vector<int> feedback_taps(int degree)
{
    switch (degree) {
    case 4: return {1, 0};          // x^4 + x + 1
    case 6: return {1, 0};          // x^6 + x + 1
    case 8: return {4, 3, 2, 0};    // x^8 + x^4 + x^3 + x^2 + 1
    case 10: return {3, 0};         // x^10 + x^3 + 1
    default:
        throw ValidationError("kasami: unsupported degree " + std::to_string(degree) +
                              " (supported: 4, 6, 8, 10)");
    }
}

constexpr int kKasamiDegree = 6;

} // namespace

BitSequence m_sequence(int degree)
{
    const std::vector<int> taps = feedback_taps(degree);
    const std::size_t period = (std::size_t{1} << degree) - 1;
    BitSequence u(period + static_cast<std::size_t>(degree), 0);
    // Initial state 0...01.
    u[static_cast<std::size_t>(degree) - 1] = 1;
    for (std::size_t n = 0; n + static_cast<std::size_t>(degree) < u.size(); ++n) {
        std::uint8_t acc = 0;
        for (int t : taps) {
            acc ^= u[n + static_cast<std::size_t>(t)];
        }
        u[n + static_cast<std::size_t>(degree)] = acc;
    }
    u.resize(period);
    return u;
}

std::vector<BitSequence> kasami_small_set(int degree)
{
    if (degree % 2 != 0) {
        throw ValidationError("kasami: the small set requires an even degree");
    }
    const BitSequence u = m_sequence(degree);
    const std::size_t period = u.size();
    const std::size_t q = (std::size_t{1} << (degree / 2)) + 1;
    const std::size_t short_period = (std::size_t{1} << (degree / 2)) - 1;

    // With u in its 0...01 phase, u[q n] lies in the subfield and is all zero;
    // start the decimation at the first offset that yields a nonzero sequence.
    BitSequence w(period, 0);
    for (std::size_t j = 0; j < period; ++j) {
        bool nonzero = false;
        for (std::size_t n = 0; n < period; ++n) {
            w[n] = u[(q * n + j) % period];
            nonzero = nonzero || w[n] != 0;
        }
        if (nonzero) {
            break;
        }
    }

    std::vector<BitSequence> set;
    set.push_back(u);
    for (std::size_t k = 0; k < short_period; ++k) {
        BitSequence s(period);
        for (std::size_t n = 0; n < period; ++n) {
            s[n] = u[n] ^ w[(n + k) % period];
        }
        set.push_back(std::move(s));
    }
    return set;
}

int periodic_correlation(const BitSequence& a, const BitSequence& b, std::size_t shift)
{
    if (a.size() != b.size()) {
        throw ValidationError("periodic_correlation: length mismatch");
    }
    int acc = 0;
    const std::size_t p = a.size();
    for (std::size_t n = 0; n < p; ++n) {
        acc += (a[n] ^ b[(n + shift) % p]) ? -1 : 1;
    }
    return acc;
}

PilotSet pilot_set(const GroupSpec& group, Index length, double energy)
{
    if (length < 1) {
        throw ValidationError("pilot_set: training length must be >= 1");
    }
    if (!(energy > 0.0)) {
        throw ValidationError("pilot_set: symbol energy must be > 0");
    }
    const std::vector<BitSequence> codes = kasami_small_set(kKasamiDegree);
    const Index code_len = static_cast<Index>(codes.front().size());
    if (length + group.memory - 1 > code_len) {
        throw ValidationError("pilot_set: T + L - 1 exceeds the Kasami code length " +
                              std::to_string(code_len));
    }
    if (group.num_users > static_cast<Index>(codes.size())) {
        throw ValidationError("pilot_set: more users than Kasami sequences");
    }

    PilotSet p;
    p.length = length;
    p.memory = group.memory;
    p.energy = energy;
    p.source = PilotSource::KasamiTruncated;
    const double amp = std::sqrt(energy);
    const Index first = static_cast<Index>(codes.size()) - group.num_users;
    for (Index k = 0; k < group.num_users; ++k) {
        const BitSequence& code = codes[static_cast<std::size_t>(first + k)];
        p.code_indices.push_back(static_cast<int>(first + k));
        CVector s(length + group.memory - 1);
        for (Index n = -(group.memory - 1); n < length; ++n) {
            const Index idx = ((n % code_len) + code_len) % code_len;
            s(n + group.memory - 1) = code[static_cast<std::size_t>(idx)] ? -amp : amp;
        }
        p.symbols.push_back(std::move(s));
    }
    return p;
}

PilotSet pilot_set_custom(const GroupSpec& group, Index length, double energy,
                          const std::vector<CVector>& unit_sequences)
{
    if (length < 1 || !(energy > 0.0)) {
        throw ValidationError("pilot_set_custom: need T >= 1 and E_s > 0");
    }
    if (static_cast<Index>(unit_sequences.size()) != group.num_users) {
        throw ValidationError("pilot_set_custom: need one sequence per user");
    }
    PilotSet p;
    p.length = length;
    p.memory = group.memory;
    p.energy = energy;
    p.source = PilotSource::Custom;
    for (const CVector& s : unit_sequences) {
        if (s.size() != length + group.memory - 1) {
            throw ValidationError("pilot_set_custom: each sequence needs T + L - 1 symbols");
        }
        for (Index i = 0; i < s.size(); ++i) {
            if (std::abs(std::abs(s(i)) - 1.0) > 1e-9) {
                throw ValidationError("pilot_set_custom: symbols must have unit modulus");
            }
        }
        p.symbols.push_back(std::sqrt(energy) * s);
    }
    return p;
}

PilotSet rescale_pilots(const PilotSet& pilots, double energy)
{
    if (!(energy > 0.0)) {
        throw ValidationError("rescale_pilots: symbol energy must be > 0");
    }
    PilotSet out = pilots;
    const double f = std::sqrt(energy / pilots.energy);
    for (CVector& s : out.symbols) {
        s *= f;
    }
    out.energy = energy;
    return out;
}

TrainingMatrices training_matrices(const PilotSet& pilots, const GroupSpec& group)
{
    if (pilots.memory != group.memory ||
        static_cast<Index>(pilots.symbols.size()) != group.num_users) {
        throw ValidationError("training_matrices: pilots do not match the group");
    }
    const Index t = pilots.length;
    const Index l_g = group.memory;
    TrainingMatrices tm;
    tm.num_users = group.num_users;
    tm.memory = l_g;
    tm.complete.resize(t, group.num_users * l_g);
    for (Index k = 0; k < group.num_users; ++k) {
        if (pilots.symbols[static_cast<std::size_t>(k)].size() != t + l_g - 1) {
            throw ValidationError("training_matrices: pilot length must be T + L - 1");
        }
        CMatrix x(t, l_g);
        for (Index n = 0; n < t; ++n) {
            for (Index l = 0; l < l_g; ++l) {
                x(n, l) = pilots.at(k, n - l);
            }
        }
        tm.complete.middleCols(k * l_g, l_g) = x;
        tm.per_user.push_back(std::move(x));
    }
    return tm;
}

CMatrix training_columns(const TrainingMatrices& train, const std::vector<Index>& delays)
{
    CMatrix out = CMatrix::Zero(train.complete.rows(), train.complete.cols());
    for (Index l : delays) {
        if (l < 0 || l >= train.memory) {
            throw ValidationError("training_columns: delay out of range");
        }
        for (Index k = 0; k < train.num_users; ++k) {
            out.col(k * train.memory + l) = train.complete.col(k * train.memory + l);
        }
    }
    return out;
}

CMatrix r_code(const TrainingMatrices& train, Index l)
{
    const CMatrix xl = training_columns(train, {l});
    return linalg::hermitian_part(xl * xl.adjoint());
}

CMatrix r_code_total(const TrainingMatrices& train)
{
    return linalg::hermitian_part(train.complete * train.complete.adjoint());
}

} // namespace rrce
