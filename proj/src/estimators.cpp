// SPDX-License-Identifier: Apache-2.0
#include "rrce/estimators.hpp"

#include <algorithm>
#include <set>

#include "rrce/linalg.hpp"

namespace rrce {

std::string to_string(EstimatorKind kind)
{
    switch (kind) {
    case EstimatorKind::RrMmseJoint: return "rr_mmse_joint";
    case EstimatorKind::RrMmseAngle: return "rr_mmse_angle";
    case EstimatorKind::LsAngle: return "ls_angle";
    case EstimatorKind::CorrRank1: return "correlator_rank1";
    case EstimatorKind::CorrGeneral: return "correlator_general";
    case EstimatorKind::FullWiener: return "full_wiener";
    }
    return "unknown";
}

CMatrix LinearEstimator::w_eff() const
{
    const Index n = s.rows();
    const Index d = s.cols();
    const Index t = a_eff.cols() / d;
    CMatrix w(a_eff.rows(), n * t);
    for (Index i = 0; i < t; ++i) {
        w.middleCols(i * n, n) = a_eff.middleCols(i * d, d) * s.adjoint();
    }
    return w;
}

std::optional<CMatrix> LinearEstimator::w_full() const
{
    if (!a_full) {
        return std::nullopt;
    }
    const Index n = s.rows();
    const Index d = s.cols();
    const Index t = a_full->cols() / d;
    CMatrix w(a_full->rows(), n * t);
    for (Index i = 0; i < t; ++i) {
        w.middleCols(i * n, n) = a_full->middleCols(i * d, d) * s.adjoint();
    }
    return w;
}

CVector reduce_observation(const CMatrix& s, const CVector& y)
{
    const Index n = s.rows();
    if (y.size() % n != 0) {
        throw ValidationError("reduce_observation: observation length is not a multiple of N");
    }
    const Index t = y.size() / n;
    const Eigen::Map<const CMatrix> blocks(y.data(), n, t);
    const CMatrix red = s.adjoint() * blocks;
    return Eigen::Map<const CVector>(red.data(), red.size());
}

Observation observe(const CVector& y, const CMatrix& s)
{
    return Observation{y, reduce_observation(s, y)};
}

CVector convolve_training(const TrainingMatrices& train, const CVector& h, Index num_elements)
{
    const Index t_len = train.length();
    const Index l_g = train.memory;
    if (h.size() != num_elements * train.num_users * l_g) {
        throw ValidationError("convolve_training: channel length must be N K L");
    }
    CVector y = CVector::Zero(num_elements * t_len);
    for (Index t = 0; t < t_len; ++t) {
        for (Index k = 0; k < train.num_users; ++k) {
            const CMatrix& x = train.per_user[static_cast<std::size_t>(k)];
            for (Index l = 0; l < l_g; ++l) {
                y.segment(t * num_elements, num_elements) +=
                    x(t, l) * h.segment((k * l_g + l) * num_elements, num_elements);
            }
        }
    }
    return y;
}

CVector synthesize_observation(const GroupModel& model, const CVector& h, std::mt19937_64& rng)
{
    CVector y = convolve_training(model.train, h, model.num_elements());
    y += sample_spacetime_noise(model.noise, model.length(), rng);
    return y;
}

CVector synthesize_observation_explicit(const GroupModel& model, const CVector& h,
                                        const std::vector<ExplicitInterferer>& interferers,
                                        double noise_power, std::mt19937_64& rng)
{
    const Index n = model.num_elements();
    const Index t_len = model.length();
    CVector y = convolve_training(model.train, h, n);
    std::bernoulli_distribution coin(0.5);
    for (const ExplicitInterferer& in : interferers) {
        const CVector c = linalg::complex_normal(in.basis.upsilon_u.cols(), 1, rng).col(0);
        const CVector hi = in.basis.upsilon_u * c;
        const Index l_i = in.group.memory;
        for (Index k = 0; k < in.group.num_users; ++k) {
            // symbols for n = -(L-1) .. T-1
            std::vector<double> sym(static_cast<std::size_t>(t_len + l_i - 1));
            for (double& v : sym) {
                v = coin(rng) ? -in.amplitude : in.amplitude;
            }
            for (Index t = 0; t < t_len; ++t) {
                for (Index l = 0; l < l_i; ++l) {
                    y.segment(t * n, n) += sym[static_cast<std::size_t>(t - l + l_i - 1)] *
                                           hi.segment((k * l_i + l) * n, n);
                }
            }
        }
    }
    y += std::sqrt(noise_power) * linalg::complex_normal(n * t_len, 1, rng).col(0);
    return y;
}

namespace {

Eigen::LLT<CMatrix> factor_q(const CMatrix& q)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(q), Eigen::EigenvaluesOnly);
    const RVector& ev = es.eigenvalues();
    if (es.info() != Eigen::Success || !(ev(ev.size() - 1) > 0.0) ||
        ev(0) < 1e-12 * ev(ev.size() - 1)) {
        throw ConditioningError("S^H R_eta S is singular");
    }
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(q));
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("S^H R_eta S is not positive definite");
    }
    return llt;
}

// Solves M^H Z = G for the TD x TD inner matrix and returns Z^H = G^H M^{-1}.
CMatrix right_divide(const CMatrix& g, const CMatrix& m)
{
    Eigen::PartialPivLU<CMatrix> lu(m.adjoint());
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        throw ConditioningError("inner TD x TD matrix is numerically singular");
    }
    return lu.solve(g).adjoint();
}

void check_beam(const CMatrix& s, const GroupModel& model)
{
    if (s.rows() != model.num_elements() || s.cols() < 1) {
        throw ValidationError("estimator: beam must be N x D with D >= 1");
    }
}

} // namespace

LinearEstimator rr_mmse_joint(const Beamspace& beam, const GroupModel& model)
{
    const CMatrix& s = beam.s;
    check_beam(s, model);
    const Index d = s.cols();
    const Index t = model.length();
    const Index kl = model.num_users() * model.memory();
    const Index n = model.num_elements();
    const auto llt = factor_q(s.adjoint() * model.noise.r_eta * s);

    CMatrix g = CMatrix::Zero(t * d, kl * d);
    CMatrix g_full = CMatrix::Zero(t * d, kl * n);
    CMatrix m = CMatrix::Identity(t * d, t * d);
    for (Index l = 0; l < model.memory(); ++l) {
        const CMatrix snr = llt.solve((model.rho(l) * (s.adjoint() * model.r(l) * s)).eval());
        const CMatrix xl = training_columns(model.train, {l});
        g += linalg::kron(xl, snr);
        m += linalg::kron(r_code(model.train, l), snr.adjoint());
        g_full += linalg::kron(xl, llt.solve((model.rho(l) * (s.adjoint() * model.r(l))).eval()));
    }
    LinearEstimator e;
    e.kind = EstimatorKind::RrMmseJoint;
    e.s = s;
    e.a_eff = right_divide(g, m);
    e.a_full = right_divide(g_full, m);
    return e;
}

LinearEstimator rr_mmse_angle(const Beamspace& beam, const GroupModel& model)
{
    const CMatrix& s = beam.s;
    check_beam(s, model);
    const Index d = s.cols();
    const Index t = model.length();
    const CMatrix& r_sum = model.statics.r_sum.matrix;
    const auto llt = factor_q(s.adjoint() * model.noise.r_eta * s);
    const CMatrix snr = llt.solve((s.adjoint() * r_sum * s).eval());
    const CMatrix& x = model.train.complete;

    const CMatrix m = linalg::kron(r_code_total(model.train), snr.adjoint()) +
                      CMatrix::Identity(t * d, t * d);
    LinearEstimator e;
    e.kind = EstimatorKind::RrMmseAngle;
    e.s = s;
    e.a_eff = right_divide(linalg::kron(x, snr), m);
    e.a_full = right_divide(linalg::kron(x, llt.solve((s.adjoint() * r_sum).eval())), m);
    return e;
}

LinearEstimator ls_angle(const Beamspace& beam, const GroupModel& model)
{
    check_beam(beam.s, model);
    const CMatrix& x = model.train.complete;
    LinearEstimator e;
    e.kind = EstimatorKind::LsAngle;
    e.s = beam.s;
    if (linalg::numerical_rank(x) < std::min(x.rows(), x.cols())) {
        e.warnings.push_back("training matrix is rank deficient; using the pseudoinverse");
    }
    const Index d = beam.dim();
    e.a_eff = linalg::kron(linalg::pinv(x), CMatrix::Identity(d, d));
    return e;
}

LinearEstimator correlator_general(const Beamspace& beam, const GroupModel& model)
{
    check_beam(beam.s, model);
    const Index d = beam.dim();
    const Index l_g = model.memory();
    std::set<Index> seen_delays;
    std::set<Index> seen_cols;
    for (const BeamBlock& b : beam.blocks) {
        std::vector<Index> delays = b.mpcs;
        if (delays.empty()) {
            for (Index l = 0; l < l_g; ++l) {
                delays.push_back(l);
            }
        }
        for (Index l : delays) {
            if (l < 0 || l >= l_g || !seen_delays.insert(l).second) {
                throw ValidationError("correlator_general: delay clusters must partition 0..L-1");
            }
        }
        for (Index c : b.columns) {
            if (c < 0 || c >= d || !seen_cols.insert(c).second) {
                throw ValidationError("correlator_general: column sets must partition 0..D-1");
            }
        }
    }
    if (static_cast<Index>(seen_delays.size()) != l_g || static_cast<Index>(seen_cols.size()) != d) {
        throw ValidationError("correlator_general: clusters or column sets do not cover everything");
    }

    const Index t = model.length();
    const Index kl = model.num_users() * l_g;
    LinearEstimator e;
    e.kind = EstimatorKind::CorrGeneral;
    e.s = beam.s;
    e.a_eff = CMatrix::Zero(kl * d, t * d);
    for (const BeamBlock& b : beam.blocks) {
        std::vector<Index> delays = b.mpcs;
        if (delays.empty()) {
            for (Index l = 0; l < l_g; ++l) {
                delays.push_back(l);
            }
        }
        CMatrix sel = CMatrix::Zero(d, d);
        for (Index c : b.columns) {
            sel(c, c) = 1.0;
        }
        e.a_eff += linalg::kron(linalg::pinv(training_columns(model.train, delays)), sel);
    }
    return e;
}

LinearEstimator correlator_rank1(const Beamspace& beam, const GroupModel& model)
{
    const Index l_g = model.memory();
    if (beam.dim() != l_g || static_cast<Index>(beam.blocks.size()) != l_g) {
        throw ValidationError("correlator_rank1: needs exactly one beam column per MPC (D = L)");
    }
    for (const BeamBlock& b : beam.blocks) {
        if (b.mpcs.size() != 1 || b.d() != 1) {
            throw ValidationError("correlator_rank1: every block must be one delay with d = 1");
        }
    }
    LinearEstimator e = correlator_general(beam, model);
    e.kind = EstimatorKind::CorrRank1;
    return e;
}

LinearEstimator full_wiener(const GroupModel& model, Index max_nt)
{
    const Index n = model.num_elements();
    if (n * model.length() > max_nt) {
        throw ValidationError("full_wiener: N T = " + std::to_string(n * model.length()) +
                              " exceeds the configured limit " + std::to_string(max_nt));
    }
    Beamspace identity;
    identity.s = CMatrix::Identity(n, n);
    LinearEstimator e = rr_mmse_joint(identity, model);
    e.kind = EstimatorKind::FullWiener;
    return e;
}

} // namespace rrce
