// SPDX-License-Identifier: Apache-2.0
#include "rrce/beamspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rrce/linalg.hpp"

namespace rrce {

std::vector<Index> Beamspace::block_dims() const
{
    std::vector<Index> out;
    for (const auto& b : blocks) {
        out.push_back(b.d());
    }
    return out;
}

std::string to_string(BeamKind kind)
{
    switch (kind) {
    case BeamKind::GEB: return "geb";
    case BeamKind::DFT: return "dft";
    case BeamKind::Custom: return "custom";
    }
    return "custom";
}

std::string to_string(BeamNormalization norm)
{
    switch (norm) {
    case BeamNormalization::REtaOrthonormal: return "r_eta_orthonormal";
    case BeamNormalization::EuclideanOrthonormal: return "euclidean_orthonormal";
    case BeamNormalization::Unnormalized: return "unnormalized";
    }
    return "unnormalized";
}

Beamspace custom_beamspace(const CMatrix& s)
{
    if (s.cols() == 0 || s.cols() > s.rows()) {
        throw ValidationError("custom beamspace: need 1 <= D <= N columns");
    }
    if (linalg::numerical_rank(s) < s.cols()) {
        throw ValidationError("custom beamspace: matrix is not of full column rank");
    }
    Beamspace b;
    b.s = s;
    b.kind = BeamKind::Custom;
    BeamBlock blk;
    for (Index i = 0; i < s.cols(); ++i) {
        blk.columns.push_back(i);
    }
    b.blocks.push_back(blk);
    return b;
}

namespace {

void check_conditioning(const CMatrix& m, const char* what)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw ConditioningError(std::string(what) + ": eigensolver failed");
    }
    const RVector& ev = es.eigenvalues();
    const double top = ev(ev.size() - 1);
    if (!(top > 0.0) || ev(0) < 1e-12 * top) {
        throw ConditioningError(std::string(what) + ": matrix is singular or indefinite");
    }
}

Eigen::LLT<CMatrix> factor(const CMatrix& q, const char* what)
{
    check_conditioning(q, what);
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(q));
    if (llt.info() != Eigen::Success) {
        throw ConditioningError(std::string(what) + ": Cholesky factorization failed");
    }
    return llt;
}

// L^{-1} M L^{-H} for lower-triangular L.
CMatrix whiten(const CMatrix& l, const CMatrix& m)
{
    const auto tri = l.triangularView<Eigen::Lower>();
    const CMatrix a = tri.solve(m);
    return linalg::hermitian_part(tri.solve(a.adjoint().eval()).adjoint());
}

CMatrix unreduced(const SpatialCovariance& c)
{
    return c.unreduced.size() > 0 ? c.unreduced : c.matrix;
}

// sum_{l in cluster} rho_l R_l, model or unreduced.
CMatrix cluster_covariance(const GroupModel& m, const std::vector<Index>& cluster, bool model_cov)
{
    const Index n = m.num_elements();
    CMatrix r = CMatrix::Zero(n, n);
    for (Index l : cluster) {
        const auto& c = m.covs[static_cast<std::size_t>(l)];
        r += m.rho(l) * (model_cov ? c.matrix : unreduced(c));
    }
    return r;
}

double cluster_power(const GroupModel& m, const std::vector<Index>& cluster)
{
    double p = 0.0;
    for (Index l : cluster) {
        p += m.rho(l);
    }
    return p;
}

// Attributes each column to the cluster that captures most of its energy.
std::vector<Index> assign_columns(const GroupModel& m, const CMatrix& cols)
{
    std::vector<CMatrix> rc;
    for (const auto& c : m.clusters) {
        rc.push_back(cluster_covariance(m, c, false));
    }
    std::vector<Index> owner;
    for (Index j = 0; j < cols.cols(); ++j) {
        Index best = 0;
        double best_e = -1.0;
        for (std::size_t c = 0; c < rc.size(); ++c) {
            const double e = (cols.col(j).adjoint() * rc[c] * cols.col(j))(0, 0).real();
            if (e > best_e * (1.0 + 1e-12)) {
                best_e = e;
                best = static_cast<Index>(c);
            }
        }
        owner.push_back(best);
    }
    return owner;
}

} // namespace

GeneralizedEig generalized_eig(const CMatrix& r_num, const CMatrix& r_den)
{
    if (r_num.rows() != r_den.rows() || r_num.cols() != r_den.cols() ||
        r_num.rows() != r_num.cols()) {
        throw ValidationError("generalized_eig: matrices must be square and of equal size");
    }
    const Eigen::LLT<CMatrix> llt = factor(r_den, "generalized_eig");
    const CMatrix l = llt.matrixL();
    const linalg::HermitianEig eig = linalg::hermitian_eig(whiten(l, r_num));
    GeneralizedEig out;
    out.values = eig.values.cwiseMax(0.0);
    out.vectors = l.adjoint().triangularView<Eigen::Upper>().solve(eig.vectors);
    for (Index i = 0; i < out.vectors.cols(); ++i) {
        linalg::normalize_phase(out.vectors.col(i));
    }
    return out;
}

SnrMatrix snr_matrix(const CMatrix& s, const CMatrix& r, const NoiseCovariance& noise, double rho,
                     std::optional<Index> delay)
{
    const CMatrix q = s.adjoint() * noise.r_eta * s;
    const Eigen::LLT<CMatrix> llt = factor(q, "snr_matrix");
    SnrMatrix out;
    out.matrix = llt.solve((rho * (s.adjoint() * r * s)).eval());
    out.delay = delay;
    return out;
}

SnrMatrix snr_matrix(const Beamspace& beam, const GroupModel& model, Index l)
{
    return snr_matrix(beam.s, model.r(l), model.noise, model.rho(l), l);
}

SnrMatrix snr_matrix_total(const Beamspace& beam, const GroupModel& model)
{
    return snr_matrix(beam.s, model.statics.r_sum.matrix, model.noise, 1.0, std::nullopt);
}

CriterionReport criteria_from_kappa(const RVector& kappa, Index total_rank, Index t, Index d)
{
    CriterionReport rep;
    rep.f_eigvals = kappa;
    double inv = 0.0;
    double mi = 0.0;
    for (Index i = 0; i < kappa.size(); ++i) {
        inv += 1.0 / (kappa(i) + 1.0);
        mi += std::log1p(kappa(i));
    }
    rep.nmse_trace = inv + static_cast<double>(total_rank) - static_cast<double>(t * d);
    rep.mutual_info = mi;
    rep.log_error_volume_reduction = -mi;
    return rep;
}

FMatrix build_f(const Beamspace& beam, const GroupModel& model)
{
    const CMatrix& s = beam.s;
    const Index d = s.cols();
    const Index t = model.length();
    const CMatrix q = s.adjoint() * model.noise.r_eta * s;
    const Eigen::LLT<CMatrix> llt = factor(q, "build_f");
    const CMatrix l = llt.matrixL();

    FMatrix out;
    out.f = CMatrix::Zero(t * d, t * d);
    out.f_hermitian = CMatrix::Zero(t * d, t * d);
    for (Index dl = 0; dl < model.memory(); ++dl) {
        const CMatrix p = model.rho(dl) * (s.adjoint() * model.r(dl) * s);
        const CMatrix rc = r_code(model.train, dl);
        out.f += linalg::kron(rc, llt.solve(p));
        out.f_hermitian += linalg::kron(rc, whiten(l, p));
    }
    out.f_hermitian = linalg::hermitian_part(out.f_hermitian);
    const RVector kappa = linalg::hermitian_eig(out.f_hermitian).values.cwiseMax(0.0);
    out.report = criteria_from_kappa(kappa, model.num_users() * model.total_rank(), t, d);
    return out;
}

std::vector<std::vector<double>> cluster_gains(const GroupModel& model)
{
    std::vector<std::vector<double>> gains;
    for (const auto& cluster : model.clusters) {
        const double pc = cluster_power(model, cluster);
        const GeneralizedEig ge =
            generalized_eig(cluster_covariance(model, cluster, true), model.noise.r_eta);
        const Index rank = model.covs[static_cast<std::size_t>(cluster.front())].rank;

        CMatrix code = CMatrix::Zero(model.length(), model.length());
        for (Index l : cluster) {
            code += (model.rho(l) / pc) * r_code(model.train, l);
        }
        const RVector beta = linalg::hermitian_eig(code).values.cwiseMax(0.0);

        std::vector<double> g;
        for (Index n = 0; n < std::min(rank, ge.values.size()); ++n) {
            const double mu = ge.values(n);
            double acc = 0.0;
            for (Index m = 0; m < beta.size(); ++m) {
                acc += beta(m) * mu / (beta(m) * mu + 1.0);
            }
            g.push_back(acc);
        }
        gains.push_back(std::move(g));
    }
    return gains;
}

Allocation allocate_dimensions(const GroupModel& model, Index d)
{
    if (d < 1) {
        throw ValidationError("allocate_dimensions: D must be >= 1");
    }
    const auto gains = cluster_gains(model);
    const std::size_t nc = gains.size();
    Allocation a;
    a.dims.assign(nc, 0);

    Index capacity = 0;
    for (const auto& g : gains) {
        capacity += static_cast<Index>(g.size());
    }
    const Index usable = std::min(d, capacity);
    a.clamped = d - usable;
    if (a.clamped > 0) {
        a.warnings.push_back("D exceeds the total signal rank; " + std::to_string(a.clamped) +
                             " column(s) carry no design gain");
    }
    if (d < static_cast<Index>(nc)) {
        a.warnings.push_back("D is smaller than the number of MPC clusters");
    }

    for (Index step = 0; step < usable; ++step) {
        std::size_t best = nc;
        double best_g = -1.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const auto next = static_cast<std::size_t>(a.dims[c]);
            if (next < gains[c].size() && gains[c][next] > best_g) {
                best_g = gains[c][next];
                best = c;
            }
        }
        a.dims[best] += 1;
        a.total_gain += best_g;
    }

    // Exhaustive cross-check over all compositions with 0 <= d_c <= r_c.
    std::vector<std::vector<double>> prefix(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        prefix[c].push_back(0.0);
        for (double g : gains[c]) {
            prefix[c].push_back(prefix[c].back() + g);
        }
    }
    // count[c][k]: number of ways clusters c.. can absorb k columns.
    std::vector<std::vector<double>> count(nc + 1, std::vector<double>(usable + 1, 0.0));
    count[nc][0] = 1.0;
    for (std::size_t c = nc; c-- > 0;) {
        for (Index k = 0; k <= usable; ++k) {
            for (Index j = 0; j <= std::min<Index>(k, static_cast<Index>(gains[c].size())); ++j) {
                count[c][k] += count[c + 1][k - j];
            }
        }
    }
    if (count[0][usable] <= 1e4) {
        a.exhaustive_checked = true;
        double best = -1.0;
        std::vector<Index> best_dims;
        std::vector<Index> cur(nc, 0);
        std::function<void(std::size_t, Index, double)> rec = [&](std::size_t c, Index left,
                                                                  double acc) {
            if (c == nc) {
                if (left == 0 && acc > best * (1.0 + 1e-12) + 1e-300) {
                    best = acc;
                    best_dims = cur;
                }
                return;
            }
            const Index top = std::min<Index>(left, static_cast<Index>(gains[c].size()));
            for (Index j = 0; j <= top; ++j) {
                cur[c] = j;
                rec(c + 1, left - j, acc + prefix[c][static_cast<std::size_t>(j)]);
            }
            cur[c] = 0;
        };
        rec(0, usable, 0.0);
        a.exhaustive_agrees = std::abs(best - a.total_gain) <= 1e-9 * std::max(1.0, best);
        if (!a.exhaustive_agrees) {
            a.warnings.push_back("greedy allocation differs from exhaustive optimum; using the latter");
            a.dims = best_dims;
            a.total_gain = best;
        }
    }
    return a;
}

std::vector<Index> per_delay_dims(const GroupModel& model, const Allocation& alloc)
{
    std::vector<Index> out(static_cast<std::size_t>(model.memory()), 0);
    for (std::size_t c = 0; c < model.clusters.size(); ++c) {
        out[static_cast<std::size_t>(model.clusters[c].front())] = alloc.dims[c];
    }
    return out;
}

namespace {

Beamspace geb_from_dims(const GroupModel& model, const std::vector<GeneralizedEig>& ge,
                        const std::vector<Index>& dims, Index clamped)
{
    const Index n = model.num_elements();
    Index d = clamped;
    for (Index dc : dims) {
        d += dc;
    }
    Beamspace b;
    b.kind = BeamKind::GEB;
    b.normalization = BeamNormalization::REtaOrthonormal;
    b.s.resize(n, d);

    Index col = 0;
    for (std::size_t c = 0; c < model.clusters.size(); ++c) {
        BeamBlock blk;
        blk.mpcs = model.clusters[c];
        const Index dc = dims[c];
        if (dc > 0) {
            b.s.middleCols(col, dc) = ge[c].vectors.leftCols(dc);
            for (Index j = 0; j < dc; ++j) {
                blk.columns.push_back(col + j);
            }
            col += dc;
        }
        b.blocks.push_back(std::move(blk));
    }

    if (clamped > 0) {
        // Remaining columns: dominant directions of the unreduced group
        // covariance in the R_eta-whitened complement of the columns so far.
        const CMatrix& l = model.noise.chol;
        const CMatrix white = l.adjoint() * b.s.leftCols(col);
        CMatrix proj = CMatrix::Identity(n, n);
        if (col > 0) {
            Eigen::HouseholderQR<CMatrix> qr(white);
            const CMatrix qb = qr.householderQ() * CMatrix::Identity(n, col);
            proj -= qb * qb.adjoint();
        }
        const CMatrix m = proj * whiten(l, model.statics.r_sum.unreduced) * proj;
        const linalg::HermitianEig eig = linalg::hermitian_eig(linalg::hermitian_part(m));
        CMatrix extra =
            l.adjoint().triangularView<Eigen::Upper>().solve(eig.vectors.leftCols(clamped));
        for (Index j = 0; j < extra.cols(); ++j) {
            linalg::normalize_phase(extra.col(j));
        }
        const std::vector<Index> owner = assign_columns(model, extra);
        b.s.middleCols(col, clamped) = extra;
        for (Index j = 0; j < clamped; ++j) {
            BeamBlock& blk = b.blocks[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])];
            blk.columns.push_back(col + j);
            blk.extra += 1;
        }
    }
    return b;
}

// All compositions of `total` with 0 <= parts[c] <= caps[c], up to `limit`.
// Returns false when the limit is exceeded.
bool compositions(const std::vector<Index>& caps, Index total, std::size_t limit,
                  std::vector<std::vector<Index>>& out)
{
    std::vector<Index> cur(caps.size(), 0);
    bool ok = true;
    std::function<void(std::size_t, Index)> rec = [&](std::size_t c, Index left) {
        if (!ok) {
            return;
        }
        if (c == caps.size()) {
            if (left == 0) {
                if (out.size() >= limit) {
                    ok = false;
                    return;
                }
                out.push_back(cur);
            }
            return;
        }
        for (Index j = 0; j <= std::min(left, caps[c]); ++j) {
            cur[c] = j;
            rec(c + 1, left - j);
        }
        cur[c] = 0;
    };
    rec(0, total);
    return ok;
}

} // namespace

Beamspace build_geb(const GroupModel& model, Index d, AllocationRule rule)
{
    const Index n = model.num_elements();
    if (d < 1 || d > n) {
        throw ValidationError("build_geb: need 1 <= D <= N");
    }
    const Allocation alloc = allocate_dimensions(model, d);
    std::vector<GeneralizedEig> ge;
    std::vector<Index> caps;
    for (const auto& cluster : model.clusters) {
        ge.push_back(generalized_eig(cluster_covariance(model, cluster, true), model.noise.r_eta));
        caps.push_back(std::min(model.covs[static_cast<std::size_t>(cluster.front())].rank,
                                ge.back().values.size()));
    }

    Beamspace best = geb_from_dims(model, ge, alloc.dims, alloc.clamped);
    best.warnings = alloc.warnings;
    if (rule == AllocationRule::Criterion && alloc.clamped == 0) {
        std::vector<std::vector<Index>> cands;
        if (compositions(caps, d, 1000, cands)) {
            double best_mi = build_f(best, model).report.mutual_info;
            for (const auto& dims : cands) {
                if (dims == alloc.dims) {
                    continue;
                }
                Beamspace b = geb_from_dims(model, ge, dims, 0);
                const double mi = build_f(b, model).report.mutual_info;
                if (mi > best_mi + 1e-10 * std::abs(best_mi)) {
                    best_mi = mi;
                    best = std::move(b);
                    best.warnings = alloc.warnings;
                }
            }
        } else {
            best.warnings.push_back(
                "too many cluster compositions to score exactly; using the gain allocation");
        }
    }
    return best;
}

Beamspace build_dft(const SpatialCovariance& r_sum, Index d)
{
    const CMatrix& r = r_sum.unreduced.size() > 0 ? r_sum.unreduced : r_sum.matrix;
    if (d < 1 || d > r.rows()) {
        throw ValidationError("build_dft: need 1 <= D <= N");
    }
    const linalg::HermitianEig eig = linalg::hermitian_eig(r);
    Beamspace b;
    b.kind = BeamKind::DFT;
    b.normalization = BeamNormalization::EuclideanOrthonormal;
    b.s = eig.vectors.leftCols(d);
    BeamBlock blk;
    for (Index j = 0; j < d; ++j) {
        blk.columns.push_back(j);
    }
    b.blocks.push_back(blk);
    return b;
}

Beamspace build_dft(const GroupModel& model, Index d)
{
    Beamspace b = build_dft(model.statics.r_sum, d);
    const std::vector<Index> owner = assign_columns(model, b.s);
    b.blocks.clear();
    for (const auto& c : model.clusters) {
        BeamBlock blk;
        blk.mpcs = c;
        b.blocks.push_back(blk);
    }
    for (Index j = 0; j < d; ++j) {
        b.blocks[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])].columns.push_back(j);
    }
    return b;
}

Beamspace orthonormalize(const Beamspace& beam)
{
    Beamspace out = beam;
    Eigen::HouseholderQR<CMatrix> qr(beam.s);
    out.s = qr.householderQ() * CMatrix::Identity(beam.s.rows(), beam.s.cols());
    out.normalization = BeamNormalization::EuclideanOrthonormal;
    return out;
}

BeamPattern beam_pattern(const Beamspace& beam, const ArrayGeometry& geom, double step_deg)
{
    if (!(step_deg > 0.0)) {
        throw ValidationError("beam_pattern: step must be > 0");
    }
    const auto count = static_cast<Index>(std::llround(180.0 / step_deg)) + 1;
    const Index d = beam.dim();
    const double n = static_cast<double>(geom.num_elements);
    const RVector col_norm2 = beam.s.colwise().squaredNorm().transpose();
    Eigen::HouseholderQR<CMatrix> qr(beam.s);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(beam.s.rows(), d);

    constexpr double floor = 1e-30;
    BeamPattern p;
    p.column_gain_db.resize(count, d);
    p.aggregate_db.resize(count);
    for (Index i = 0; i < count; ++i) {
        const double theta = std::min(90.0, -90.0 + static_cast<double>(i) * step_deg);
        p.theta_deg.push_back(theta);
        const CVector a = array_response(geom, theta);
        const CVector proj = beam.s.adjoint() * a;
        for (Index j = 0; j < d; ++j) {
            p.column_gain_db(i, j) =
                linear_to_db(std::max(floor, std::norm(proj(j)) / (n * col_norm2(j))));
        }
        p.aggregate_db(i) = linear_to_db(std::max(floor, (q.adjoint() * a).squaredNorm() / n));
    }
    return p;
}

} // namespace rrce
