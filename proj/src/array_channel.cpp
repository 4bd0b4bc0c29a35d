// SPDX-License-Identifier: Apache-2.0
#include "rrce/array_channel.hpp"

#include <cmath>
#include <string>

#include "rrce/linalg.hpp"
#include "rrce/rng.hpp"

namespace rrce {

void ArrayGeometry::validate() const
{
    if (num_elements < 1) {
        throw ValidationError("array: num_elements must be >= 1");
    }
    if (!(element_spacing > 0.0) || !std::isfinite(element_spacing)) {
        throw ValidationError("array: element_spacing must be > 0");
    }
}

void AngularSector::validate() const
{
    const auto inside = [](double v) { return std::isfinite(v) && v > -90.0 && v < 90.0; };
    if (!inside(lo_deg) || !inside(hi_deg)) {
        throw DomainError("sector: bounds must lie strictly inside (-90, 90) degrees");
    }
    // lo == hi is accepted and treated as a point source.
    if (lo_deg > hi_deg) {
        throw ValidationError("sector: lo_deg must not exceed hi_deg");
    }
}

void GroupSpec::validate() const
{
    const std::string who = "group " + std::to_string(id) + ": ";
    if (num_users < 1) {
        throw ValidationError(who + "num_users must be >= 1");
    }
    if (memory < 1) {
        throw ValidationError(who + "memory must be >= 1");
    }
    if (static_cast<Index>(mpcs.size()) != memory) {
        throw ValidationError(who + "expected one MPC per delay");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mpcs.size(); ++i) {
        const MpcSpec& m = mpcs[i];
        if (m.delay != static_cast<Index>(i)) {
            throw ValidationError(who + "MPC delays must be 0..L-1 in order");
        }
        if (!(m.power > 0.0) || m.power > 1.0) {
            throw ValidationError(who + "MPC power must lie in (0, 1]");
        }
        if (m.rank_override && *m.rank_override < 1) {
            throw ValidationError(who + "rank_override must be >= 1");
        }
        m.sector.validate();
        total += m.power;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError(who + "power delay profile must sum to one");
    }
}

GroupSpec GroupSpec::uniform(int id, Index num_users, const std::vector<AngularSector>& sectors)
{
    GroupSpec g;
    g.id = id;
    g.num_users = num_users;
    g.memory = static_cast<Index>(sectors.size());
    const double rho = 1.0 / static_cast<double>(sectors.size());
    for (std::size_t l = 0; l < sectors.size(); ++l) {
        g.mpcs.push_back(MpcSpec{static_cast<Index>(l), rho, sectors[l], std::nullopt});
    }
    return g;
}

CVector array_response(const ArrayGeometry& geom, double theta_deg)
{
    const double phase = 2.0 * kPi * geom.element_spacing * std::sin(deg2rad(theta_deg));
    CVector a(geom.num_elements);
    for (Index n = 0; n < geom.num_elements; ++n) {
        a(n) = std::polar(1.0, phase * static_cast<double>(n));
    }
    return a;
}

CVector steering_vector(const ArrayGeometry& geom, double theta_deg)
{
    if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
        throw DomainError("steering_vector: azimuth must lie strictly inside (-90, 90) degrees");
    }
    return array_response(geom, theta_deg);
}

int default_quad_points(Index num_elements)
{
    return static_cast<int>(4 * num_elements + 64);
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) {
                break;
            }
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

SpatialCovariance describe(const CMatrix& m, bool trace_normalized)
{
    SpatialCovariance out;
    out.matrix = m;
    out.unreduced = m;
    out.trace_normalized = trace_normalized;
    const linalg::HermitianEig eig = linalg::hermitian_eig(m);
    const double top = eig.values.size() > 0 ? std::max(eig.values(0), 0.0) : 0.0;
    Index r = 0;
    while (r < eig.values.size() && eig.values(r) > 1e-15 * top && eig.values(r) > 0.0) {
        ++r;
    }
    out.rank = r;
    out.eigvals = eig.values.head(r);
    out.eigvecs = eig.vectors.leftCols(r);
    return out;
}

} // namespace

SpatialCovariance covariance_from_matrix(const CMatrix& m)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("covariance_from_matrix: matrix must be square and non-empty");
    }
    const CMatrix h = linalg::hermitian_part(m);
    return describe(h, std::abs(h.trace().real() - 1.0) <= 1e-10);
}

SpatialCovariance sector_covariance(const ArrayGeometry& geom, const AngularSector& sector,
                                    int quad_points)
{
    geom.validate();
    sector.validate();
    const Index n = geom.num_elements;

    if (sector.width_deg() < 1e-9) {
        const CVector a = steering_vector(geom, sector.center_deg());
        SpatialCovariance out;
        out.matrix = a * a.adjoint() / static_cast<double>(n);
        out.unreduced = out.matrix;
        out.eigvecs = a / std::sqrt(static_cast<double>(n));
        linalg::normalize_phase(out.eigvecs.col(0));
        out.eigvals = RVector::Ones(1);
        out.rank = 1;
        out.trace_normalized = true;
        out.degenerate = true;
        return out;
    }
    if (quad_points < 2 * n) {
        throw ValidationError("sector_covariance: quad_points must be >= 2 N");
    }

    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(quad_points, x, w);
    const double lo = deg2rad(sector.lo_deg);
    const double hi = deg2rad(sector.hi_deg);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    // First column of the Toeplitz matrix: c_k = mean over the sector of
    // exp(j 2 pi d k sin(theta)).
    CVector c = CVector::Zero(n);
    const double scale = 2.0 * kPi * geom.element_spacing;
    for (std::size_t q = 0; q < x.size(); ++q) {
        const double s = std::sin(mid + half * x[q]);
        const double wq = 0.5 * w[q];
        for (Index k = 0; k < n; ++k) {
            c(k) += wq * std::polar(1.0, scale * static_cast<double>(k) * s);
        }
    }
    CMatrix r(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            r(i, j) = i >= j ? c(i - j) : std::conj(c(j - i));
        }
    }
    r /= static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
        r(i, i) = cdouble(r(i, i).real(), 0.0);
    }
    return describe(r, true);
}

SpatialCovariance truncate_eigenspace(const SpatialCovariance& cov, double energy_fraction,
                                      std::optional<Index> rank_override)
{
    if (!(energy_fraction > 0.0) || energy_fraction > 1.0) {
        throw ValidationError("truncate_eigenspace: energy_fraction must lie in (0, 1]");
    }
    const linalg::HermitianEig eig = linalg::hermitian_eig(cov.matrix);
    const Index n = eig.values.size();
    if (n == 0) {
        throw ValidationError("truncate_eigenspace: empty covariance");
    }
    if (eig.values(n - 1) < -1e-9) {
        throw ValidationError("truncate_eigenspace: covariance is not positive semidefinite");
    }
    double total = 0.0;
    Index positive = 0;
    for (Index i = 0; i < n; ++i) {
        if (eig.values(i) > 0.0) {
            total += eig.values(i);
            ++positive;
        }
    }
    if (!(total > 0.0)) {
        throw ValidationError("truncate_eigenspace: covariance has no energy");
    }

    Index r = 0;
    if (rank_override) {
        if (*rank_override < 1) {
            throw ValidationError("truncate_eigenspace: rank override must be >= 1");
        }
        r = std::min<Index>(*rank_override, positive);
    } else {
        double acc = 0.0;
        const double target = energy_fraction * total * (1.0 - 1e-12);
        while (r < positive) {
            acc += eig.values(r);
            ++r;
            if (acc >= target) {
                break;
            }
        }
    }

    SpatialCovariance out;
    out.rank = r;
    out.eigvecs = eig.vectors.leftCols(r);
    out.eigvals = eig.values.head(r);
    out.eigvals *= total / out.eigvals.sum();
    out.matrix = linalg::hermitian_part(out.eigvecs * out.eigvals.asDiagonal() *
                                        out.eigvecs.adjoint());
    out.trace_normalized = cov.trace_normalized;
    out.degenerate = cov.degenerate;
    out.unreduced = cov.unreduced.size() > 0 ? cov.unreduced : cov.matrix;
    return out;
}

std::vector<SpatialCovariance> group_covariances(const ArrayGeometry& geom, const GroupSpec& group,
                                                 double energy_fraction, int quad_points)
{
    group.validate();
    std::vector<SpatialCovariance> out;
    out.reserve(group.mpcs.size());
    for (const MpcSpec& m : group.mpcs) {
        out.push_back(truncate_eigenspace(sector_covariance(geom, m.sector, quad_points),
                                          energy_fraction, m.rank_override));
    }
    return out;
}

KltBasis klt_basis(const GroupSpec& group, const std::vector<SpatialCovariance>& covs)
{
    if (static_cast<Index>(covs.size()) != group.memory) {
        throw ValidationError("klt_basis: expected one covariance per delay");
    }
    const Index n = covs.front().dim();
    Index total_rank = 0;
    for (const auto& c : covs) {
        if (c.rank < 1) {
            throw ValidationError("klt_basis: covariance block of rank zero");
        }
        if (c.dim() != n) {
            throw ValidationError("klt_basis: covariance sizes differ");
        }
        total_rank += c.rank;
    }
    KltBasis b;
    b.v = CMatrix::Zero(n * group.memory, total_rank);
    Index col = 0;
    for (Index l = 0; l < group.memory; ++l) {
        const auto& c = covs[static_cast<std::size_t>(l)];
        const double rho = group.mpcs[static_cast<std::size_t>(l)].power;
        b.v.block(l * n, col, n, c.rank) =
            std::sqrt(rho) * c.eigvecs * c.eigvals.cwiseSqrt().asDiagonal();
        b.ranks.push_back(c.rank);
        col += c.rank;
    }
    b.upsilon_u = linalg::kron(CMatrix::Identity(group.num_users, group.num_users), b.v);
    return b;
}

ChannelRealization sample_group_channels(const GroupSpec& group, const KltBasis& basis,
                                         std::mt19937_64& rng)
{
    const Index n = basis.v.rows() / group.memory;
    if (basis.upsilon_u.rows() != n * group.memory * group.num_users) {
        throw ValidationError("sample_group_channels: basis does not match group");
    }
    ChannelRealization out;
    out.klt_coeffs = linalg::complex_normal(basis.upsilon_u.cols(), 1, rng).col(0);
    out.stacked = basis.upsilon_u * out.klt_coeffs;
    out.per_user_mpcs.resize(static_cast<std::size_t>(group.num_users));
    for (Index k = 0; k < group.num_users; ++k) {
        auto& user = out.per_user_mpcs[static_cast<std::size_t>(k)];
        for (Index l = 0; l < group.memory; ++l) {
            user.push_back(out.stacked.segment((k * group.memory + l) * n, n));
        }
    }
    return out;
}

ChannelRealization sample_group_channels(const GroupSpec& group, const KltBasis& basis,
                                         std::uint64_t seed, std::uint64_t trial)
{
    auto rng = make_stream(seed, static_cast<std::uint64_t>(group.id), trial);
    return sample_group_channels(group, basis, rng);
}

GroupStatics group_statics(const GroupSpec& group, const std::vector<SpatialCovariance>& covs)
{
    if (static_cast<Index>(covs.size()) != group.memory) {
        throw ValidationError("group_statics: expected one covariance per delay");
    }
    const Index n = covs.front().dim();
    CMatrix sum = CMatrix::Zero(n, n);
    CMatrix sum_unreduced = CMatrix::Zero(n, n);
    const Index kl = group.num_users * group.memory;
    GroupStatics out;
    out.r_full = CMatrix::Zero(n * kl, n * kl);
    for (Index l = 0; l < group.memory; ++l) {
        const double rho = group.mpcs[static_cast<std::size_t>(l)].power;
        const CMatrix& r = covs[static_cast<std::size_t>(l)].matrix;
        sum += rho * r;
        const auto& c = covs[static_cast<std::size_t>(l)];
        sum_unreduced += rho * (c.unreduced.size() > 0 ? c.unreduced : c.matrix);
        for (Index k = 0; k < group.num_users; ++k) {
            const Index at = (k * group.memory + l) * n;
            out.r_full.block(at, at, n, n) = rho * r;
        }
    }
    out.r_sum = describe(linalg::hermitian_part(sum), true);
    out.r_sum.unreduced = linalg::hermitian_part(sum_unreduced);
    return out;
}

} // namespace rrce
