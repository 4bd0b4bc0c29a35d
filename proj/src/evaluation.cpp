// SPDX-License-Identifier: Apache-2.0
#include "rrce/evaluation.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "rrce/linalg.hpp"
#include "rrce/rng.hpp"

namespace rrce {

double Scenario::gamma_for(const Interferer& in) const
{
    if (inr_db) {
        return db_to_linear(*inr_db) * noise_power / energy();
    }
    return in.gamma;
}

int Scenario::quadrature() const
{
    return quad_points > 0 ? quad_points : default_quad_points(geom.num_elements);
}

void Scenario::validate() const
{
    geom.validate();
    intended.validate();
    for (const Interferer& in : interferers) {
        in.group.validate();
        if (!(in.gamma >= 0.0)) {
            throw ValidationError("scenario: interferer gamma must be >= 0");
        }
    }
    if (training_length < 1) {
        throw ValidationError("scenario: training_length must be >= 1");
    }
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw ValidationError("scenario: noise_power must be > 0");
    }
    if (!std::isfinite(snr_db) || (inr_db && !std::isfinite(*inr_db))) {
        throw ValidationError("scenario: snr_db / inr_db must be finite");
    }
    if (!(energy_fraction > 0.0) || energy_fraction > 1.0) {
        throw ValidationError("scenario: energy_fraction must lie in (0, 1]");
    }
    if (quad_points != 0 && quad_points < 2 * geom.num_elements) {
        throw ValidationError("scenario: quad_points must be 0 (default) or >= 2 N");
    }
}

Scenario default_scenario()
{
    Scenario s;
    s.geom = ArrayGeometry{100, 0.5};
    s.intended = GroupSpec::uniform(0, 2, {{-1.0, 1.0}, {-1.0, 1.0}, {5.0, 7.0}});
    const std::vector<AngularSector> sectors = {{-29.0, -26.0}, {-21.0, -19.0}, {-12.0, -9.0},
                                                {-5.5, -3.5},   {9.5, 12.5},    {15.0, 17.0},
                                                {24.0, 27.0}};
    int id = 1;
    for (const AngularSector& sec : sectors) {
        s.interferers.push_back(Interferer{GroupSpec::uniform(id++, 3, {sec, sec, sec}), 1.0});
    }
    s.training_length = 6;
    s.snr_db = 30.0;
    s.noise_power = 1.0;
    return s;
}

Scenario separation_scenario(const Scenario& base, double center_deg)
{
    Scenario s = base;
    const AngularSector own{-1.0, 1.0};
    s.intended = GroupSpec::uniform(0, 2, {own, own});
    const AngularSector other{center_deg - 1.0, center_deg + 1.0};
    const double gamma = base.interferers.empty() ? 1.0 : base.interferers.front().gamma;
    s.interferers = {Interferer{GroupSpec::uniform(1, 3, {other, other}), gamma}};
    return s;
}

ScenarioModel build_scenario_model(const Scenario& scenario)
{
    scenario.validate();
    const int quad = scenario.quadrature();
    ScenarioModel sm;
    sm.energy = scenario.energy();
    sm.noise_power = scenario.noise_power;

    InterferenceProfile profile;
    profile.noise_power = scenario.noise_power;
    for (const Interferer& in : scenario.interferers) {
        profile.interferers.push_back(Interferer{in.group, scenario.gamma_for(in)});
        sm.interferer_covs.push_back(
            group_covariances(scenario.geom, in.group, scenario.energy_fraction, quad));
    }
    const NoiseCovariance noise = interference_covariance(profile, sm.energy, sm.interferer_covs,
                                                          scenario.geom.num_elements);
    for (std::size_t g = 0; g < profile.interferers.size(); ++g) {
        const Interferer& in = profile.interferers[g];
        sm.explicit_interferers.push_back(ExplicitInterferer{
            in.group, klt_basis(in.group, sm.interferer_covs[g]), std::sqrt(in.gamma * sm.energy)});
    }
    const auto covs = group_covariances(scenario.geom, scenario.intended, scenario.energy_fraction,
                                        quad);
    const PilotSet pilots = pilot_set(scenario.intended, scenario.training_length, sm.energy);
    sm.model = make_group_model(scenario.geom, scenario.intended, covs, noise, pilots);
    const Index n = scenario.geom.num_elements;
    sm.thermal = make_noise_covariance(scenario.noise_power * CMatrix::Identity(n, n));
    return sm;
}

std::string to_string(ErrorTarget t)
{
    return t == ErrorTarget::Full ? "full" : "effective";
}

CMatrix target_covariance(const GroupModel& model, const CMatrix& s, ErrorTarget target)
{
    if (target == ErrorTarget::Full) {
        return model.statics.r_full;
    }
    const Index d = s.cols();
    const Index l_g = model.memory();
    const Index kl = model.num_users() * l_g;
    CMatrix r = CMatrix::Zero(kl * d, kl * d);
    for (Index l = 0; l < l_g; ++l) {
        const CMatrix p = model.rho(l) * (s.adjoint() * model.r(l) * s);
        for (Index k = 0; k < model.num_users(); ++k) {
            const Index at = (k * l_g + l) * d;
            r.block(at, at, d, d) = p;
        }
    }
    return linalg::hermitian_part(r);
}

CMatrix target_cross_covariance(const GroupModel& model, const CMatrix& s, ErrorTarget target)
{
    const Index kl = model.num_users() * model.memory();
    const Index rows = kl * (target == ErrorTarget::Full ? model.num_elements() : s.cols());
    CMatrix c = CMatrix::Zero(rows, model.length() * s.cols());
    for (Index l = 0; l < model.memory(); ++l) {
        const CMatrix xl = training_columns(model.train, {l});
        const CMatrix rs = model.rho(l) * (model.r(l) * s);
        c += linalg::kron(xl.adjoint(), target == ErrorTarget::Full ? rs : CMatrix(s.adjoint() * rs));
    }
    return c;
}

CMatrix reduced_observation_covariance(const GroupModel& model, const CMatrix& s)
{
    const Index t = model.length();
    CMatrix r = linalg::kron(CMatrix::Identity(t, t), s.adjoint() * model.noise.r_eta * s);
    for (Index l = 0; l < model.memory(); ++l) {
        r += linalg::kron(r_code(model.train, l), model.rho(l) * (s.adjoint() * model.r(l) * s));
    }
    return linalg::hermitian_part(r);
}

CMatrix observation_covariance(const GroupModel& model)
{
    const Index n = model.num_elements();
    return reduced_observation_covariance(model, CMatrix::Identity(n, n));
}

CMatrix error_cov_mmse(const Beamspace& beam, const GroupModel& model)
{
    const CMatrix c = target_cross_covariance(model, beam.s, ErrorTarget::Full);
    const CMatrix ry = reduced_observation_covariance(model, beam.s);
    Eigen::LLT<CMatrix> llt(ry);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("error_cov_mmse: observation covariance is not positive definite");
    }
    return linalg::hermitian_part(model.statics.r_full - c * llt.solve(c.adjoint()));
}

CMatrix error_cov_linear(const LinearEstimator& est, const GroupModel& model, ErrorTarget target)
{
    if (target == ErrorTarget::Full && !est.a_full) {
        throw ValidationError("error_cov_linear: " + to_string(est.kind) +
                              " has no full-channel map");
    }
    const CMatrix& a = target == ErrorTarget::Full ? *est.a_full : est.a_eff;
    const CMatrix rz = target_covariance(model, est.s, target);
    const CMatrix c = target_cross_covariance(model, est.s, target);
    const CMatrix ry = reduced_observation_covariance(model, est.s);
    const CMatrix ac = a * c.adjoint();
    return linalg::hermitian_part(rz - ac - ac.adjoint() + a * ry * a.adjoint());
}

CMatrix error_cov_excess_form(const CMatrix& w, const CMatrix& w_mmse, const CMatrix& r_e_mmse,
                              const CMatrix& r_y)
{
    const CMatrix dw = w - w_mmse;
    return linalg::hermitian_part(r_e_mmse + dw * r_y * dw.adjoint());
}

double mse_per_user(const CMatrix& r_e, Index num_users)
{
    return r_e.trace().real() / static_cast<double>(num_users);
}

bool IdentityReport::all_pass() const
{
    for (const auto& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return !checks.empty();
}

namespace {

IdentityCheck compare(const std::string& name, double direct, double from_f, double tol)
{
    IdentityCheck c;
    c.name = name;
    c.direct = direct;
    c.from_f = from_f;
    const double diff = std::abs(direct - from_f);
    c.rel_error = diff == 0.0 ? 0.0 : diff / std::max(std::abs(direct), 1e-300);
    c.pass = std::isfinite(c.rel_error) && c.rel_error <= tol;
    return c;
}

} // namespace

IdentityReport identity_checks(const Beamspace& beam, const GroupModel& model, double tolerance)
{
    IdentityReport rep;
    const FMatrix f = build_f(beam, model);
    const CMatrix& s = beam.s;
    const Index t = model.length();
    const CMatrix ry = reduced_observation_covariance(model, s);
    const Eigen::LLT<CMatrix> llt(ry);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("identity_checks: observation covariance is not positive definite");
    }

    // (a) det(R_e) / det(R_full) = 1 / det(I + F).
    {
        IdentityCheck c;
        c.name = "error_volume_ratio";
        try {
            const CMatrix re = error_cov_mmse(beam, model);
            const double log_ratio = linalg::logdet_hpd(re) - linalg::logdet_hpd(model.statics.r_full);
            const double ratio_f = std::exp(f.report.log_error_volume_reduction);
            c = compare(c.name, std::exp(log_ratio), ratio_f, tolerance);
        } catch (const ConditioningError&) {
            c.direct = std::nan("");
            c.from_f = std::exp(f.report.log_error_volume_reduction);
            c.rel_error = std::nan("");
            c.pass = false;
        }
        rep.checks.push_back(c);
    }

    // (b) trace of the KLT-coefficient error covariance.
    {
        const CMatrix b = linalg::kron(model.train.complete, s.adjoint());
        const CMatrix g = b * model.basis.upsilon_u;
        const CMatrix re_c = CMatrix::Identity(g.cols(), g.cols()) - g.adjoint() * llt.solve(g);
        rep.checks.push_back(compare("nmse_trace", re_c.trace().real(), f.report.nmse_trace, tolerance));
    }

    // (c) I(h; y_red) = log det R_y - log det(I_T kron S^H R_eta S).
    {
        const CMatrix q = s.adjoint() * model.noise.r_eta * s;
        const double mi = linalg::logdet_hpd(ry) - static_cast<double>(t) * linalg::logdet_hpd(q);
        rep.checks.push_back(compare("mutual_information", mi, f.report.mutual_info, tolerance));
    }
    return rep;
}

std::vector<McResult> monte_carlo_mse(const std::vector<const LinearEstimator*>& estimators,
                                      const std::vector<ErrorTarget>& targets,
                                      const GroupModel& model, const McOptions& opts,
                                      const ScenarioModel* sm)
{
    if (estimators.size() != targets.size()) {
        throw ValidationError("monte_carlo_mse: one target per estimator");
    }
    if (opts.trials < 2) {
        throw ValidationError("monte_carlo_mse: need at least 2 trials");
    }
    if (opts.synthesis == InterferenceSynthesis::Explicit && sm == nullptr) {
        throw ValidationError("monte_carlo_mse: explicit synthesis needs the scenario model");
    }
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        if (targets[e] == ErrorTarget::Full && !estimators[e]->a_full) {
            throw ValidationError("monte_carlo_mse: " + to_string(estimators[e]->kind) +
                                  " has no full-channel map");
        }
    }
    const std::size_t ne = estimators.size();
    const auto trials = static_cast<std::size_t>(opts.trials);
    std::vector<double> err(trials * ne, 0.0);
    const Index n = model.num_elements();
    const Index kl = model.num_users() * model.memory();
    const double k = static_cast<double>(model.num_users());

    auto run_trial = [&](std::size_t i) {
        auto rng = make_stream(opts.seed, opts.stream, i);
        const CVector c = linalg::complex_normal(model.basis.upsilon_u.cols(), 1, rng).col(0);
        const CVector h = model.basis.upsilon_u * c;
        const CVector y = opts.synthesis == InterferenceSynthesis::Statistical
                              ? synthesize_observation(model, h, rng)
                              : synthesize_observation_explicit(model, h, sm->explicit_interferers,
                                                                sm->noise_power, rng);
        for (std::size_t e = 0; e < ne; ++e) {
            const LinearEstimator& est = *estimators[e];
            const CVector yr = reduce_observation(est.s, y);
            double acc = 0.0;
            if (targets[e] == ErrorTarget::Full) {
                acc = (h - *est.a_full * yr).squaredNorm();
            } else {
                const Eigen::Map<const CMatrix> hb(h.data(), n, kl);
                const CMatrix heff = est.s.adjoint() * hb;
                const Eigen::Map<const CVector> z(heff.data(), heff.size());
                acc = (z - est.a_eff * yr).squaredNorm();
            }
            err[i * ne + e] = acc / k;
        }
    };

    const int workers = std::max(1, opts.threads);
    if (workers == 1) {
        for (std::size_t i = 0; i < trials; ++i) {
            run_trial(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trials; i = next++) {
                    run_trial(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<McResult> out(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        double sum = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            sum += err[i * ne + e];
        }
        const double mean = sum / static_cast<double>(trials);
        double ss = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const double dv = err[i * ne + e] - mean;
            ss += dv * dv;
        }
        const double var = ss / static_cast<double>(trials - 1);
        out[e] = McResult{mean, std::sqrt(var / static_cast<double>(trials)), opts.trials};
    }
    return out;
}

McResult monte_carlo_mse(const LinearEstimator& est, const GroupModel& model, ErrorTarget target,
                         const McOptions& opts)
{
    return monte_carlo_mse({&est}, {target}, model, opts).front();
}

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Dimension: return "dimension";
    case SweepAxis::SnrDb: return "snr_db";
    case SweepAxis::InrDb: return "inr_db";
    case SweepAxis::SeparationDeg: return "separation_deg";
    }
    return "dimension";
}

SweepAxis parse_axis(const std::string& s)
{
    if (s == "dimension") return SweepAxis::Dimension;
    if (s == "snr_db" || s == "snr") return SweepAxis::SnrDb;
    if (s == "inr_db" || s == "inr") return SweepAxis::InrDb;
    if (s == "separation_deg" || s == "separation") return SweepAxis::SeparationDeg;
    throw ConfigError("unknown sweep axis '" + s +
                      "' (expected dimension, snr_db, inr_db or separation_deg)");
}

namespace {

const std::vector<std::string> kEstimators = {"rr_mmse_joint",      "rr_mmse_angle",
                                              "ls_angle",           "correlator_rank1",
                                              "correlator_general", "full_wiener",
                                              "full_wiener_noint"};
const std::vector<std::string> kBeams = {"geb", "dft"};

bool is_full_dimensional(const std::string& name)
{
    return name == "full_wiener" || name == "full_wiener_noint";
}

std::string format_value(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

bool is_known_estimator(const std::string& name)
{
    return std::find(kEstimators.begin(), kEstimators.end(), name) != kEstimators.end();
}

bool is_known_beam(const std::string& name)
{
    return std::find(kBeams.begin(), kBeams.end(), name) != kBeams.end();
}

void SweepSpec::validate() const
{
    if (grid.empty()) {
        throw ConfigError("sweep: grid must not be empty");
    }
    for (double v : grid) {
        if (!std::isfinite(v)) {
            throw ConfigError("sweep: grid values must be finite");
        }
        if (axis == SweepAxis::Dimension && (v < 1.0 || v != std::floor(v))) {
            throw ConfigError("sweep: dimension grid values must be positive integers");
        }
    }
    if (estimators.empty()) {
        throw ConfigError("sweep: at least one estimator is required");
    }
    bool needs_beam = false;
    for (const auto& e : estimators) {
        if (!is_known_estimator(e)) {
            throw ConfigError("sweep: unknown estimator '" + e + "'");
        }
        needs_beam = needs_beam || !is_full_dimensional(e);
    }
    for (const auto& b : beams) {
        if (!is_known_beam(b)) {
            throw ConfigError("sweep: unknown beam '" + b + "' (expected geb or dft)");
        }
    }
    if (needs_beam && beams.empty()) {
        throw ConfigError("sweep: reduced-rank estimators need at least one beam");
    }
    if (dim < 1) {
        throw ConfigError("sweep: dim must be >= 1");
    }
    if (mc_trials != 0 && mc_trials < 2) {
        throw ConfigError("sweep: mc_trials must be 0 or >= 2");
    }
    if (normalize_by) {
        const auto pos = normalize_by->find(':');
        const std::string e = normalize_by->substr(0, pos);
        if (!is_known_estimator(e)) {
            throw ConfigError("sweep: normalize_by names unknown estimator '" + e + "'");
        }
        if (pos != std::string::npos) {
            const std::string b = normalize_by->substr(pos + 1);
            if (b != "none" && !is_known_beam(b)) {
                throw ConfigError("sweep: normalize_by names unknown beam '" + b + "'");
            }
        }
    }
}

SweepSpec default_dimension_sweep()
{
    SweepSpec s;
    s.axis = SweepAxis::Dimension;
    for (int d = 4; d <= 20; ++d) {
        s.grid.push_back(d);
    }
    s.estimators = {"rr_mmse_joint", "rr_mmse_angle", "full_wiener_noint"};
    s.beams = {"geb", "dft"};
    s.target = ErrorTarget::Full;
    return s;
}

namespace {

struct PointOutcome {
    std::vector<SweepPoint> rows;
    std::vector<std::string> failures;
};

LinearEstimator make_estimator(const std::string& name, const Beamspace* beam,
                               const GroupModel& model)
{
    if (name == "rr_mmse_joint") return rr_mmse_joint(*beam, model);
    if (name == "rr_mmse_angle") return rr_mmse_angle(*beam, model);
    if (name == "ls_angle") return ls_angle(*beam, model);
    if (name == "correlator_rank1") return correlator_rank1(*beam, model);
    if (name == "correlator_general") return correlator_general(*beam, model);
    return full_wiener(model);
}

PointOutcome evaluate_point(const Scenario& base, const SweepSpec& spec, std::size_t index)
{
    PointOutcome out;
    const double value = spec.grid[index];
    const std::string where = to_string(spec.axis) + "=" + format_value(value) + ": ";

    Scenario sc = base;
    Index d = spec.dim;
    switch (spec.axis) {
    case SweepAxis::Dimension: d = static_cast<Index>(value); break;
    case SweepAxis::SnrDb: sc.snr_db = value; break;
    case SweepAxis::InrDb: sc.inr_db = value; break;
    case SweepAxis::SeparationDeg: sc = separation_scenario(base, value); break;
    }

    ScenarioModel sm;
    try {
        sm = build_scenario_model(sc);
    } catch (const std::exception& ex) {
        out.failures.push_back(where + ex.what());
        return out;
    }
    const GroupModel noint = sm.interference_free();

    std::vector<std::optional<Beamspace>> beams(spec.beams.size());
    std::vector<std::string> beam_errors(spec.beams.size());
    for (std::size_t b = 0; b < spec.beams.size(); ++b) {
        try {
            Beamspace bs = spec.beams[b] == "geb" ? build_geb(sm.model, d) : build_dft(sm.model, d);
            if (spec.target == ErrorTarget::Effective) {
                bs = orthonormalize(bs);
            }
            beams[b] = std::move(bs);
        } catch (const std::exception& ex) {
            beam_errors[b] = ex.what();
        }
    }

    struct Pending {
        SweepPoint row;
        LinearEstimator est;
        ErrorTarget target;
        const GroupModel* model;
    };
    std::vector<Pending> pending;

    for (const std::string& name : spec.estimators) {
        const bool full_dim = is_full_dimensional(name);
        const GroupModel& m = name == "full_wiener_noint" ? noint : sm.model;
        const std::size_t nb = full_dim ? 1 : spec.beams.size();
        for (std::size_t b = 0; b < nb; ++b) {
            const std::string beam_name = full_dim ? "none" : spec.beams[b];
            const std::string tag = where + name + "/" + beam_name + ": ";
            if (!full_dim && !beams[b]) {
                out.failures.push_back(tag + beam_errors[b]);
                continue;
            }
            try {
                LinearEstimator est = make_estimator(name, full_dim ? nullptr : &*beams[b], m);
                const ErrorTarget target = spec.target;
                SweepPoint row;
                row.axis_value = value;
                row.estimator = name;
                row.beam = beam_name;
                row.d_total = est.beam_dim();
                row.mse_analytic = mse_per_user(error_cov_linear(est, m, target), m.num_users());
                Beamspace used;
                used.s = est.s;
                const FMatrix f = build_f(used, m);
                row.mi_nats = f.report.mutual_info;
                row.nmse_trace = f.report.nmse_trace;
                pending.push_back(Pending{row, std::move(est), target, &m});
            } catch (const std::exception& ex) {
                out.failures.push_back(tag + ex.what());
            }
        }
    }

    if (spec.mc_trials > 0) {
        // Common random numbers: one draw sequence per grid point, shared by
        // every estimator evaluated under the same statistics.
        for (const GroupModel* m : std::array<const GroupModel*, 2>{&sm.model, &noint}) {
            std::vector<const LinearEstimator*> ests;
            std::vector<ErrorTarget> targets;
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < pending.size(); ++i) {
                if (pending[i].model == m) {
                    ests.push_back(&pending[i].est);
                    targets.push_back(pending[i].target);
                    idx.push_back(i);
                }
            }
            if (ests.empty()) {
                continue;
            }
            McOptions opts;
            opts.trials = spec.mc_trials;
            opts.seed = base.seed;
            opts.stream = static_cast<std::uint64_t>(index) * 2 + (m == &noint ? 1 : 0);
            opts.synthesis = m == &noint ? InterferenceSynthesis::Statistical : spec.synthesis;
            try {
                const auto mc = monte_carlo_mse(ests, targets, *m, opts, &sm);
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    pending[idx[j]].row.mse_mc = mc[j].mean;
                    pending[idx[j]].row.mc_std = mc[j].std_error;
                }
            } catch (const std::exception& ex) {
                out.failures.push_back(where + "monte carlo: " + ex.what());
            }
        }
    }

    for (auto& p : pending) {
        out.rows.push_back(std::move(p.row));
    }

    if (spec.normalize_by) {
        const auto pos = spec.normalize_by->find(':');
        const std::string be = spec.normalize_by->substr(0, pos);
        const std::string bb =
            pos == std::string::npos ? std::string("none") : spec.normalize_by->substr(pos + 1);
        const SweepPoint* ref = nullptr;
        for (const auto& r : out.rows) {
            if (r.estimator == be && r.beam == bb) {
                ref = &r;
            }
        }
        if (ref == nullptr || !(ref->mse_analytic > 0.0)) {
            out.failures.push_back(where + "normalization reference " + *spec.normalize_by +
                                   " unavailable");
            out.rows.clear();
            return out;
        }
        const double a = ref->mse_analytic;
        const std::optional<double> mc = ref->mse_mc;
        for (auto& r : out.rows) {
            r.mse_analytic /= a;
            if (r.mse_mc && mc && *mc > 0.0) {
                r.mse_mc = *r.mse_mc / *mc;
                r.mc_std = *r.mc_std / *mc;
            }
        }
    }
    return out;
}

} // namespace

SweepResult run_sweep(const Scenario& scenario, const SweepSpec& spec, int threads)
{
    spec.validate();
    scenario.validate();
    const std::size_t np = spec.grid.size();
    std::vector<PointOutcome> outcomes(np);
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(np)));
    if (workers == 1) {
        for (std::size_t i = 0; i < np; ++i) {
            outcomes[i] = evaluate_point(scenario, spec, i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < np; i = next++) {
                    outcomes[i] = evaluate_point(scenario, spec, i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    SweepResult res;
    res.axis = spec.axis;
    for (auto& o : outcomes) {
        for (auto& r : o.rows) {
            res.points.push_back(std::move(r));
        }
        for (auto& f : o.failures) {
            res.failures.push_back(std::move(f));
        }
    }
    return res;
}

} // namespace rrce
