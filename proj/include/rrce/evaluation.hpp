// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrce/beamspace.hpp"
#include "rrce/estimators.hpp"
#include "rrce/interference.hpp"
#include "rrce/model.hpp"

namespace rrce {

/// Simulation scenario: the intended group, the groups interfering with it,
/// training and power levels.
struct Scenario {
    ArrayGeometry geom;
    GroupSpec intended;
    std::vector<Interferer> interferers;
    Index training_length = 6;     // T
    double snr_db = 30.0;          // 10 log10(E_s / N_0)
    double noise_power = 1.0;      // N_0
    std::optional<double> inr_db;  // when set, every gamma = 10^(inr/10) N_0 / E_s
    double energy_fraction = 0.999;
    int quad_points = 0;  // 0 selects default_quad_points(N)
    std::uint64_t seed = 1;

    double energy() const { return noise_power * db_to_linear(snr_db); }
    double gamma_for(const Interferer& in) const;
    int quadrature() const;
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// N = 100 ULA, intended group of 2 users over 3 delays (two on [-1, 1] deg,
/// one on [5, 7] deg), seven 3-user interferer groups, T = 6, snr = 30 dB.
Scenario default_scenario();

/// Two-group scenario: intended group K = 2, L = 2 on [-1, 1] deg and one
/// K = 3, L = 2 interferer on [c - 1, c + 1] deg. Power and training settings
/// are taken from `base`.
Scenario separation_scenario(const Scenario& base, double center_deg);

/// A scenario's derived statistics.
struct ScenarioModel {
    GroupModel model;
    NoiseCovariance thermal;  // N_0 I
    std::vector<std::vector<SpatialCovariance>> interferer_covs;
    std::vector<ExplicitInterferer> explicit_interferers;
    double energy = 1.0;
    double noise_power = 1.0;

    /// The intended group's model with interference removed.
    GroupModel interference_free() const { return with_noise(model, thermal); }
};

ScenarioModel build_scenario_model(const Scenario& scenario);

enum class ErrorTarget { Full, Effective };

std::string to_string(ErrorTarget t);

/// Cross covariance E[z y_red^H] and prior covariance E[z z^H] of the target
/// z (h or (I kron S^H) h) for beam S.
CMatrix target_cross_covariance(const GroupModel& model, const CMatrix& s, ErrorTarget target);
CMatrix target_covariance(const GroupModel& model, const CMatrix& s, ErrorTarget target);

/// Covariance of y_red = (I_T kron S^H) y: sum_l R_code(l) kron rho_l S^H R_l S + I_T kron S^H R_eta S.
CMatrix reduced_observation_covariance(const GroupModel& model, const CMatrix& s);

/// Covariance of the unreduced observation y (N T x N T).
CMatrix observation_covariance(const GroupModel& model);

/// MMSE error covariance of h from y_red:
/// R_full - R_full B^H R_y^{-1} B R_full with B = X kron S^H.
CMatrix error_cov_mmse(const Beamspace& beam, const GroupModel& model);

/// Error covariance of an arbitrary linear estimator,
/// R_z - A C^H - C A^H + A R_y A^H. Full target requires `a_full`.
CMatrix error_cov_linear(const LinearEstimator& est, const GroupModel& model, ErrorTarget target);

/// R_e^mmse + (W - W_mmse) R_y (W - W_mmse)^H on the unreduced observation.
CMatrix error_cov_excess_form(const CMatrix& w, const CMatrix& w_mmse, const CMatrix& r_e_mmse,
                              const CMatrix& r_y);

/// Tr(R_e) / K.
double mse_per_user(const CMatrix& r_e, Index num_users);

struct IdentityCheck {
    std::string name;
    double direct = 0.0;
    double from_f = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_pass() const;
};

/// Error volume (determinant form), nMSE trace form and mutual information,
/// each computed directly and from the eigenvalues of F. The determinant
/// check needs R_full of full rank.
IdentityReport identity_checks(const Beamspace& beam, const GroupModel& model,
                               double tolerance = 1e-8);

struct McResult {
    double mean = 0.0;
    double std_error = 0.0;
    Index trials = 0;
};

enum class InterferenceSynthesis { Statistical, Explicit };

struct McOptions {
    Index trials = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    int threads = 1;
    InterferenceSynthesis synthesis = InterferenceSynthesis::Statistical;
};

/// Monte Carlo MSE (|z - z_hat|^2 / K) of several estimators on common
/// channel and noise draws. Explicit synthesis needs `sm`.
std::vector<McResult> monte_carlo_mse(const std::vector<const LinearEstimator*>& estimators,
                                      const std::vector<ErrorTarget>& targets,
                                      const GroupModel& model, const McOptions& opts,
                                      const ScenarioModel* sm = nullptr);

McResult monte_carlo_mse(const LinearEstimator& est, const GroupModel& model, ErrorTarget target,
                         const McOptions& opts);

enum class SweepAxis { Dimension, SnrDb, InrDb, SeparationDeg };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Dimension;
    std::vector<double> grid;
    /// rr_mmse_joint, rr_mmse_angle, ls_angle, correlator_rank1,
    /// correlator_general, full_wiener, full_wiener_noint
    std::vector<std::string> estimators;
    std::vector<std::string> beams;  // geb, dft
    Index dim = 8;                   // D for axes other than Dimension
    ErrorTarget target = ErrorTarget::Full;
    /// "estimator:beam" whose MSE divides every row at the same grid point.
    std::optional<std::string> normalize_by;
    Index mc_trials = 0;
    InterferenceSynthesis synthesis = InterferenceSynthesis::Statistical;

    void validate() const;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct SweepPoint {
    double axis_value = 0.0;
    std::string estimator;
    std::string beam;  // "none" for the full-dimensional estimators
    Index d_total = 0;
    double mse_analytic = 0.0;
    std::optional<double> mse_mc;
    std::optional<double> mc_std;
    std::optional<double> mi_nats;
    std::optional<double> nmse_trace;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::Dimension;
    std::vector<SweepPoint> points;
    std::vector<std::string> failures;
};

/// Evaluates every (grid point, estimator, beam) combination. Grid points run
/// in parallel on `threads` workers; output order is grid, estimator, beam.
SweepResult run_sweep(const Scenario& scenario, const SweepSpec& spec, int threads = 1);

/// Dimension sweep on the default scenario: D = 4..20, joint and angle RR-MMSE with GEB and
/// DFT beams plus the interference-free full-dimensional Wiener benchmark.
SweepSpec default_dimension_sweep();

bool is_known_estimator(const std::string& name);
bool is_known_beam(const std::string& name);

} // namespace rrce
