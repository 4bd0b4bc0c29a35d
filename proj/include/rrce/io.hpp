// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "rrce/beamspace.hpp"
#include "rrce/evaluation.hpp"
#include "rrce/training.hpp"

namespace rrce::io {

/// Shortest round-trip decimal representation ('.' decimal point, no locale).
/// Throws NumericalError for NaN or infinity.
std::string format_double(double v);

/// Sweep CSV: axis_name, axis_value, estimator, beam, d_total, mse_analytic,
/// mse_analytic_db, mse_mc, mc_std, mi_nats, nmse_trace. Missing values are
/// empty fields.
std::string sweep_csv(const SweepResult& result);

/// Beam pattern CSV: theta_deg, gain_db_col<j>..., gain_db_aggregate.
std::string pattern_csv(const BeamPattern& pattern);

/// Pilot CSV: user, n, re, im.
std::string pilot_csv(const PilotSet& pilots);

/// Writes the whole string or throws IoError naming the path.
void write_file(const std::string& path, const std::string& content);

/// Formats first, so a non-finite value aborts before anything is written.
void write_sweep_csv(const SweepResult& result, const std::string& path);

} // namespace rrce::io
