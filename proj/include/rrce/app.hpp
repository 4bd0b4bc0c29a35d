// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>

#include "rrce/config.hpp"

namespace rrce {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Maps an exception onto the CLI exit code.
int exit_code_for(const std::exception& e);

/// Executes the configured command, writing outputs and the effective-config
/// snapshot into `config.output_dir`. Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

} // namespace rrce
