// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "rrce/common.hpp"

namespace rrce::testing {

inline double max_abs(const CMatrix& a, const CMatrix& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_fro(const CMatrix& a, const CMatrix& ref)
{
    return (a - ref).norm() / std::max(ref.norm(), 1e-300);
}

/// Element-wise 3-sigma check of an empirical mean of complex products
/// against its expectation, with sigma estimated from the sample.
inline bool within_sigma(double diff, double sigma, double k = 3.0)
{
    return std::abs(diff) <= k * sigma + 1e-12;
}

} // namespace rrce::testing
