// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace abelia::tol {

inline constexpr double kEqual = 1e-10;     // equality assertions
inline constexpr double kSlack = 1e-9;      // one-sided inequalities
inline constexpr double kRank = 1e-8;       // Gram-Schmidt / SVD rank cutoff
inline constexpr double kBounded = 1e-12;   // sup-norm excess allowed for 1-bounded inputs

}  // namespace abelia::tol
