// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <vector>

namespace abelia::detail {

// U A V = diag(d) with U, V unimodular. Only V is tracked; d holds the
// nonzero diagonal entries in order (they need not divide each other).
struct Diagonalization {
  std::vector<mpz_class> d;
  std::vector<std::vector<mpz_class>> v;  // n x n
};

Diagonalization diagonalize(std::vector<std::vector<mpz_class>> a);

}  // namespace abelia::detail
