// SPDX-License-Identifier: Apache-2.0
#include "smith.hpp"

#include <utility>

namespace abelia::detail {

Diagonalization diagonalize(std::vector<std::vector<mpz_class>> a) {
  const int m = static_cast<int>(a.size());
  const int n = m ? static_cast<int>(a[0].size()) : 0;
  Diagonalization out;
  out.v.assign(n, std::vector<mpz_class>(n, 0));
  for (int i = 0; i < n; ++i) out.v[i][i] = 1;

  auto swap_cols = [&](int c1, int c2) {
    if (c1 == c2) return;
    for (int i = 0; i < m; ++i) std::swap(a[i][c1], a[i][c2]);
    for (int i = 0; i < n; ++i) std::swap(out.v[i][c1], out.v[i][c2]);
  };
  // col_j -= f * col_t
  auto sub_col = [&](int j, int t, const mpz_class& f) {
    for (int i = 0; i < m; ++i) a[i][j] -= f * a[i][t];
    for (int i = 0; i < n; ++i) out.v[i][j] -= f * out.v[i][t];
  };

  for (int t = 0; t < std::min(m, n); ++t) {
    // smallest nonzero entry of the trailing block becomes the pivot
    int pr = -1, pc = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (a[i][j] != 0 && (pr < 0 || abs(a[i][j]) < abs(a[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr < 0) break;
    std::swap(a[t], a[pr]);
    swap_cols(t, pc);
    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (a[i][t] == 0) continue;
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        for (int j = t; j < n; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (a[t][j] == 0) continue;
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        sub_col(j, t, q);
        if (a[t][j] != 0) clean = false;
      }
      if (clean) break;
      // move the smallest remainder in row/column t to the pivot
      int br = t, bc = t;
      for (int i = t + 1; i < m; ++i)
        if (a[i][t] != 0 && abs(a[i][t]) < abs(a[br][bc])) {
          br = i;
          bc = t;
        }
      for (int j = t + 1; j < n; ++j)
        if (a[t][j] != 0 && abs(a[t][j]) < abs(a[br][bc])) {
          br = t;
          bc = j;
        }
      std::swap(a[t], a[br]);
      swap_cols(t, bc);
    }
    out.d.push_back(a[t][t]);
  }
  return out;
}

}  // namespace abelia::detail
