#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace gravcs {

// Antisymmetric multi-index bookkeeping for form components.  A q-form on an
// n-dim grid stores one coefficient per sorted index combination
// i1 < ... < iq; wedge products and exterior derivatives need the permutation
// sign when merging index sets.  All tables are tiny (n <= 4) and cached.

int binomial(int n, int q);

// sorted combinations of {0..n-1} of size q, in lexicographic order
const std::vector<std::array<int, 4>>& combinations(int n, int q);

// position of a sorted combination in combinations(n,q)
int combo_position(int n, int q, const int* combo, int len);

struct MergeEntry {
  int sign;  // 0 if the sets overlap; else permutation sign of the merge
  int pos;   // component position of the merged sorted combination
};

// table for wedging a q1-form into a q2-form: entry(c1, c2) with
// c1 < C(n,q1), c2 < C(n,q2)
const std::vector<MergeEntry>& wedge_table(int n, int q1, int q2);

// table for the exterior derivative: entry(axis, c) = merge of {axis} with
// the c-th q-combination (same layout as wedge_table(n, 1, q))
inline const std::vector<MergeEntry>& deriv_table(int n, int q) {
  return wedge_table(n, 1, q);
}

}  // namespace gravcs
