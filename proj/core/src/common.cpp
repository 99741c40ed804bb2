#include "phasebundle/common.hpp"

namespace phasebundle {

static void extend_indices(std::vector<MultiIndex>& out, MultiIndex& cur, int pos,
                           int remaining, bool exact) {
  const int n = static_cast<int>(cur.size());
  if (pos == n - 1) {
    cur[pos] = exact ? remaining : 0;
    if (exact) {
      out.push_back(cur);
    } else {
      for (int k = 0; k <= remaining; ++k) {
        cur[pos] = k;
        out.push_back(cur);
      }
    }
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    extend_indices(out, cur, pos + 1, remaining - k, exact);
  }
}

std::vector<MultiIndex> multiindices_of_degree(int n, int degree) {
  if (n <= 0 || degree < 0) throw DomainError("multiindices_of_degree: need n > 0, degree >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  extend_indices(out, cur, 0, degree, true);
  return out;
}

std::vector<MultiIndex> multiindices_up_to(int n, int max_total) {
  if (n <= 0 || max_total < 0) throw DomainError("multiindices_up_to: need n > 0, max_total >= 0");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= max_total; ++d) {
    auto layer = multiindices_of_degree(n, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace phasebundle
