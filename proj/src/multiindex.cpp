#include "gravcs/multiindex.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace gravcs {

int binomial(int n, int q) {
  if (q < 0 || q > n) return 0;
  long long r = 1;
  for (int i = 0; i < q; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(r);
}

const std::vector<std::array<int, 4>>& combinations(int n, int q) {
  static std::map<std::pair<int, int>, std::vector<std::array<int, 4>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(n, q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<std::array<int, 4>> out;
  std::array<int, 4> c{};
  // lexicographic enumeration of q-subsets of {0..n-1}
  std::vector<int> idx(q);
  for (int i = 0; i < q; ++i) idx[i] = i;
  if (q == 0) {
    out.push_back(c);
  } else {
    while (true) {
      for (int i = 0; i < q; ++i) c[i] = idx[i];
      out.push_back(c);
      int i = q - 1;
      while (i >= 0 && idx[i] == n - q + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < q; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int combo_position(int n, int q, const int* combo, int len) {
  if (len != q) throw std::logic_error("combo length mismatch");
  const auto& all = combinations(n, q);
  for (int p = 0; p < static_cast<int>(all.size()); ++p) {
    bool eq = true;
    for (int i = 0; i < q; ++i)
      if (all[p][i] != combo[i]) { eq = false; break; }
    if (eq) return p;
  }
  throw std::logic_error("combination not found");
}

const std::vector<MergeEntry>& wedge_table(int n, int q1, int q2) {
  static std::map<std::tuple<int, int, int>, std::vector<MergeEntry>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple(n, q1, q2);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const auto& c1s = combinations(n, q1);
  const auto& c2s = combinations(n, q2);
  std::vector<MergeEntry> tab(c1s.size() * c2s.size());
  for (size_t a = 0; a < c1s.size(); ++a) {
    for (size_t b = 0; b < c2s.size(); ++b) {
      MergeEntry e{0, 0};
      int seq[8];
      for (int i = 0; i < q1; ++i) seq[i] = c1s[a][i];
      for (int i = 0; i < q2; ++i) seq[q1 + i] = c2s[b][i];
      int m = q1 + q2;
      bool dup = false;
      for (int i = 0; i < m && !dup; ++i)
        for (int j = i + 1; j < m; ++j)
          if (seq[i] == seq[j]) { dup = true; break; }
      if (!dup) {
        int inv = 0;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j)
            if (seq[i] > seq[j]) ++inv;
        int sorted[8];
        for (int i = 0; i < m; ++i) sorted[i] = seq[i];
        for (int i = 1; i < m; ++i) {  // insertion sort, m <= 8
          int v = sorted[i], j = i - 1;
          while (j >= 0 && sorted[j] > v) { sorted[j + 1] = sorted[j]; --j; }
          sorted[j + 1] = v;
        }
        e.sign = (inv % 2 == 0) ? +1 : -1;
        e.pos = combo_position(n, m, sorted, m);
      }
      tab[a * c2s.size() + b] = e;
    }
  }
  return cache.emplace(key, std::move(tab)).first->second;
}

}  // namespace gravcs
