// Independent brute-force oracles used to pin expected values in the tests.
// Everything here is written against the definitions directly (dense matrix
// powers, path enumeration, sequence simulation) and deliberately shares no
// code with the library.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracles {

// dense boolean adjacency matrix powers, no bitset tricks
struct DenseMat {
  int n;
  std::vector<std::vector<bool>> a;
  explicit DenseMat(int n) : n(n), a(n, std::vector<bool>(n, false)) {}
  static DenseMat from_edges(int n, const std::vector<std::pair<int, int>>& es) {
    DenseMat m(n);
    for (auto& [u, v] : es) m.a[u][v] = true;
    return m;
  }
  DenseMat mul(const DenseMat& o) const {
    DenseMat r(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (a[i][k])
          for (int j = 0; j < n; ++j)
            if (o.a[k][j]) r.a[i][j] = true;
    return r;
  }
  bool all_positive() const {
    for (auto& row : a)
      for (bool b : row)
        if (!b) return false;
    return true;
  }
  bool trace_nonzero() const {
    for (int i = 0; i < n; ++i)
      if (a[i][i]) return true;
    return false;
  }
};

// least N <= cap such that A^N is all-positive, scanning every power
inline std::optional<int> primitive_exponent(const DenseMat& a, int cap) {
  DenseMat p = a;
  for (int e = 1; e <= cap; ++e) {
    if (p.all_positive()) return e;
    p = p.mul(a);
  }
  return std::nullopt;
}

// set of n <= bound with a closed path of length n, by trace of powers
inline std::set<int> closed_path_lengths(const DenseMat& a, int bound) {
  std::set<int> out;
  DenseMat p = a;
  for (int l = 1; l <= bound; ++l) {
    if (p.trace_nonzero()) out.insert(l);
    p = p.mul(a);
  }
  return out;
}

// all length-l vertex paths, as index words, lex order
inline std::vector<std::vector<int>> enumerate_paths(const DenseMat& a, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == l) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v < a.n; ++v) {
      if (!cur.empty() && !a.a[cur.back()][v]) continue;
      cur.push_back(v);
      self(self, depth + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// --- sequence-space maps, simulated directly on explicit bit strings ---

// one-sided shift
inline std::string shift_bits(const std::string& x) { return x.substr(1); }

// dyadic odometer, least significant bit first: add one with carry
inline std::string odometer_bits(std::string x) {
  for (auto& c : x) {
    if (c == '0') {
      c = '1';
      return x;
    }
    c = '0';
  }
  return x;  // all ones within the window: carry escapes it
}

inline std::string flip_bits(std::string x) {
  for (auto& c : x) c = (c == '0') ? '1' : '0';
  return x;
}

// first index where two bit strings disagree, or -1 if equal on overlap
inline int first_disagreement(const std::string& a, const std::string& b) {
  size_t m = std::min(a.size(), b.size());
  for (size_t i = 0; i < m; ++i)
    if (a[i] != b[i]) return static_cast<int>(i);
  return -1;
}

// expand an eventually periodic description to n bits
inline std::string expand(const std::string& pre, const std::string& per, int n) {
  std::string s = pre;
  while (static_cast<int>(s.size()) < n) s += per;
  return s.substr(0, n);
}

// membership table of a union of cylinders at a fixed depth
inline std::set<std::string> cylinder_table(const std::vector<std::string>& words,
                                            int depth) {
  std::set<std::string> out;
  std::vector<std::string> stack;
  auto all = [&](auto&& self, std::string cur) -> void {
    if (static_cast<int>(cur.size()) == depth) {
      for (const auto& w : words)
        if (cur.compare(0, w.size(), w) == 0) {
          out.insert(cur);
          break;
        }
      return;
    }
    self(self, cur + "0");
    self(self, cur + "1");
  };
  all(all, "");
  return out;
}

inline bool is_j_periodic(const std::vector<int>& w, int j) {
  for (size_t i = 0; i + j < w.size(); ++i)
    if (w[i] != w[i + j]) return false;
  return true;
}

}  // namespace oracles
