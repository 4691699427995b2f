#include "cantor/symbolic.hpp"

#include <algorithm>
#include <numeric>

namespace cantor {
namespace {

// square boolean matrix as bitset rows
struct BoolMat {
  int n = 0;
  int words = 0;
  std::vector<uint64_t> bits;  // row-major blocks

  explicit BoolMat(int n) : n(n), words((n + 63) / 64), bits(size_t(n) * words, 0) {}
  uint64_t* row(int i) { return bits.data() + size_t(i) * words; }
  const uint64_t* row(int i) const { return bits.data() + size_t(i) * words; }
  void set(int i, int j) { row(i)[j >> 6] |= (uint64_t{1} << (j & 63)); }
  bool get(int i, int j) const { return (row(i)[j >> 6] >> (j & 63)) & 1; }

  bool all_positive() const {
    for (int i = 0; i < n; ++i) {
      const uint64_t* r = row(i);
      for (int w = 0; w < words; ++w) {
        uint64_t want = (w + 1 < words || (n & 63) == 0)
                            ? ~uint64_t{0}
                            : ((uint64_t{1} << (n & 63)) - 1);
        if ((r[w] & want) != want) return false;
      }
    }
    return true;
  }

  bool trace_nonzero() const {
    for (int i = 0; i < n; ++i)
      if (get(i, i)) return true;
    return false;
  }

  friend BoolMat multiply(const BoolMat& a, const BoolMat& b) {
    BoolMat c(a.n);
    for (int i = 0; i < a.n; ++i) {
      uint64_t* ci = c.row(i);
      const uint64_t* ai = a.row(i);
      for (int k = 0; k < a.n; ++k) {
        if ((ai[k >> 6] >> (k & 63)) & 1) {
          const uint64_t* bk = b.row(k);
          for (int w = 0; w < a.words; ++w) ci[w] |= bk[w];
        }
      }
    }
    return c;
  }
};

BoolMat adjacency(const DirectedGraph& g) {
  BoolMat m(g.order());
  for (auto [u, v] : g.edges()) m.set(u, v);
  return m;
}

// m-th power via the cached doubling ladder
BoolMat power(const std::vector<BoolMat>& doubling, long m) {
  BoolMat acc(doubling[0].n);
  for (int i = 0; i < acc.n; ++i) acc.set(i, i);
  for (size_t b = 0; b < doubling.size(); ++b)
    if ((m >> b) & 1) acc = multiply(acc, doubling[b]);
  return acc;
}

}  // namespace

DirectedGraph::DirectedGraph(std::vector<std::string> vertices,
                             std::vector<std::pair<int, int>> edges)
    : names_(std::move(vertices)), edges_(std::move(edges)) {
  const int n = static_cast<int>(names_.size());
  if (n == 0) throw CantorError(ErrorKind::usage, "graph", "graph has no vertices");
  {
    auto sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw CantorError(ErrorKind::usage, "graph", "duplicate vertex name");
  }
  for (auto [u, v] : edges_)
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw CantorError(ErrorKind::usage, "graph", "edge endpoint out of range");
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  out_.assign(n, {});
  in_.assign(n, {});
  for (auto [u, v] : edges_) {
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  for (int v = 0; v < n; ++v)
    if (out_[v].empty()) throw DegreeViolation(names_[v], "out");
  for (int v = 0; v < n; ++v)
    if (in_[v].empty()) throw DegreeViolation(names_[v], "in");
}

DirectedGraph DirectedGraph::from_names(
    std::vector<std::string> vertices,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(edges.size());
  auto find = [&](const std::string& s) {
    for (size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == s) return static_cast<int>(i);
    throw CantorError(ErrorKind::usage, "graph", "unknown vertex '" + s + "'");
  };
  for (const auto& [a, b] : edges) idx.emplace_back(find(a), find(b));
  return DirectedGraph(std::move(vertices), std::move(idx));
}

int DirectedGraph::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

bool DirectedGraph::has_edge(int u, int v) const {
  const auto& o = out_.at(u);
  return std::binary_search(o.begin(), o.end(), v);
}

nlohmann::json DirectedGraph::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (auto [u, v] : edges_) e.push_back({names_[u], names_[v]});
  return {{"vertices", names_}, {"edges", e}};
}

DirectedGraph DirectedGraph::from_json(const nlohmann::json& j) {
  std::vector<std::string> vs = j.at("vertices").get<std::vector<std::string>>();
  std::vector<std::pair<std::string, std::string>> es;
  for (const auto& e : j.at("edges"))
    es.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  return from_names(std::move(vs), es);
}

std::string DirectedGraph::to_dot() const {
  std::string s = "digraph sft {\n";
  for (const auto& n : names_) s += "  \"" + n + "\";\n";
  for (auto [u, v] : edges_)
    s += "  \"" + names_[u] + "\" -> \"" + names_[v] + "\";\n";
  return s + "}\n";
}

nlohmann::json MixingCertificate::to_json() const {
  nlohmann::json j;
  j["primitive"] = primitive;
  if (primitive) {
    j["exponent"] = exponent;
  } else {
    j["strongly_connected"] = strongly_connected;
    if (period > 0) j["period"] = period;
    j["reason"] = reason;
  }
  return j;
}

nlohmann::json PeriodSpectrum::to_json() const {
  nlohmann::json j;
  j["bound"] = bound;
  j["present"] = present;
  if (full_tail_from) j["full_tail_from"] = *full_tail_from;
  return j;
}

MixingCertificate mixing_certificate(const DirectedGraph& g) {
  const int n = g.order();
  const long wielandt = static_cast<long>(n - 1) * (n - 1) + 1;
  MixingCertificate cert;

  BoolMat a = adjacency(g);
  std::vector<BoolMat> doubling{a};
  long reach = 1;
  bool positive_somewhere = doubling.back().all_positive();
  while (!positive_somewhere && reach < wielandt) {
    doubling.push_back(multiply(doubling.back(), doubling.back()));
    reach *= 2;
    positive_somewhere = doubling.back().all_positive();
  }

  if (positive_somewhere) {
    // all-positive is upward closed (indegrees >= 1), so binary-search the
    // least all-positive power below the first one the doubling ladder hit
    long hi = reach;  // A^hi all positive
    long lo = 1;      // A^(lo-1) not known positive
    while (lo < hi) {
      long mid = lo + (hi - lo) / 2;
      if (power(doubling, mid).all_positive())
        hi = mid;
      else
        lo = mid + 1;
    }
    cert.primitive = true;
    cert.exponent = static_cast<int>(lo);
    if (lo > wielandt)
      throw CantorError(ErrorKind::verification, "mixing",
                        "exponent exceeds the Wielandt bound");
    if (lo > 1 && power(doubling, lo - 1).all_positive())
      throw CantorError(ErrorKind::verification, "mixing",
                        "exponent not minimal");
    return cert;
  }

  // not primitive: strongly connected? (degree invariant holds, so BFS both ways)
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      const auto& nb = forward ? g.out(v) : g.in(v);
      for (int w : nb)
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  cert.strongly_connected = reach_all(true) && reach_all(false);
  if (!cert.strongly_connected) {
    cert.reason = "not strongly connected";
    return cert;
  }
  // cycle gcd from BFS levels
  std::vector<int> level(n, -1);
  level[0] = 0;
  std::vector<int> queue{0};
  int gcd = 0;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int w : g.out(v)) {
      if (level[w] < 0) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      }
    }
  }
  for (auto [u, v] : g.edges()) gcd = std::gcd(gcd, level[u] + 1 - level[v]);
  cert.period = gcd;
  cert.reason = "cycle lengths share period " + std::to_string(gcd);
  return cert;
}

PeriodSpectrum period_spectrum(const DirectedGraph& g, int bound) {
  PeriodSpectrum s;
  s.bound = bound;
  BoolMat a = adjacency(g);
  BoolMat p = a;
  for (int n = 1; n <= bound; ++n) {
    if (n > 1) p = multiply(p, a);
    if (p.trace_nonzero()) s.present.insert(n);
  }
  MixingCertificate cert = mixing_certificate(g);
  if (cert.primitive) s.full_tail_from = cert.exponent + g.order();
  return s;
}

std::vector<Word> Sft::language(int l) const {
  std::vector<Word> out;
  if (l <= 0) return out;
  Word w;
  w.reserve(l);
  // vertex indices are the declared order, so plain DFS emits lexicographically
  auto dfs = [&](auto&& self, int v) -> void {
    w.push_back(v);
    if (static_cast<int>(w.size()) == l) {
      out.push_back(w);
    } else {
      for (int u : graph_.out(v)) self(self, u);
    }
    w.pop_back();
  };
  for (int v = 0; v < graph_.order(); ++v) dfs(dfs, v);
  return out;
}

bool Sft::allowed(const Word& w) const {
  for (int v : w)
    if (v < 0 || v >= graph_.order()) return false;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!graph_.has_edge(w[i], w[i + 1])) return false;
  return !w.empty();
}

CantorCheck cantor_check(const Sft& s) {
  CantorCheck c;
  MixingCertificate m = mixing_certificate(s.graph());
  if (!m.primitive) {
    c.reason = "not mixing: " + m.reason;
    return c;
  }
  if (s.graph().order() < 2) {
    c.reason = "single point";
    return c;
  }
  c.yes = true;  // primitive with >= 2 vertices: language grows, no isolated points
  return c;
}

DirectedGraph golden_mean_graph() {
  return DirectedGraph::from_names({"a", "b"}, {{"a", "a"}, {"a", "b"}, {"b", "a"}});
}

DirectedGraph full_graph(int n) {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, char('a' + i)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges.emplace_back(i, j);
  return DirectedGraph(std::move(names), std::move(edges));
}

DirectedGraph cycle_graph(int n) {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) names.push_back("c" + std::to_string(i));
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return DirectedGraph(std::move(names), std::move(edges));
}

DirectedGraph two_cycle_union_graph(int a, int b) {
  // cycles of lengths a and b through a shared vertex "c"
  std::vector<std::string> names{"c"};
  std::vector<std::pair<int, int>> edges;
  int prev = 0;
  for (int i = 1; i < a; ++i) {
    names.push_back("a" + std::to_string(i));
    edges.emplace_back(prev, static_cast<int>(names.size()) - 1);
    prev = static_cast<int>(names.size()) - 1;
  }
  edges.emplace_back(prev, 0);
  prev = 0;
  for (int i = 1; i < b; ++i) {
    names.push_back("b" + std::to_string(i));
    edges.emplace_back(prev, static_cast<int>(names.size()) - 1);
    prev = static_cast<int>(names.size()) - 1;
  }
  edges.emplace_back(prev, 0);
  return DirectedGraph(std::move(names), std::move(edges));
}

std::string word_str(const DirectedGraph& g, const Word& w) {
  bool single = true;
  for (const auto& n : g.vertex_names())
    if (n.size() != 1) single = false;
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (!single && i) s += ".";
    s += g.name(w[i]);
  }
  return s;
}

}  // namespace cantor
