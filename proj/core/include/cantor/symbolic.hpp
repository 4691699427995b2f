// Vertex shifts of finite type: directed graphs with the standing degree
// assumption (every vertex has an incoming and an outgoing edge), Bowen's
// primitivity criterion with exact exponent, periodic-point spectra via
// boolean matrix traces, and path-language enumeration.
//
// Every graph carries a declared total order on its vertices (the
// construction order); all lexicographic tie-breaks use it.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/errors.hpp"

namespace cantor {

using Word = std::vector<int>;  // symbols are indices into the declared order

class DirectedGraph {
 public:
  // validates: distinct names, edges in range, deduplicated, in/outdegree >= 1
  DirectedGraph(std::vector<std::string> vertices,
                std::vector<std::pair<int, int>> edges);
  static DirectedGraph from_names(
      std::vector<std::string> vertices,
      const std::vector<std::pair<std::string, std::string>>& edges);

  int order() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::string& name(int v) const { return names_.at(v); }
  int index_of(const std::string& name) const;  // -1 if absent

  bool has_edge(int u, int v) const;
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& out(int u) const { return out_.at(u); }   // sorted
  const std::vector<int>& in(int v) const { return in_.at(v); }     // sorted

  bool operator==(const DirectedGraph& o) const {
    return names_ == o.names_ && edges_ == o.edges_;
  }

  nlohmann::json to_json() const;
  static DirectedGraph from_json(const nlohmann::json& j);
  std::string to_dot() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::pair<int, int>> edges_;  // sorted, deduplicated
  std::vector<std::vector<int>> out_, in_;
};

struct MixingCertificate {
  bool primitive = false;
  // primitive: least N with all pairs joined by paths of every length n >= N.
  // Always <= the Wielandt bound (|V|-1)^2 + 1 (checked, not assumed).
  int exponent = 0;
  // not primitive: why
  bool strongly_connected = false;
  int period = 0;  // gcd of cycle lengths when strongly connected, else 0
  std::string reason;  // "" when primitive

  nlohmann::json to_json() const;
};

struct PeriodSpectrum {
  int bound = 0;
  std::set<int> present;               // { n <= bound : closed path of length n }
  std::optional<int> full_tail_from;   // every n >= this is present (primitive case)

  bool contains(int n) const { return present.count(n) > 0; }
  nlohmann::json to_json() const;
};

// cylinder [base] starting at coordinate `start` in a two-sided shift space
struct TwoSidedCylinder {
  long start = 0;
  Word base;
};

MixingCertificate mixing_certificate(const DirectedGraph& g);
PeriodSpectrum period_spectrum(const DirectedGraph& g, int bound);

class Sft {
 public:
  explicit Sft(DirectedGraph g) : graph_(std::move(g)) {}
  const DirectedGraph& graph() const { return graph_; }

  // all vertex words of length l that are paths, lexicographic in the
  // declared vertex order
  std::vector<Word> language(int l) const;
  bool allowed(const Word& w) const;
  bool nonempty(const TwoSidedCylinder& c) const { return allowed(c.base); }

 private:
  DirectedGraph graph_;
};

struct CantorCheck {
  bool yes = false;
  std::string reason;  // "" when yes; else "not mixing: ..." or "single point"
};
CantorCheck cantor_check(const Sft& s);

// canonical small systems used across tests and the CLI
DirectedGraph golden_mean_graph();                    // {a,b}, edges aa ab ba
DirectedGraph full_graph(int n);                      // complete graph on n vertices
DirectedGraph cycle_graph(int n);                     // single n-cycle
DirectedGraph two_cycle_union_graph(int a, int b);    // cycles of lengths a,b sharing one vertex

std::string word_str(const DirectedGraph& g, const Word& w);

}  // namespace cantor
