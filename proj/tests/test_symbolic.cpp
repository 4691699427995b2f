#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "cantor/symbolic.hpp"
#include "oracles.hpp"

using namespace cantor;

namespace {

oracles::DenseMat dense_of(const DirectedGraph& g) {
  return oracles::DenseMat::from_edges(g.order(), g.edges());
}

}  // namespace

TEST_CASE("graph construction validates the degree assumption") {
  CHECK_NOTHROW(DirectedGraph({"a"}, {{0, 0}}));
  CHECK_NOTHROW(golden_mean_graph());
  // b has no outgoing edge
  CHECK_THROWS_AS(DirectedGraph({"a", "b"}, {{0, 1}}), DegreeViolation);
  // b has no incoming edge
  CHECK_THROWS_AS(DirectedGraph({"a", "b"}, {{0, 0}, {1, 0}}), DegreeViolation);
  CHECK_THROWS_AS(DirectedGraph({"a", "a"}, {{0, 0}}), CantorError);
  CHECK_THROWS_AS(DirectedGraph({"a"}, {{0, 1}}), CantorError);
  // duplicate edges collapse
  DirectedGraph g({"a"}, {{0, 0}, {0, 0}});
  CHECK(g.edges().size() == 1);
}

TEST_CASE("degree violation names the vertex and side") {
  try {
    DirectedGraph({"a", "b"}, {{0, 1}});
    FAIL("expected DegreeViolation");
  } catch (const DegreeViolation& e) {
    CHECK(e.vertex == "b");
    CHECK(e.side == "out");
    CHECK(e.kind() == ErrorKind::hypothesis);
  }
}

TEST_CASE("mixing certificate on the canonical small graphs") {
  auto complete2 = full_graph(2);
  auto cert = mixing_certificate(complete2);
  CHECK(cert.primitive);
  CHECK(cert.exponent == 1);

  auto gm = golden_mean_graph();
  cert = mixing_certificate(gm);
  CHECK(cert.primitive);
  CHECK(cert.exponent == 2);

  auto c2 = cycle_graph(2);
  cert = mixing_certificate(c2);
  CHECK_FALSE(cert.primitive);
  CHECK(cert.strongly_connected);
  CHECK(cert.period == 2);

  // two components: strong connectivity fails
  DirectedGraph two({"a", "b"}, {{0, 0}, {1, 1}});
  cert = mixing_certificate(two);
  CHECK_FALSE(cert.primitive);
  CHECK_FALSE(cert.strongly_connected);
}

TEST_CASE("mixing certificate agrees with the dense power oracle on all graphs up to 4 vertices") {
  // smaller-scale version of the acceptance sweep: all 1..3 vertex graphs here
  for (int n = 1; n <= 3; ++n) {
    int cells = n * n;
    for (int mask = 0; mask < (1 << cells); ++mask) {
      std::vector<std::pair<int, int>> edges;
      for (int c = 0; c < cells; ++c)
        if (mask & (1 << c)) edges.push_back({c / n, c % n});
      std::vector<std::string> names;
      for (int v = 0; v < n; ++v) names.push_back(std::string(1, char('a' + v)));
      bool ok = true;
      {
        std::vector<int> outd(n, 0), ind(n, 0);
        for (auto& [u, v] : edges) ++outd[u], ++ind[v];
        for (int v = 0; v < n; ++v)
          if (!outd[v] || !ind[v]) ok = false;
      }
      if (!ok) continue;
      DirectedGraph g(names, edges);
      auto cert = mixing_certificate(g);
      int cap = (n - 1) * (n - 1) + 1;
      auto oracle = oracles::primitive_exponent(dense_of(g), cap);
      CHECK(cert.primitive == oracle.has_value());
      if (oracle) CHECK(cert.exponent == *oracle);
    }
  }
}

TEST_CASE("period spectra match closed-path enumeration") {
  auto gm = golden_mean_graph();
  auto spec = period_spectrum(gm, 6);
  CHECK(spec.present == std::set<int>{1, 2, 3, 4, 5, 6});

  auto c2 = cycle_graph(2);
  spec = period_spectrum(c2, 6);
  CHECK(spec.present == std::set<int>{2, 4, 6});
  CHECK_FALSE(spec.full_tail_from.has_value());

  auto g35 = two_cycle_union_graph(3, 5);
  spec = period_spectrum(g35, 10);
  CHECK(spec.present == std::set<int>{3, 5, 6, 8, 9, 10});

  for (const DirectedGraph& g : {gm, c2, g35}) {
    auto s = period_spectrum(g, 12);
    CHECK(s.present == oracles::closed_path_lengths(dense_of(g), 12));
  }
}

TEST_CASE("full_tail_from is sound where set") {
  auto gm = golden_mean_graph();
  auto spec = period_spectrum(gm, 20);
  REQUIRE(spec.full_tail_from.has_value());
  // exponent 2 + order 2
  CHECK(*spec.full_tail_from == 4);
  for (int n = *spec.full_tail_from; n <= 20; ++n) CHECK(spec.contains(n));
}

TEST_CASE("language enumeration is exact and lexicographic") {
  Sft gm(golden_mean_graph());
  auto words = gm.language(2);
  REQUIRE(words.size() == 3);
  CHECK(word_str(gm.graph(), words[0]) == "aa");
  CHECK(word_str(gm.graph(), words[1]) == "ab");
  CHECK(word_str(gm.graph(), words[2]) == "ba");

  auto l3 = gm.language(3);
  std::vector<std::string> got;
  for (auto& w : l3) got.push_back(word_str(gm.graph(), w));
  CHECK(got == std::vector<std::string>{"aaa", "aab", "aba", "baa", "bab"});

  Sft loop(DirectedGraph({"a"}, {{0, 0}}));
  auto l5 = loop.language(5);
  REQUIRE(l5.size() == 1);
  CHECK(word_str(loop.graph(), l5[0]) == "aaaaa");

  // factorial + extendable: prefixes and suffixes of language(l+1) = language(l)
  for (int l = 1; l <= 6; ++l) {
    auto a = gm.language(l);
    auto b = gm.language(l + 1);
    std::set<Word> pre, suf, base(a.begin(), a.end());
    for (auto& w : b) {
      pre.insert(Word(w.begin(), w.end() - 1));
      suf.insert(Word(w.begin() + 1, w.end()));
    }
    CHECK(pre == base);
    CHECK(suf == base);
  }

  // cross-check against the path oracle
  auto oracle = oracles::enumerate_paths(dense_of(gm.graph()), 4);
  auto lib = gm.language(4);
  REQUIRE(lib.size() == oracle.size());
  for (size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == oracle[i]);
}

TEST_CASE("allowed membership") {
  Sft gm(golden_mean_graph());
  CHECK(gm.allowed({0, 1, 0}));
  CHECK_FALSE(gm.allowed({1, 1}));
  CHECK(gm.nonempty({-3, {0, 1, 0, 0}}));
  CHECK_FALSE(gm.nonempty({0, {1, 1}}));
}

TEST_CASE("cantor_check certifies mixing plus growth") {
  CHECK(cantor_check(Sft(golden_mean_graph())).yes);

  auto single = cantor_check(Sft(DirectedGraph({"a"}, {{0, 0}})));
  CHECK_FALSE(single.yes);
  CHECK(single.reason == "single point");

  auto c2 = cantor_check(Sft(cycle_graph(2)));
  CHECK_FALSE(c2.yes);
  CHECK(c2.reason.find("not mixing") == 0);
}

TEST_CASE("every word in a cantor language branches eventually") {
  Sft gm(golden_mean_graph());
  // no isolated points: every length-4 word has >= 2 extensions at some longer length
  for (auto& w : gm.language(4)) {
    int exts = 0;
    for (auto& e : gm.language(6)) {
      if (std::equal(w.begin(), w.end(), e.begin())) ++exts;
    }
    CHECK(exts >= 2);
  }
}

TEST_CASE("graph json and dot round trip") {
  auto gm = golden_mean_graph();
  auto j = gm.to_json();
  CHECK(j["vertices"].size() == 2);
  CHECK(j["edges"].size() == 3);
  auto back = DirectedGraph::from_json(j);
  CHECK(back == gm);
  auto dot = gm.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
}

TEST_CASE("two_cycle_union_graph shares exactly one vertex") {
  auto g = two_cycle_union_graph(3, 5);
  CHECK(g.order() == 3 + 5 - 1);
  auto spec = period_spectrum(g, 2);
  CHECK(spec.present.empty());
}
