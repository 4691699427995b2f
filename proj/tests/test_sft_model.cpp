#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/sft_model.hpp"
#include "oracles.hpp"

using namespace cantor;

namespace {

std::vector<std::string> words_of(int depth) {
  std::vector<std::string> out;
  for (unsigned long long x = 0; x < (1ULL << depth); ++x) {
    std::string w(depth, '0');
    for (int i = 0; i < depth; ++i)
      if (x & (1ULL << (depth - 1 - i))) w[i] = '1';
    out.push_back(w);
  }
  return out;
}

DirectedGraph de_bruijn2() {
  std::vector<std::string> names = {"00", "01", "10", "11"};
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v)
      if (names[u].substr(1) == names[v].substr(0, 1)) edges.emplace_back(u, v);
  return DirectedGraph(names, edges);
}

}  // namespace

TEST_CASE("vertex codes form the balanced choice tree") {
  SftModel m2{Sft(full_graph(2))};
  CHECK(m2.vertex_code(0) == "0");
  CHECK(m2.vertex_code(1) == "1");

  SftModel m4{Sft(full_graph(4))};
  CHECK(m4.vertex_code(0) == "00");
  CHECK(m4.vertex_code(1) == "01");
  CHECK(m4.vertex_code(2) == "10");
  CHECK(m4.vertex_code(3) == "11");

  // seven vertices: the last leaf sits alone one level higher
  SftModel m7{Sft(two_cycle_union_graph(3, 5))};
  std::vector<std::string> expect = {"000", "001", "010", "011", "100", "101", "11"};
  for (int v = 0; v < 7; ++v) CHECK(m7.vertex_code(v) == expect[v]);

  SftModel gm{Sft(golden_mean_graph())};
  CHECK(gm.vertex_code(0) == "0");
  CHECK(gm.vertex_code(1) == "1");
}

TEST_CASE("time-0 vertex cylinders are exactly the code cylinders") {
  for (auto& g : {full_graph(4), two_cycle_union_graph(3, 5), golden_mean_graph()}) {
    SftModel m(Sft(g), 16);
    int maxcode = 0;
    for (int v = 0; v < g.order(); ++v)
      maxcode = std::max(maxcode, static_cast<int>(m.vertex_code(v).size()));
    for (auto& w : words_of(maxcode + 1)) {
      auto asg = m.decode(w);
      REQUIRE(asg.count(0) == 1);
      int u = asg.at(0);
      CHECK(w.substr(0, m.vertex_code(u).size()) == m.vertex_code(u));
    }
  }
}

TEST_CASE("forced choices consume no bits and propagate") {
  SftModel gm{Sft(golden_mean_graph())};
  // after b at time 0 the graph forces a on both sides
  auto asg = gm.decode("1");
  CHECK(asg.at(0) == 1);
  CHECK(asg.at(-1) == 0);
  CHECK(asg.at(1) == 0);
  CHECK(asg.count(-2) == 0);  // in-neighbors of a branch again
  CHECK(gm.shift().out("1") == "01");
}

TEST_CASE("full-shift model shifts are bit rearrangements") {
  SftModel m(Sft(full_graph(2)), 16);
  auto fwd = m.shift();
  auto inv = fwd.inverse();
  // every coordinate choice costs one bit: input bits land at
  // t(0),t(-1),t(1),t(-2),t(2),... so the shifted stream reads
  // b2 b0 b4 b1 b6 b3 ...
  for (auto& w : words_of(7)) {
    std::string expect;
    for (int j : {2, 0, 4, 1, 6, 3}) expect.push_back(w[j]);
    CHECK(fwd.out(w) == expect);
    std::string back;
    for (int j : {1, 3, 0, 5, 2}) back.push_back(w[j]);
    CHECK(inv.out(w) == back);
  }
  CHECK(fwd.rho(2) == 0);
  CHECK(fwd.rho(3) == 2);
  CHECK(fwd.rho(4) == 2);
  CHECK(fwd.rho(5) == 4);
  CHECK(fwd.rho(7) == 6);
  CHECK(inv.rho(4) == 3);
  CHECK(inv.rho(6) == 5);
}

TEST_CASE("model shifts are prefix monotone with a sound exact modulus") {
  for (auto& g : {golden_mean_graph(), two_cycle_union_graph(3, 5)}) {
    SftModel m(Sft(g), 16);
    for (auto t : {m.shift(), m.shift().inverse()}) {
      for (int d = 0; d <= 9; ++d) {
        int least = -1;
        for (auto& w : words_of(d)) {
          std::string o = t.out(w);
          int len = static_cast<int>(o.size());
          if (least < 0 || len < least) least = len;
          CHECK(t.out(w + "0").substr(0, o.size()) == o);
          CHECK(t.out(w + "1").substr(0, o.size()) == o);
        }
        CHECK(t.rho(d) == least);  // enumeration modulus is exact, not just sound
      }
    }
  }
}

TEST_CASE("model shift round trips toward the identity") {
  for (auto& g : {full_graph(2), golden_mean_graph(), two_cycle_union_graph(3, 5)}) {
    SftModel m(Sft(g), 16);
    auto fwd = m.shift();
    auto inv = fwd.inverse();
    for (auto& w : words_of(9)) {
      std::string back = inv.out(fwd.out(w));
      CHECK(back == w.substr(0, back.size()));
      std::string forth = fwd.out(inv.out(w));
      CHECK(forth == w.substr(0, forth.size()));
    }
  }
}

TEST_CASE("model shifts are onto at every certified depth") {
  for (auto& g : {full_graph(2), golden_mean_graph(), two_cycle_union_graph(3, 5)}) {
    SftModel m(Sft(g), 18);
    for (int d = 1; d <= 4; ++d) {
      CHECK(m.shift().onto_at(d));
      CHECK(m.shift().inverse().onto_at(d));
    }
  }
}

TEST_CASE("the de Bruijn model realizes de Bruijn edges at depth 2") {
  SftModel m(Sft(de_bruijn2()), 16);
  auto fwd = m.shift();
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& w : words_of(8)) {
    std::string o = fwd.out(w);
    REQUIRE(o.size() >= 2);
    seen.insert({w.substr(0, 2), o.substr(0, 2)});
  }
  std::set<std::pair<std::string, std::string>> expect;
  DirectedGraph db = de_bruijn2();
  for (auto& [u, v] : db.edges()) expect.insert({db.name(u), db.name(v)});
  CHECK(seen == expect);
}

TEST_CASE("degenerate shift spaces are rejected") {
  CHECK_THROWS_AS(SftModel(Sft(cycle_graph(1))), CantorError);   // single point
  CHECK_THROWS_AS(SftModel(Sft(cycle_graph(2))), CantorError);   // not mixing
  CHECK_THROWS_AS(SftModel(Sft(cycle_graph(5))), CantorError);   // periodic
  try {
    SftModel m{Sft(cycle_graph(2))};
  } catch (const CantorError& e) {
    CHECK(e.kind() == ErrorKind::hypothesis);
  }
}

TEST_CASE("models of the same graph denote the same shift") {
  SftModel a{Sft(golden_mean_graph())};
  SftModel b{Sft(golden_mean_graph())};
  CHECK(a.shift().same_map(b.shift()));
  CHECK_FALSE(a.shift().same_map(a.shift().inverse()));
  SftModel c{Sft(full_graph(2))};
  CHECK_FALSE(a.shift().same_map(c.shift()));
  auto j = a.to_json();
  CHECK(j.at("codes").at("a") == "0");
  CHECK(j.at("codes").at("b") == "1");
}
