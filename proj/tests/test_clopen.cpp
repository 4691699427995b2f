#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "cantor/clopen.hpp"
#include "oracles.hpp"

using namespace cantor;

namespace {

// denotation at a fixed depth, for semantic equality checks
std::set<std::string> table(const ClopenSet& s, int depth) {
  return oracles::cylinder_table(s.cylinders(), depth);
}

}  // namespace

TEST_CASE("normalization merges siblings and absorbs prefixes") {
  CHECK(clopen_normalize({"00", "01"}).cylinders() == std::vector<std::string>{"0"});
  CHECK(clopen_normalize({"0", "01"}).cylinders() == std::vector<std::string>{"0"});
  CHECK(clopen_normalize({"1", "00", "010", "011"}).is_whole());
  CHECK(clopen_normalize({}).is_empty());
  CHECK(ClopenSet::whole().cylinders() == std::vector<std::string>{""});
  CHECK_THROWS_AS(clopen_normalize({"02"}), CantorError);
}

TEST_CASE("normalization is idempotent and denotation preserving") {
  std::vector<std::vector<std::string>> inputs = {
      {"1", "00", "010", "011"}, {"0", "10"}, {"111", "110", "10"}, {"0101", "01"},
  };
  for (auto& in : inputs) {
    auto s = clopen_normalize(in);
    int d = 1;
    for (auto& w : in) d = std::max<int>(d, w.size() + 1);
    CHECK(table(s, d) == oracles::cylinder_table(in, d));
    CHECK(clopen_normalize(s.cylinders()) == s);
  }
}

TEST_CASE("set operations agree with membership tables") {
  auto a = clopen_normalize({"0", "10"});
  auto b = clopen_normalize({"1"});
  auto u = a.unite(b);
  CHECK(u.is_whole());
  auto i = a.intersect(b);
  CHECK(i.cylinders() == std::vector<std::string>{"10"});
  CHECK(a.complement().cylinders() == std::vector<std::string>{"11"});
  CHECK(a.minus(b).cylinders() == std::vector<std::string>{"0"});
  CHECK(ClopenSet::whole().complement().is_empty());
  CHECK(ClopenSet::empty_set().complement().is_whole());

  // randomized-ish structural cases
  std::vector<std::vector<std::string>> cases = {
      {"00"}, {"0", "11"}, {"010", "1"}, {"0110", "00", "10"},
  };
  for (auto& wa : cases)
    for (auto& wb : cases) {
      auto x = clopen_normalize(wa), y = clopen_normalize(wb);
      int d = 5;
      auto tx = table(x, d), ty = table(y, d);
      std::set<std::string> tu, ti, tm;
      std::set_union(tx.begin(), tx.end(), ty.begin(), ty.end(),
                     std::inserter(tu, tu.end()));
      std::set_intersection(tx.begin(), tx.end(), ty.begin(), ty.end(),
                            std::inserter(ti, ti.end()));
      std::set_difference(tx.begin(), tx.end(), ty.begin(), ty.end(),
                          std::inserter(tm, tm.end()));
      CHECK(table(x.unite(y), d) == tu);
      CHECK(table(x.intersect(y), d) == ti);
      CHECK(table(x.minus(y), d) == tm);
      CHECK(x.subset_of(y) == std::includes(ty.begin(), ty.end(), tx.begin(), tx.end()));
      CHECK(x.disjoint(y) == ti.empty());
    }
}

TEST_CASE("containment queries") {
  auto s = clopen_normalize({"0", "10"});
  CHECK(s.contains_point_prefix("000"));
  CHECK(s.contains_point_prefix("101"));
  CHECK_FALSE(s.contains_point_prefix("110"));
  CHECK(s.meets_cylinder("1"));
  CHECK(s.contains_cylinder("10"));
  CHECK(s.contains_cylinder("00"));
  CHECK_FALSE(s.contains_cylinder("1"));
  CHECK_FALSE(s.contains_cylinder("11"));
  // covered by two separate cylinders
  auto t = clopen_normalize({"00", "010", "011"});
  CHECK(t.contains_cylinder("0"));
}

TEST_CASE("diameter is two to the minus common prefix length") {
  CHECK(ClopenSet::whole().diameter() == Dyadic::one());
  CHECK(ClopenSet::empty_set().diameter() == Dyadic::zero());
  CHECK(ClopenSet::cylinder("010").diameter() == Dyadic::pow2(3));
  CHECK(clopen_normalize({"010", "011"}).diameter() == Dyadic::pow2(2));
  CHECK(clopen_normalize({"00", "011"}).diameter() == Dyadic::pow2(1));
  CHECK(clopen_normalize({"0", "1"}).diameter() == Dyadic::one());
}

TEST_CASE("partitions validate disjointness and covering") {
  CHECK_NOTHROW(CPartition({clopen_normalize({"0"}), clopen_normalize({"1"})}));
  // overlap
  CHECK_THROWS_AS(CPartition({clopen_normalize({"0"}), clopen_normalize({"01", "1"})}),
                  CantorError);
  // gap
  CHECK_THROWS_AS(CPartition({clopen_normalize({"0"}), clopen_normalize({"10"})}),
                  CantorError);
  // empty part
  CHECK_THROWS_AS(CPartition({ClopenSet::whole(), ClopenSet::empty_set()}), EmptyClopen);
}

TEST_CASE("depth partitions") {
  auto p1 = depth_partition(1);
  CHECK(p1.size() == 2);
  CHECK(p1.mesh() == Dyadic::pow2(1));
  auto p2 = depth_partition(2);
  CHECK(p2.size() == 4);
  CHECK(p2.mesh() == Dyadic::pow2(2));
  CHECK(p2.parts()[1].cylinders() == std::vector<std::string>{"01"});
  auto p3 = depth_partition(3);
  CHECK(p3.size() == 8);
  CHECK(p3.mesh() == Dyadic::pow2(3));
  CHECK(p3.max_cylinder_depth() == 3);
}

TEST_CASE("word lookup needs full depth") {
  auto p = CPartition({clopen_normalize({"0", "10"}), clopen_normalize({"11"})});
  CHECK(p.max_cylinder_depth() == 2);
  CHECK(p.index_of_word("00") == 0);
  CHECK(p.index_of_word("10") == 0);
  CHECK(p.index_of_word("11") == 1);
  CHECK_THROWS_AS(p.index_of_word("1"), PrecisionUnavailable);
  CHECK(p.mesh() == Dyadic::one());  // the two-cylinder part has lcp 0
}

TEST_CASE("partition json round trip") {
  auto p = CPartition({clopen_normalize({"0", "10"}), clopen_normalize({"11"})});
  auto j = p.to_json();
  auto back = CPartition::from_json(j);
  CHECK(back.size() == p.size());
  CHECK(back.parts()[0] == p.parts()[0]);
  CHECK(back.parts()[1] == p.parts()[1]);
}
