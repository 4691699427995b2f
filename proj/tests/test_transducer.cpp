#include <doctest.h>

#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/transducer.hpp"
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

// test-local rule: everything maps toward 000..., with 8 bits of slack
struct TowardZeroRule final : Rule {
  std::string out(const std::string& w) const override {
    return std::string(w.size() + 8, '0');
  }
  int rho_lower(int n) const override { return n + 8; }
  std::string signature() const override { return "toward-zero"; }
};

}  // namespace

TEST_CASE("points expand eventually periodic patterns") {
  CHECK(CantorPoint::periodic("01").prefix(5) == oracles::expand("", "01", 5));
  CHECK(CantorPoint::eventually("111", "0").prefix(6) == oracles::expand("111", "0", 6));
  CHECK(CantorPoint::eventually("111", "0").prefix(6) == "111000");
  CHECK(CantorPoint::periodic("1").bit(40) == 1);
  CHECK_THROWS_AS(CantorPoint::periodic(""), CantorError);
  CHECK_THROWS_AS(CantorPoint::periodic("02"), CantorError);
}

TEST_CASE("image points follow the generating transducer") {
  CantorPoint zero = CantorPoint::periodic("0");
  CantorPoint y = CantorPoint::image(odometer_map(), zero);
  std::string expect = oracles::odometer_bits(oracles::expand("", "0", 8));
  CHECK(y.prefix(8) == expect);
  // ten increments count to ten, least significant bit first
  CantorPoint c = zero;
  std::string window = oracles::expand("", "0", 8);
  for (int i = 0; i < 10; ++i) {
    c = CantorPoint::image(odometer_map(), c);
    window = oracles::odometer_bits(window);
  }
  CHECK(c.prefix(8) == window);
  CHECK(window.substr(0, 4) == "0101");
  // the inverse walks back down
  CantorPoint back = CantorPoint::image(odometer_map().inverse(), y);
  CHECK(back.prefix(8) == oracles::expand("", "0", 8));
}

TEST_CASE("apply reaches the requested precision") {
  CHECK(apply(shift_map(), CantorPoint::eventually("0", "1"), 2) == "11");
  CHECK(apply(odometer_map(), CantorPoint::eventually("111", "0"), 4) == "0001");
  CantorPoint x = CantorPoint::periodic("0110");
  CHECK(apply(identity_map(), x, 5) == x.prefix(5));
  // oracle cross-check over a basket of points
  for (auto& pat : {std::string("01"), std::string("110"), std::string("1")}) {
    CantorPoint p = CantorPoint::periodic(pat);
    std::string win = oracles::expand("", pat, 12);
    CHECK(apply(shift_map(), p, 6).substr(0, 6) == oracles::shift_bits(win).substr(0, 6));
    CHECK(apply(odometer_map(), p, 6).substr(0, 6) ==
          oracles::odometer_bits(win).substr(0, 6));
  }
}

TEST_CASE("builtin outputs match the sequence oracles") {
  for (int d = 0; d <= 8; ++d)
    for (auto& w : words_of(d)) {
      if (d > 0) CHECK(shift_map().out(w) == oracles::shift_bits(w));
      CHECK(bitflip_map().out(w) == oracles::flip_bits(w));
      CHECK(identity_map().out(w) == w);
      std::string odo = odometer_map().out(w);
      if (w.find('0') != std::string::npos)
        CHECK(odo == oracles::odometer_bits(w));
      else
        CHECK(odo == std::string(w.size(), '0'));
    }
}

TEST_CASE("outputs are prefix monotone and honor the declared modulus") {
  auto odoflip = compose(odometer_map(), bitflip_map());
  auto deep = compose(shift_map(), compose(shift_map(), odometer_map()));
  std::vector<Transducer> ts = {shift_map(),  identity_map(), bitflip_map(),
                                odometer_map(), odoflip,        deep};
  for (auto& t : ts) {
    for (int d = 0; d <= 8; ++d) {
      CHECK(t.rho(d) <= t.rho(d + 1));
      for (auto& w : words_of(d)) {
        std::string o = t.out(w);
        CHECK(static_cast<int>(o.size()) >= t.rho(d));
        std::string o0 = t.out(w + "0");
        std::string o1 = t.out(w + "1");
        CHECK(o == o0.substr(0, o.size()));
        CHECK(o == o1.substr(0, o.size()));
      }
    }
  }
}

TEST_CASE("depth_for finds the least sufficient depth and is honest") {
  CHECK(identity_map().depth_for(3) == 3);
  CHECK(shift_map().depth_for(4) == 5);
  CHECK(odometer_map().depth_for(7) == 7);
  CHECK(shift_map().depth_for(0) == 0);
  Transducer short_shift(shift_map().rule_ptr(), Transducer::Kind::endo, 4);
  CHECK_THROWS_AS(short_shift.depth_for(4), PrecisionUnavailable);
}

TEST_CASE("onto certification covers output words or names a miss") {
  for (int m = 1; m <= 4; ++m) {
    CHECK(shift_map().onto_at(m));
    CHECK(odometer_map().onto_at(m));
    CHECK(bitflip_map().onto_at(m));
  }
  // collapse everything into the lower half: 1 is never hit
  auto collapse = piecewise({{"0", identity_map(), "0"}, {"1", identity_map(), "0"}});
  CHECK_FALSE(collapse.is_homeo());
  CHECK_FALSE(collapse.onto_at(1));
  CHECK(collapse.uncovered_word(1) == std::string("1"));
  CHECK(collapse.uncovered_word(2) == std::string("10"));
}

TEST_CASE("sup_distance on identical maps short-circuits to zero") {
  auto c = sup_distance(shift_map(), shift_map(), 4);
  CHECK(c.upper == Dyadic::zero());
  CHECK(c.lower == Dyadic::zero());
  CHECK(c.witness.empty());
}

TEST_CASE("sup_distance separates identity from the shift with a witness") {
  auto c = sup_distance(identity_map(), shift_map(), 3);
  CHECK(c.lower == Dyadic::one());
  CHECK(c.upper == Dyadic::one());
  CHECK(c.witness == "01");
  // the witness really exhibits the gap at index 0
  std::string a = identity_map().out(c.witness);
  std::string b = shift_map().out(c.witness);
  CHECK(oracles::first_disagreement(a, b) == 0);
}

TEST_CASE("sup_distance sees a global flip as distance one") {
  auto flipped = compose(bitflip_map(), shift_map());
  auto c = sup_distance(shift_map(), flipped, 3);
  CHECK(c.upper == Dyadic::one());
  CHECK(c.lower == Dyadic::one());
}

TEST_CASE("sup_distance measures shallow disagreements exactly") {
  // swap deep in the tree: differs only inside [110]
  auto tweak = prefix_exchange_map({{"1100", "1101"}, {"1101", "1100"},
                                    {"0", "0"}, {"10", "10"}, {"111", "111"}});
  auto c = sup_distance(identity_map(), tweak, 6);
  CHECK(c.lower == Dyadic::pow2(3));
  CHECK(c.upper == Dyadic::pow2(3));
  CHECK(c.witness == "1100");
}

TEST_CASE("sup_distance upper bounds shrink with depth and stay sound") {
  auto flipped = compose(bitflip_map(), shift_map());
  std::vector<Transducer> ts = {shift_map(), identity_map(), odometer_map(), flipped};
  for (auto& f : ts)
    for (auto& g : ts) {
      Dyadic prev = Dyadic::one();
      bool first = true;
      for (int d = 2; d <= 8; d += 2) {
        auto c = sup_distance(f, g, d);
        CHECK(c.lower <= c.upper);
        if (!first) CHECK(c.upper <= prev);
        prev = c.upper;
        first = false;
        auto r = sup_distance(g, f, d);
        CHECK(r.upper == c.upper);
        CHECK(r.lower == c.lower);
      }
    }
}

TEST_CASE("sup_distance uppers obey the ultrametric triangle inequality") {
  auto flipped = compose(bitflip_map(), shift_map());
  auto odoflip = compose(odometer_map(), bitflip_map());
  std::vector<Transducer> ts = {shift_map(), identity_map(), bitflip_map(),
                                odometer_map(), flipped, odoflip};
  for (auto& f : ts)
    for (auto& g : ts)
      for (auto& h : ts) {
        auto fg = sup_distance(f, g, 8);
        auto gh = sup_distance(g, h, 8);
        auto fh = sup_distance(f, h, 8);
        CHECK(fh.upper <= Dyadic::max_of(fg.upper, gh.upper));
      }
}

TEST_CASE("sup_distance needs both depth ladders") {
  Transducer short_shift(shift_map().rule_ptr(), Transducer::Kind::endo, 4);
  CHECK_THROWS_AS(sup_distance(short_shift, identity_map(), 6), PrecisionUnavailable);
}

TEST_CASE("table-backed transducers never claim equality beyond their horizon") {
  auto j = odometer_map().to_json(4);
  auto a = Transducer::from_json(j);
  auto b = Transducer::from_json(j);
  CHECK_FALSE(a.same_map(b));
  auto c = sup_distance(a, b, 4);
  CHECK(c.lower == Dyadic::zero());
  CHECK(c.upper == Dyadic::pow2(4));
}

TEST_CASE("modulus_delta certifies the contraction depth") {
  CHECK(modulus_delta(shift_map(), Dyadic::pow2(3)) == Dyadic::pow2(6));
  CHECK(modulus_delta(identity_map(), Dyadic::pow2(1)) == Dyadic::pow2(3));
  Transducer toward_zero(std::make_shared<TowardZeroRule>(), Transducer::Kind::endo);
  CHECK(modulus_delta(toward_zero, Dyadic::pow2(5)) == Dyadic::pow2(7));
}

TEST_CASE("modulus_delta output satisfies both certificate clauses exhaustively") {
  std::vector<Transducer> ts = {shift_map(), identity_map(), bitflip_map(), odometer_map(),
                                compose(shift_map(), odometer_map())};
  for (auto& f : ts)
    for (int e = 1; e <= 4; ++e) {
      Dyadic eps = Dyadic::pow2(e);
      Dyadic delta = modulus_delta(f, eps);
      int m = delta.exponent();
      // clause 1: delta < eps/2
      CHECK(delta < eps.half());
      // clause 2: inputs sharing a depth-m cylinder have outputs strictly
      // within eps/2, checked by enumerating every depth-m word
      for (auto& w : words_of(m)) {
        std::string o = f.out(w);
        CHECK(Dyadic::pow2(static_cast<int>(o.size())) < eps.half());
      }
    }
  CHECK_THROWS_AS(modulus_delta(shift_map(), Dyadic::zero()), CantorError);
  Transducer short_shift(shift_map().rule_ptr(), Transducer::Kind::endo, 4);
  CHECK_THROWS_AS(modulus_delta(short_shift, Dyadic::pow2(3)), PrecisionUnavailable);
}

TEST_CASE("homeomorphism round trips are exact at every supported depth") {
  std::vector<Transducer> hs = {identity_map(), bitflip_map(), odometer_map(),
                                prefix_exchange_map({{"0", "10"}, {"10", "11"}, {"11", "0"}})};
  for (auto& h : hs) {
    auto hi = h.inverse();
    for (int d = 2; d <= 8; ++d)
      for (auto& w : words_of(d)) {
        CHECK(hi.out(h.out(w)) == w);
        CHECK(h.out(hi.out(w)) == w);
      }
  }
  CHECK_THROWS_AS(shift_map().inverse(), CantorError);
}

TEST_CASE("inverse of the inverse denotes the original map") {
  auto t = odometer_map();
  CHECK(t.inverse().inverse().same_map(t));
  CHECK_FALSE(t.inverse().same_map(t));
}

TEST_CASE("prefix exchanges validate their antichains") {
  CHECK_THROWS_AS(prefix_exchange_map({{"0", "10"}, {"01", "11"}}), CantorError);
  CHECK_THROWS_AS(prefix_exchange_map({{"0", "1"}, {"1", "10"}}), CantorError);
  // partial cover is rejected when gluing to a total map
  CHECK_THROWS_AS(prefix_exchange_map({{"0", "1"}}), CantorError);
  CHECK_THROWS_AS(glue({}), CantorError);
}

TEST_CASE("prefix exchange moves matched cylinders and copies tails") {
  auto t = prefix_exchange_map({{"0", "10"}, {"10", "11"}, {"11", "0"}});
  CHECK(t.is_homeo());
  CHECK(t.out("0110") == "10110");
  CHECK(t.out("100") == "110");
  CHECK(t.out("1101") == "001");
  CHECK(t.out("1") == "");      // could continue as 10 or 11: nothing forced
  CHECK(t.rho(1) == 0);
  CHECK(t.rho(2) == 1);         // the pair 11 -> 0 shortens by one bit
  CHECK(t.rho(3) == 2);
  for (int d = 2; d <= 7; ++d)
    for (auto& w : words_of(d))
      CHECK(static_cast<int>(t.out(w).size()) >= t.rho(d));
}

TEST_CASE("clopen_homeo matches single cylinders directly") {
  auto px = clopen_homeo(ClopenSet::cylinder("0"), ClopenSet::cylinder("11"));
  REQUIRE(px.pairs.size() == 1);
  CHECK(px.pairs[0] == std::pair<std::string, std::string>("0", "11"));
}

TEST_CASE("clopen_homeo of the whole space onto itself is the identity") {
  auto px = clopen_homeo(ClopenSet::whole(), ClopenSet::whole());
  REQUIRE(px.pairs.size() == 1);
  CHECK(px.pairs[0].first == "");
  CHECK(px.pairs[0].second == "");
}

TEST_CASE("clopen_homeo refines the smaller antichain to match") {
  auto a = clopen_normalize({"0", "10"});
  auto b = ClopenSet::cylinder("1");
  auto px = clopen_homeo(a, b);
  REQUIRE(px.pairs.size() == 2);
  CHECK(px.pairs[0] == std::pair<std::string, std::string>("0", "10"));
  CHECK(px.pairs[1] == std::pair<std::string, std::string>("10", "11"));
  CHECK(px.domain() == a);
  CHECK(px.range() == b);
}

TEST_CASE("clopen_homeo both directions compose to the identity on the domain") {
  auto a = clopen_normalize({"0", "10"});
  auto b = ClopenSet::cylinder("1");
  auto fwd = clopen_homeo(a, b);
  auto bwd = clopen_homeo(b, a);
  // the refinements mirror each other, so composing pairwise is a bijection
  // check pointwise on depth-4 words inside the domain
  auto apply_px = [](const PrefixExchange& px, const std::string& w) {
    for (auto& [x, y] : px.pairs)
      if (w.size() >= x.size() && w.substr(0, x.size()) == x) return y + w.substr(x.size());
    return std::string("*");
  };
  for (auto& w : words_of(4)) {
    std::string mid = apply_px(fwd, w);
    if (mid == "*") continue;
    CHECK(apply_px(bwd, mid) == w);
  }
}

TEST_CASE("clopen_homeo is bijective between refined antichains at depth 4") {
  auto a = clopen_normalize({"00", "011", "10"});
  auto b = clopen_normalize({"0", "11"});
  auto px = clopen_homeo(a, b);
  REQUIRE(px.pairs.size() == 3);  // b gains a split of its shortest word
  auto dom = oracles::cylinder_table(
      [&] { std::vector<std::string> v; for (auto& p : px.pairs) v.push_back(p.first); return v; }(), 4);
  auto ran = oracles::cylinder_table(
      [&] { std::vector<std::string> v; for (auto& p : px.pairs) v.push_back(p.second); return v; }(), 4);
  CHECK(dom == oracles::cylinder_table(a.cylinders(), 4));
  CHECK(ran == oracles::cylinder_table(b.cylinders(), 4));
  CHECK_THROWS_AS(clopen_homeo(ClopenSet::empty_set(), b), EmptyClopen);
}

TEST_CASE("glue assembles partial exchanges into total homeomorphisms") {
  auto p1 = clopen_homeo(ClopenSet::cylinder("0"), ClopenSet::cylinder("1"));
  auto p2 = clopen_homeo(ClopenSet::cylinder("1"), ClopenSet::cylinder("0"));
  auto t = glue({p1, p2});
  CHECK(t.is_homeo());
  CHECK(t.out("01") == "11");
  CHECK(t.out("10") == "00");
  // overlapping ranges are rejected
  auto bad = clopen_homeo(ClopenSet::cylinder("1"), ClopenSet::cylinder("1"));
  CHECK_THROWS_AS(glue({p1, bad}), CantorError);
}

TEST_CASE("composition chains outputs and kinds") {
  auto two = compose(odometer_map(), odometer_map());
  for (auto& w : words_of(6))
    CHECK(two.out(w) == oracles::odometer_bits(oracles::odometer_bits(w)));
  CHECK(two.is_homeo());
  CHECK_FALSE(compose(shift_map(), bitflip_map()).is_homeo());
  auto inv = two.inverse();
  for (auto& w : words_of(6)) CHECK(inv.out(two.out(w)) == w);
}

TEST_CASE("power iterates composition with the identity at zero") {
  CHECK(power(odometer_map(), 0).same_map(identity_map()));
  auto five = power(odometer_map(), 5);
  for (auto& w : words_of(5)) {
    std::string expect = w;
    for (int i = 0; i < 5; ++i) expect = oracles::odometer_bits(expect);
    CHECK(five.out(w) == expect);
  }
  CHECK(power(bitflip_map(), 2).out("0101") == "0101");
  CHECK_THROWS_AS(power(bitflip_map(), -1), CantorError);
}

TEST_CASE("piecewise maps dispatch on in-prefixes") {
  // swap halves while flipping inside the lower half
  auto t = piecewise({{"0", bitflip_map(), "1"}, {"1", identity_map(), "0"}});
  CHECK(t.is_homeo());
  CHECK(t.out("0011") == "1100");
  CHECK(t.out("1011") == "0011");
  CHECK(t.out("") == "");
  auto ti = t.inverse();
  for (auto& w : words_of(6)) CHECK(ti.out(t.out(w)) == w);
  CHECK_THROWS_AS(piecewise({{"0", identity_map(), "0"}}), CantorError);
  CHECK_THROWS_AS(piecewise({{"0", identity_map(), "0"}, {"01", identity_map(), "1"}}),
                  CantorError);
}

TEST_CASE("tail maps certify cylinder confinement with copied or flipped tails") {
  auto tm = odometer_map().tail_map("10");
  REQUIRE(tm.has_value());
  CHECK(tm->image == "01");
  CHECK(tm->op == TailOp::copy);
  CHECK_FALSE(odometer_map().tail_map("11").has_value());

  auto fm = bitflip_map().tail_map("01");
  REQUIRE(fm.has_value());
  CHECK(fm->image == "10");
  CHECK(fm->op == TailOp::flip);

  // flip after flip composes to a copy: a structural identity certificate
  auto sq = compose(bitflip_map(), bitflip_map());
  for (auto& w : words_of(1)) {
    auto c = sq.tail_map(w);
    REQUIRE(c.has_value());
    CHECK(c->image == w);
    CHECK(c->op == TailOp::copy);
  }
  // the odometer squared has no tail certificate once the carry escapes
  CHECK_FALSE(compose(odometer_map(), odometer_map()).tail_map("0").has_value());
  // shift needs at least one input bit
  CHECK_FALSE(shift_map().tail_map("").has_value());
  auto sm = shift_map().tail_map("01");
  REQUIRE(sm.has_value());
  CHECK(sm->image == "1");
}

TEST_CASE("exact cylinder images agree with exhaustive enumeration") {
  auto px = prefix_exchange_map({{"0", "10"}, {"10", "11"}, {"11", "0"}});
  std::vector<Transducer> ts = {identity_map(), bitflip_map(), odometer_map(), px,
                                compose(px, odometer_map())};
  for (auto& t : ts)
    for (int d = 0; d <= 5; ++d)
      for (auto& w : words_of(d)) {
        auto img = t.image_of_cylinder(w);
        REQUIRE(img.has_value());
        // enumerate images of deep refinements of w and compare membership
        std::set<std::string> got;
        for (auto& suf : words_of(8 - d)) got.insert(t.out(w + suf).substr(0, 6));
        for (auto& o : got) CHECK(img->contains_point_prefix(o));
        auto table = oracles::cylinder_table(img->cylinders(), 6);
        for (auto& o : table) CHECK(got.count(o.substr(0, 6)));
      }
  // the shift widens [""] to the whole space
  auto whole = shift_map().image_of_cylinder("");
  REQUIRE(whole.has_value());
  CHECK(whole->is_whole());
  CHECK(shift_map().image_of_cylinder("01") == ClopenSet::cylinder("1"));
}

TEST_CASE("table serialization round trips and verifies inverses") {
  auto j = odometer_map().to_json(4);
  CHECK(j.at("kind") == "homeo");
  CHECK(j.at("ladder") == nlohmann::json({4}));
  auto t = Transducer::from_json(j);
  CHECK(t.is_homeo());
  for (auto& w : words_of(4)) CHECK(t.out(w) == odometer_map().out(w));
  for (auto& w : words_of(6)) CHECK(t.out(w) == odometer_map().out(w.substr(0, 4)));
  // a word shorter than the table level still yields the forced prefix
  CHECK(t.out("111") == "000");
  CHECK(t.rho(3) == 0);
  CHECK(t.rho(4) == 4);
  CHECK(t.rho(10) == 4);  // knowledge plateaus at the horizon
  CHECK_THROWS_AS(t.depth_for(5), PrecisionUnavailable);

  auto ti = t.inverse();
  for (auto& w : words_of(4)) CHECK(ti.out(t.out(w)) == w);

  // endo tables load without an inverse
  auto je = shift_map().to_json(5);
  CHECK(je.at("kind") == "endo");
  auto s = Transducer::from_json(je);
  CHECK_FALSE(s.is_homeo());
  CHECK(s.out("01101") == "1101");
}

TEST_CASE("malformed tables are rejected") {
  auto j = odometer_map().to_json(3);
  auto bad = j;
  bad["maps"]["3"].erase("000");
  CHECK_THROWS_AS(Transducer::from_json(bad), CantorError);
  bad = j;
  bad["maps"]["3"]["000"] = "12x";
  CHECK_THROWS_AS(Transducer::from_json(bad), CantorError);
  bad = j;
  bad["inverse"]["maps"]["3"]["000"] = "000";  // no longer inverts: 000 -> 100
  CHECK_THROWS_AS(Transducer::from_json(bad), CantorError);
  bad = j;
  bad.erase("inverse");
  CHECK_THROWS_AS(Transducer::from_json(bad), CantorError);
  bad = j;
  bad["kind"] = "endo";
  CHECK_NOTHROW(Transducer::from_json(bad));
}

TEST_CASE("multi-level tables must be prefix consistent") {
  nlohmann::json j;
  j["ladder"] = {1, 2};
  j["maps"]["1"] = {{"0", "1"}, {"1", "0"}};
  j["maps"]["2"] = {{"00", "11"}, {"01", "10"}, {"10", "01"}, {"11", "00"}};
  j["kind"] = "endo";
  CHECK_NOTHROW(Transducer::from_json(j));
  j["maps"]["2"]["00"] = "01";  // contradicts level 1: out(0) = 1
  CHECK_THROWS_AS(Transducer::from_json(j), CantorError);
}

TEST_CASE("image points through table transducers stop at the horizon") {
  auto t = Transducer::from_json(odometer_map().to_json(4));
  CantorPoint y = CantorPoint::image(t, CantorPoint::periodic("0"));
  CHECK(y.prefix(4) == "1000");
  CHECK_THROWS_AS(y.bit(4), PrecisionUnavailable);
}
