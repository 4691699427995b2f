// Continuous self-maps of the binary Cantor space, presented as prefix
// transducers: finite, prefix-monotone computations with an explicit
// modulus of continuity.  A Transducer wraps a Rule (the computation)
// together with its kind (endomorphism candidate or homeomorphism), a
// depth ladder bound, and memoized per-depth certificates (modulus,
// onto-ness).  All distance arithmetic is exact dyadic.

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/clopen.hpp"
#include "cantor/dyadic.hpp"

namespace cantor {

class Transducer;

// A point of the Cantor space, queryable bit by bit.  Generators are
// deterministic: an eventually periodic pattern, or the image of another
// point under a transducer (evaluated lazily through the rule ladder).
class CantorPoint {
 public:
  static CantorPoint periodic(const std::string& period);
  static CantorPoint eventually(const std::string& preamble, const std::string& period);
  static CantorPoint image(const Transducer& t, const CantorPoint& base);

  int bit(long i) const;
  std::string prefix(int n) const;

 private:
  struct Node;
  CantorPoint() = default;
  std::shared_ptr<Node> node_;
};

// Structural certificate that a rule maps the cylinder [w] into [image]
// with the remaining tail copied verbatim or flipped bitwise.
enum class TailOp { copy, flip };

struct TailMap {
  std::string image;
  TailOp op = TailOp::copy;
};

// The computation behind a transducer.  out(w) is the longest output
// prefix forced by the input prefix w and must extend out(v) whenever v
// is a prefix of w.  rho_lower(n) is a sound, nondecreasing lower bound
// on |out(w)| over all length-n inputs in the rule's domain.
class Rule {
 public:
  virtual ~Rule() = default;

  virtual std::string out(const std::string& w) const = 0;
  virtual int rho_lower(int n) const = 0;
  // Structural identity: equal signatures mean equal maps (only claimed
  // by rules with total_knowledge).
  virtual std::string signature() const = 0;

  virtual std::optional<TailMap> tail_map(const std::string&) const { return std::nullopt; }
  // Exact image of the cylinder [w], when the rule knows it.
  virtual std::optional<ClopenSet> exact_image(const std::string&) const { return std::nullopt; }
  // Inverse computation for bijective rules; null otherwise.
  virtual std::shared_ptr<const Rule> inverse_rule() const { return nullptr; }
  // Whether out() pins the map completely in the limit.  False for finite
  // tables, which only know a bounded horizon.
  virtual bool total_knowledge() const { return true; }
};

class Transducer {
 public:
  enum class Kind { endo, homeo };

  Transducer(std::shared_ptr<const Rule> rule, Kind kind, int max_depth = 24);

  const Rule& rule() const;
  std::shared_ptr<const Rule> rule_ptr() const;
  Kind kind() const;
  bool is_homeo() const;
  int max_depth() const;

  std::string out(const std::string& w) const;
  // Memoized modulus: nondecreasing lower bound on output depth at input
  // depth n.
  int rho(int n) const;
  // Least input depth n <= max_depth with rho(n) >= p; throws
  // PrecisionUnavailable when the ladder is exhausted.
  int depth_for(int p) const;
  // Onto certification at output depth m: every depth-m word is covered
  // by some image.  uncovered_word reports a witness of failure.
  bool onto_at(int m) const;
  std::optional<std::string> uncovered_word(int m) const;

  std::optional<TailMap> tail_map(const std::string& w) const;
  std::optional<ClopenSet> image_of_cylinder(const std::string& w) const;

  Transducer inverse() const;  // homeomorphism kind only

  std::string signature() const;
  // True when both transducers provably denote the same map (same rule
  // object, or equal signatures with total knowledge).
  bool same_map(const Transducer& o) const;

  // Level-map serialization: {"ladder":[d], "maps":{"d":{w:out}},
  // "kind":..., "inverse":...}.
  nlohmann::json to_json(int table_depth) const;
  static Transducer from_json(const nlohmann::json& j, int max_depth = 24);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// The length-(>= precision) prefix of f(x), exact.
std::string apply(const Transducer& f, const CantorPoint& x, int precision);

// Machine-checkable two-sided bound on the uniform distance d(f,g).
struct DistanceCertificate {
  Dyadic upper;
  Dyadic lower;
  int depth_used = 0;
  // Shortest input cylinder exhibiting the best realized disagreement;
  // empty when lower = 0.
  std::string witness;

  nlohmann::json to_json() const;
};

DistanceCertificate sup_distance(const Transducer& f, const Transducer& g, int depth);

// Largest dyadic delta = 2^-m with delta < eps/2 and images of any
// depth-m cylinder confined to a cylinder of diameter < eps/2.
Dyadic modulus_delta(const Transducer& f, Dyadic eps);

// A bijective prefix recoding given by matched cylinder pairs
// (domain antichain -> range antichain); tails are copied.  May cover
// only part of the space; glue() assembles total homeomorphisms.
struct PrefixExchange {
  std::vector<std::pair<std::string, std::string>> pairs;

  ClopenSet domain() const;
  ClopenSet range() const;
};

// Bijective prefix recoding from A onto B: the side with fewer cylinders
// is refined (splitting the shortest word, lexicographically first on
// ties) until the antichains have equal size, then matched in
// lexicographic order.
PrefixExchange clopen_homeo(const ClopenSet& a, const ClopenSet& b);

// Assemble disjoint prefix exchanges whose domains and ranges each
// partition the whole space into a total homeomorphism.
Transducer glue(const std::vector<PrefixExchange>& pieces, int max_depth = 24);

// Total prefix-exchange homeomorphism from an explicit pair list.
Transducer prefix_exchange_map(std::vector<std::pair<std::string, std::string>> pairs,
                               int max_depth = 24);

// f after g.  Homeomorphism kind iff both are.
Transducer compose(const Transducer& f, const Transducer& g);
Transducer power(const Transducer& f, int n);

// Piecewise map: on [in_prefix], strip the prefix, apply inner, prepend
// out_prefix.  The in-prefixes must partition the space.  The result is
// a homeomorphism iff every inner is one and the out-prefixes partition
// the space as well.
struct Piece {
  std::string in_prefix;
  Transducer inner;
  std::string out_prefix;
};

Transducer piecewise(std::vector<Piece> pieces, int max_depth = 24);

// Built-in systems.
Transducer shift_map();     // drop the first bit (endomorphism)
Transducer identity_map();  // homeomorphism
Transducer bitflip_map();   // flip every bit (period-2 homeomorphism)
Transducer odometer_map();  // add one with carry, least significant bit first

}  // namespace cantor
