// Clopen subsets of the one-sided binary Cantor space, represented as
// canonical antichains of cylinder words: no word a prefix of another, no
// two sibling words w0,w1 both present (they merge to w). The empty word
// denotes the whole space; the empty antichain the empty set. Canonical form
// makes equality literal list equality.
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/dyadic.hpp"
#include "cantor/errors.hpp"

namespace cantor {

class ClopenSet {
 public:
  ClopenSet() = default;  // empty set

  static ClopenSet normalize(std::vector<std::string> words);
  static ClopenSet empty_set() { return ClopenSet(); }
  static ClopenSet whole() { return normalize({""}); }
  static ClopenSet cylinder(const std::string& w) { return normalize({w}); }

  // canonical antichain, lexicographically sorted
  const std::vector<std::string>& cylinders() const { return words_; }

  bool is_empty() const { return words_.empty(); }
  bool is_whole() const { return words_.size() == 1 && words_[0].empty(); }

  bool contains_point_prefix(const std::string& p) const;  // some cylinder is a prefix of p
  bool meets_cylinder(const std::string& w) const;         // [w] ∩ S nonempty
  bool contains_cylinder(const std::string& w) const;      // [w] ⊆ S

  ClopenSet unite(const ClopenSet& o) const;
  ClopenSet intersect(const ClopenSet& o) const;
  ClopenSet complement() const;
  ClopenSet minus(const ClopenSet& o) const { return intersect(o.complement()); }
  bool subset_of(const ClopenSet& o) const;
  bool disjoint(const ClopenSet& o) const { return intersect(*this, o).is_empty(); }

  static ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) {
    return a.intersect(b);
  }

  // deepest cylinder word length in the antichain (0 for whole/empty)
  int max_depth() const;
  // sup distance between members: 2^-(common prefix length of the antichain)
  Dyadic diameter() const;

  bool operator==(const ClopenSet& o) const { return words_ == o.words_; }

  std::string label() const;  // "[w1+w2+...]" for reports
  nlohmann::json to_json() const { return words_; }
  static ClopenSet from_json(const nlohmann::json& j) {
    return normalize(j.get<std::vector<std::string>>());
  }

 private:
  std::vector<std::string> words_;
};

ClopenSet clopen_normalize(std::vector<std::string> words);

class CPartition {
 public:
  // validates: >= 1 nonempty parts, pairwise disjoint, covering
  explicit CPartition(std::vector<ClopenSet> parts);
  static CPartition depth(int k);  // the 2^k depth-k cylinders

  const std::vector<ClopenSet>& parts() const { return parts_; }
  int size() const { return static_cast<int>(parts_.size()); }

  // index of the part containing [w]; requires |w| >= max_cylinder_depth()
  int index_of_word(const std::string& w) const;

  Dyadic mesh() const { return mesh_; }
  int max_cylinder_depth() const { return max_depth_; }

  nlohmann::json to_json() const;
  static CPartition from_json(const nlohmann::json& j);

 private:
  std::vector<ClopenSet> parts_;
  Dyadic mesh_;
  int max_depth_ = 0;
};

CPartition depth_partition(int k);

}  // namespace cantor
