#include "cantor/clopen.hpp"

#include <algorithm>
#include <memory>

namespace cantor {
namespace {

bool is_binary(const std::string& w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c == '0' || c == '1'; });
}

struct Trie {
  bool mark = false;
  std::unique_ptr<Trie> kid[2];
};

void insert(Trie* t, const std::string& w) {
  for (char c : w) {
    if (t->mark) return;  // already covered by a shorter word
    auto& k = t->kid[c - '0'];
    if (!k) k = std::make_unique<Trie>();
    t = k.get();
  }
  t->mark = true;
}

// returns true iff subtree fully covered; merges siblings bottom-up
bool simplify(Trie* t) {
  if (t->mark) {
    t->kid[0].reset();
    t->kid[1].reset();
    return true;
  }
  bool f0 = t->kid[0] && simplify(t->kid[0].get());
  bool f1 = t->kid[1] && simplify(t->kid[1].get());
  if (f0 && f1) {
    t->mark = true;
    t->kid[0].reset();
    t->kid[1].reset();
    return true;
  }
  return false;
}

void collect(const Trie* t, std::string& prefix, std::vector<std::string>& out) {
  if (t->mark) {
    out.push_back(prefix);
    return;
  }
  for (int b = 0; b < 2; ++b) {
    if (t->kid[b]) {
      prefix.push_back(char('0' + b));
      collect(t->kid[b].get(), prefix, out);
      prefix.pop_back();
    }
  }
}

void collect_complement(const Trie* t, std::string& prefix,
                        std::vector<std::string>& out) {
  if (t->mark) return;
  for (int b = 0; b < 2; ++b) {
    prefix.push_back(char('0' + b));
    if (t->kid[b])
      collect_complement(t->kid[b].get(), prefix, out);
    else
      out.push_back(prefix);
    prefix.pop_back();
  }
}

bool is_prefix(const std::string& p, const std::string& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

ClopenSet ClopenSet::normalize(std::vector<std::string> words) {
  Trie root;
  for (const auto& w : words) {
    if (!is_binary(w))
      throw CantorError(ErrorKind::usage, "clopen", "non-binary word '" + w + "'");
    insert(&root, w);
  }
  ClopenSet s;
  if (words.empty()) return s;
  simplify(&root);
  std::string prefix;
  collect(&root, prefix, s.words_);
  std::sort(s.words_.begin(), s.words_.end());
  return s;
}

ClopenSet clopen_normalize(std::vector<std::string> words) {
  return ClopenSet::normalize(std::move(words));
}

bool ClopenSet::contains_point_prefix(const std::string& p) const {
  for (const auto& w : words_)
    if (is_prefix(w, p)) return true;
  return false;
}

bool ClopenSet::meets_cylinder(const std::string& w) const {
  for (const auto& c : words_)
    if (is_prefix(c, w) || is_prefix(w, c)) return true;
  return false;
}

bool ClopenSet::contains_cylinder(const std::string& w) const {
  std::vector<std::string> below;
  for (const auto& c : words_) {
    if (is_prefix(c, w)) return true;
    if (is_prefix(w, c)) below.push_back(c.substr(w.size()));
  }
  if (below.empty()) return false;
  return normalize(std::move(below)).is_whole();
}

ClopenSet ClopenSet::unite(const ClopenSet& o) const {
  std::vector<std::string> all = words_;
  all.insert(all.end(), o.words_.begin(), o.words_.end());
  return normalize(std::move(all));
}

ClopenSet ClopenSet::intersect(const ClopenSet& o) const {
  std::vector<std::string> out;
  for (const auto& a : words_)
    for (const auto& b : o.words_) {
      if (is_prefix(a, b))
        out.push_back(b);
      else if (is_prefix(b, a))
        out.push_back(a);
    }
  return normalize(std::move(out));
}

ClopenSet ClopenSet::complement() const {
  if (is_empty()) return whole();
  Trie root;
  for (const auto& w : words_) insert(&root, w);
  simplify(&root);
  ClopenSet s;
  std::string prefix;
  collect_complement(&root, prefix, s.words_);
  std::sort(s.words_.begin(), s.words_.end());
  // already an antichain by construction, but normalize for sibling merges
  return normalize(std::move(s.words_));
}

bool ClopenSet::subset_of(const ClopenSet& o) const {
  for (const auto& w : words_)
    if (!o.contains_cylinder(w)) return false;
  return true;
}

int ClopenSet::max_depth() const {
  size_t d = 0;
  for (const auto& w : words_) d = std::max(d, w.size());
  return static_cast<int>(d);
}

Dyadic ClopenSet::diameter() const {
  if (is_empty()) return Dyadic::zero();
  size_t lcp = words_[0].size();
  for (const auto& w : words_) {
    size_t i = 0;
    while (i < lcp && i < w.size() && w[i] == words_[0][i]) ++i;
    lcp = std::min(lcp, i);
  }
  if (words_.size() == 1) lcp = words_[0].size();
  return Dyadic::pow2(static_cast<int>(lcp));
}

std::string ClopenSet::label() const {
  std::string s = "[";
  for (size_t i = 0; i < words_.size(); ++i)
    s += (i ? "+" : "") + (words_[i].empty() ? std::string("e") : words_[i]);
  return s + "]";
}

CPartition::CPartition(std::vector<ClopenSet> parts) : parts_(std::move(parts)) {
  if (parts_.empty())
    throw CantorError(ErrorKind::usage, "partition", "partition has no parts");
  ClopenSet seen;
  for (const auto& p : parts_) {
    if (p.is_empty()) throw EmptyClopen("partition part is empty");
    if (!seen.intersect(p).is_empty())
      throw CantorError(ErrorKind::usage, "partition", "parts overlap");
    seen = seen.unite(p);
    mesh_ = Dyadic::max_of(mesh_, p.diameter());
    max_depth_ = std::max(max_depth_, p.max_depth());
  }
  if (!seen.is_whole())
    throw CantorError(ErrorKind::usage, "partition", "parts do not cover the space");
}

CPartition CPartition::depth(int k) {
  if (k < 1)
    throw CantorError(ErrorKind::usage, "partition", "depth partition needs k >= 1");
  std::vector<ClopenSet> parts;
  parts.reserve(size_t(1) << k);
  for (long i = 0; i < (long{1} << k); ++i) {
    std::string w(k, '0');
    for (int b = 0; b < k; ++b)
      if ((i >> (k - 1 - b)) & 1) w[b] = '1';
    parts.push_back(ClopenSet::cylinder(w));
  }
  return CPartition(std::move(parts));
}

CPartition depth_partition(int k) { return CPartition::depth(k); }

int CPartition::index_of_word(const std::string& w) const {
  if (static_cast<int>(w.size()) < max_depth_)
    throw PrecisionUnavailable("word shorter than the partition depth", max_depth_);
  for (size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].contains_point_prefix(w)) return static_cast<int>(i);
  throw CantorError(ErrorKind::verification, "partition", "word not covered");
}

nlohmann::json CPartition::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : parts_) j.push_back(p.to_json());
  return j;
}

CPartition CPartition::from_json(const nlohmann::json& j) {
  std::vector<ClopenSet> parts;
  for (const auto& p : j) parts.push_back(ClopenSet::from_json(p));
  return CPartition(std::move(parts));
}

}  // namespace cantor
