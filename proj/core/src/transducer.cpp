#include "cantor/transducer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

bool is_binary(const std::string& w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c == '0' || c == '1'; });
}

void require_binary(const std::string& w, const char* stage) {
  if (!is_binary(w)) throw CantorError(ErrorKind::usage, stage, "word is not binary: '" + w + "'");
}

std::string flip_bits(const std::string& w) {
  std::string r = w;
  for (char& c : r) c = (c == '0') ? '1' : '0';
  return r;
}

size_t lcp_len(const std::string& a, const std::string& b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

bool is_prefix(const std::string& p, const std::string& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

// first index where a and b disagree, or -1 if prefix-comparable
int first_disagreement(const std::string& a, const std::string& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return static_cast<int>(i);
  return -1;
}

std::string word_at(unsigned long long x, int depth) {
  std::string w(depth, '0');
  for (int i = 0; i < depth; ++i)
    if (x & (1ULL << (depth - 1 - i))) w[i] = '1';
  return w;
}

// ---------------------------------------------------------------- rules

class IdentityRule final : public Rule {
 public:
  std::string out(const std::string& w) const override { return w; }
  int rho_lower(int n) const override { return n; }
  std::string signature() const override { return "id"; }
  std::optional<TailMap> tail_map(const std::string& w) const override {
    return TailMap{w, TailOp::copy};
  }
  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    return ClopenSet::cylinder(w);
  }
  std::shared_ptr<const Rule> inverse_rule() const override {
    return std::make_shared<IdentityRule>();
  }
};

class ShiftRule final : public Rule {
 public:
  std::string out(const std::string& w) const override {
    return w.empty() ? std::string() : w.substr(1);
  }
  int rho_lower(int n) const override { return n > 0 ? n - 1 : 0; }
  std::string signature() const override { return "shift"; }
  std::optional<TailMap> tail_map(const std::string& w) const override {
    if (w.empty()) return std::nullopt;
    return TailMap{w.substr(1), TailOp::copy};
  }
  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    return ClopenSet::cylinder(w.empty() ? w : w.substr(1));
  }
};

class BitflipRule final : public Rule {
 public:
  std::string out(const std::string& w) const override { return flip_bits(w); }
  int rho_lower(int n) const override { return n; }
  std::string signature() const override { return "bitflip"; }
  std::optional<TailMap> tail_map(const std::string& w) const override {
    return TailMap{flip_bits(w), TailOp::flip};
  }
  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    return ClopenSet::cylinder(flip_bits(w));
  }
  std::shared_ptr<const Rule> inverse_rule() const override {
    return std::make_shared<BitflipRule>();
  }
};

class DecrementRule;

// Add one with carry, least significant bit first: 1^k 0 y -> 0^k 1 y,
// all-ones -> all-zeros.
class OdometerRule final : public Rule {
 public:
  std::string out(const std::string& w) const override {
    size_t j = w.find('0');
    if (j == std::string::npos) return std::string(w.size(), '0');
    return std::string(j, '0') + "1" + w.substr(j + 1);
  }
  int rho_lower(int n) const override { return n; }
  std::string signature() const override { return "odometer"; }
  std::optional<TailMap> tail_map(const std::string& w) const override {
    if (w.find('0') == std::string::npos) return std::nullopt;
    return TailMap{out(w), TailOp::copy};
  }
  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    // on the all-ones cylinder the carry ripples into the tail, but the
    // image of [1^n] is exactly [0^n] (the odometer is bijective)
    return ClopenSet::cylinder(out(w));
  }
  std::shared_ptr<const Rule> inverse_rule() const override;
};

class DecrementRule final : public Rule {
 public:
  std::string out(const std::string& w) const override {
    size_t j = w.find('1');
    if (j == std::string::npos) return std::string(w.size(), '1');
    return std::string(j, '1') + "0" + w.substr(j + 1);
  }
  int rho_lower(int n) const override { return n; }
  std::string signature() const override { return "odometer-inverse"; }
  std::optional<TailMap> tail_map(const std::string& w) const override {
    if (w.find('1') == std::string::npos) return std::nullopt;
    return TailMap{out(w), TailOp::copy};
  }
  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    return ClopenSet::cylinder(out(w));
  }
  std::shared_ptr<const Rule> inverse_rule() const override {
    return std::make_shared<OdometerRule>();
  }
};

std::shared_ptr<const Rule> OdometerRule::inverse_rule() const {
  return std::make_shared<DecrementRule>();
}

// Matched cylinder pairs (a_i -> b_i); inputs extending a_i map to
// b_i + tail.  Domain may be partial (used while gluing); total rules
// never see out-of-domain words.
class PrefixExchangeRule final : public Rule {
 public:
  explicit PrefixExchangeRule(std::vector<std::pair<std::string, std::string>> pairs)
      : pairs_(std::move(pairs)) {
    if (pairs_.empty())
      throw CantorError(ErrorKind::usage, "prefix-exchange", "empty pair list");
    std::sort(pairs_.begin(), pairs_.end());
    for (auto& [a, b] : pairs_) {
      require_binary(a, "prefix-exchange");
      require_binary(b, "prefix-exchange");
      max_a_ = std::max(max_a_, static_cast<int>(a.size()));
      firsts_.insert(a);
    }
    for (size_t i = 0; i + 1 < pairs_.size(); ++i)
      if (is_prefix(pairs_[i].first, pairs_[i + 1].first))
        throw CantorError(ErrorKind::usage, "prefix-exchange",
                          "domain words are not an antichain: '" + pairs_[i].first + "' < '" +
                              pairs_[i + 1].first + "'");
    std::vector<std::string> seconds;
    seconds.reserve(pairs_.size());
    for (auto& [a, b] : pairs_) seconds.push_back(b);
    std::sort(seconds.begin(), seconds.end());
    for (size_t i = 0; i + 1 < seconds.size(); ++i)
      if (is_prefix(seconds[i], seconds[i + 1]))
        throw CantorError(ErrorKind::usage, "prefix-exchange",
                          "range words are not an antichain: '" + seconds[i] + "' < '" +
                              seconds[i + 1] + "'");
  }

  std::string out(const std::string& w) const override {
    // unique pair with a prefix of w, if any
    for (int l = std::min<int>(max_a_, static_cast<int>(w.size())); l >= 0; --l) {
      if (!firsts_.count(w.substr(0, l))) continue;
      auto it = std::lower_bound(pairs_.begin(), pairs_.end(),
                                 std::make_pair(w.substr(0, l), std::string()));
      return it->second + w.substr(l);
    }
    // w is a proper prefix of several domain words: emit the common part
    std::string acc;
    bool any = false;
    for (auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(w, std::string()));
         it != pairs_.end() && is_prefix(w, it->first); ++it) {
      if (!any) {
        acc = it->second;
        any = true;
      } else {
        acc.resize(lcp_len(acc, it->second));
      }
    }
    if (!any)
      throw CantorError(ErrorKind::verification, "prefix-exchange",
                        "word outside the mapped domain: '" + w + "'");
    return acc;
  }

  int rho_lower(int n) const override {
    // exact: extension words contribute |b| + n - |a|; proper prefixes of
    // domain words contribute their forced output length
    bool any = false;
    int best = 0;
    for (auto& [a, b] : pairs_) {
      if (static_cast<int>(a.size()) > n) continue;
      int v = static_cast<int>(b.size()) + n - static_cast<int>(a.size());
      if (!any || v < best) best = v;
      any = true;
    }
    std::set<std::string> prefixes;
    for (auto& [a, b] : pairs_)
      if (static_cast<int>(a.size()) > n) prefixes.insert(a.substr(0, n));
    for (auto& p : prefixes) {
      int v = static_cast<int>(out(p).size());
      if (!any || v < best) best = v;
      any = true;
    }
    return any ? std::max(best, 0) : 0;
  }

  std::string signature() const override {
    std::string s = "px{";
    for (auto& [a, b] : pairs_) s += a + ">" + b + ",";
    s += "}";
    return s;
  }

  std::optional<TailMap> tail_map(const std::string& w) const override {
    for (int l = std::min<int>(max_a_, static_cast<int>(w.size())); l >= 0; --l) {
      if (!firsts_.count(w.substr(0, l))) continue;
      auto it = std::lower_bound(pairs_.begin(), pairs_.end(),
                                 std::make_pair(w.substr(0, l), std::string()));
      return TailMap{it->second + w.substr(l), TailOp::copy};
    }
    return std::nullopt;
  }

  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    std::vector<std::string> words;
    for (int l = std::min<int>(max_a_, static_cast<int>(w.size())); l >= 0; --l) {
      if (!firsts_.count(w.substr(0, l))) continue;
      auto it = std::lower_bound(pairs_.begin(), pairs_.end(),
                                 std::make_pair(w.substr(0, l), std::string()));
      return ClopenSet::cylinder(it->second + w.substr(l));
    }
    for (auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(w, std::string()));
         it != pairs_.end() && is_prefix(w, it->first); ++it)
      words.push_back(it->second);
    if (words.empty()) return std::nullopt;
    return ClopenSet::normalize(std::move(words));
  }

  std::shared_ptr<const Rule> inverse_rule() const override {
    std::vector<std::pair<std::string, std::string>> inv;
    inv.reserve(pairs_.size());
    for (auto& [a, b] : pairs_) inv.emplace_back(b, a);
    return std::make_shared<PrefixExchangeRule>(std::move(inv));
  }

  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::unordered_set<std::string> firsts_;
  int max_a_ = 0;
};

struct RawPiece {
  std::string in;
  std::shared_ptr<const Rule> inner;
  std::string out;
};

class PiecewiseRule final : public Rule {
 public:
  explicit PiecewiseRule(std::vector<RawPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw CantorError(ErrorKind::usage, "piecewise", "no pieces");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const RawPiece& x, const RawPiece& y) { return x.in < y.in; });
    std::vector<std::string> ins;
    for (auto& p : pieces_) {
      require_binary(p.in, "piecewise");
      require_binary(p.out, "piecewise");
      ins.push_back(p.in);
      max_in_ = std::max(max_in_, static_cast<int>(p.in.size()));
    }
    for (size_t i = 0; i + 1 < ins.size(); ++i)
      if (is_prefix(ins[i], ins[i + 1]))
        throw CantorError(ErrorKind::usage, "piecewise", "in-prefixes are not an antichain");
    if (!(clopen_normalize(ins) == ClopenSet::whole()))
      throw CantorError(ErrorKind::usage, "piecewise", "in-prefixes do not cover the space");
  }

  std::string out(const std::string& w) const override {
    for (auto& p : pieces_)
      if (is_prefix(p.in, w)) return p.out + p.inner->out(w.substr(p.in.size()));
    std::string acc;
    bool any = false;
    for (auto& p : pieces_) {
      if (!is_prefix(w, p.in)) continue;
      std::string d = p.out + p.inner->out("");
      if (!any) {
        acc = d;
        any = true;
      } else {
        acc.resize(lcp_len(acc, d));
      }
    }
    if (!any)
      throw CantorError(ErrorKind::verification, "piecewise", "word matches no piece: '" + w + "'");
    return acc;
  }

  int rho_lower(int n) const override {
    int best = -1;
    for (auto& p : pieces_) {
      if (static_cast<int>(p.in.size()) > n) continue;
      int v = static_cast<int>(p.out.size()) +
              std::max(0, p.inner->rho_lower(n - static_cast<int>(p.in.size())));
      if (best < 0 || v < best) best = v;
    }
    std::set<std::string> prefixes;
    for (auto& p : pieces_)
      if (static_cast<int>(p.in.size()) > n) prefixes.insert(p.in.substr(0, n));
    for (auto& q : prefixes) {
      int v = static_cast<int>(out(q).size());
      if (best < 0 || v < best) best = v;
    }
    return std::max(best, 0);
  }

  std::string signature() const override {
    std::string s = "pw{";
    for (auto& p : pieces_) s += p.in + ">" + p.out + ":(" + p.inner->signature() + "),";
    s += "}";
    return s;
  }

  std::optional<TailMap> tail_map(const std::string& w) const override {
    for (auto& p : pieces_) {
      if (!is_prefix(p.in, w)) continue;
      auto tm = p.inner->tail_map(w.substr(p.in.size()));
      if (!tm) return std::nullopt;
      return TailMap{p.out + tm->image, tm->op};
    }
    return std::nullopt;
  }

  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    auto prepend = [](const std::string& pre, const ClopenSet& s) {
      std::vector<std::string> words;
      for (auto& c : s.cylinders()) words.push_back(pre + c);
      return ClopenSet::normalize(std::move(words));
    };
    for (auto& p : pieces_) {
      if (!is_prefix(p.in, w)) continue;
      auto img = p.inner->exact_image(w.substr(p.in.size()));
      if (!img) return std::nullopt;
      return prepend(p.out, *img);
    }
    ClopenSet acc;
    bool any = false;
    for (auto& p : pieces_) {
      if (!is_prefix(w, p.in)) continue;
      auto img = p.inner->exact_image("");
      if (!img) return std::nullopt;
      acc = acc.unite(prepend(p.out, *img));
      any = true;
    }
    if (!any) return std::nullopt;
    return acc;
  }

  std::shared_ptr<const Rule> inverse_rule() const override {
    std::vector<std::string> outs;
    std::vector<RawPiece> inv;
    for (auto& p : pieces_) {
      auto ir = p.inner->inverse_rule();
      if (!ir) return nullptr;
      outs.push_back(p.out);
      inv.push_back(RawPiece{p.out, ir, p.in});
    }
    std::sort(outs.begin(), outs.end());
    for (size_t i = 0; i + 1 < outs.size(); ++i)
      if (is_prefix(outs[i], outs[i + 1])) return nullptr;
    if (!(clopen_normalize(outs) == ClopenSet::whole())) return nullptr;
    return std::make_shared<PiecewiseRule>(std::move(inv));
  }

  bool total_knowledge() const override {
    return std::all_of(pieces_.begin(), pieces_.end(),
                       [](const RawPiece& p) { return p.inner->total_knowledge(); });
  }

 private:
  std::vector<RawPiece> pieces_;
  int max_in_ = 0;
};

// f after g
class ComposeRule final : public Rule {
 public:
  ComposeRule(std::shared_ptr<const Rule> f, std::shared_ptr<const Rule> g)
      : f_(std::move(f)), g_(std::move(g)) {}

  std::string out(const std::string& w) const override { return f_->out(g_->out(w)); }

  int rho_lower(int n) const override { return f_->rho_lower(std::max(0, g_->rho_lower(n))); }

  std::string signature() const override {
    return "(" + f_->signature() + ")o(" + g_->signature() + ")";
  }

  std::optional<TailMap> tail_map(const std::string& w) const override {
    auto t1 = g_->tail_map(w);
    if (!t1) return std::nullopt;
    auto t2 = f_->tail_map(t1->image);
    if (!t2) return std::nullopt;
    TailOp op = (t1->op == t2->op) ? TailOp::copy : TailOp::flip;
    return TailMap{t2->image, op};
  }

  std::optional<ClopenSet> exact_image(const std::string& w) const override {
    auto mid = g_->exact_image(w);
    if (!mid) return std::nullopt;
    ClopenSet acc;
    for (auto& c : mid->cylinders()) {
      auto img = f_->exact_image(c);
      if (!img) return std::nullopt;
      acc = acc.unite(*img);
    }
    return acc;
  }

  std::shared_ptr<const Rule> inverse_rule() const override {
    auto fi = f_->inverse_rule();
    auto gi = g_->inverse_rule();
    if (!fi || !gi) return nullptr;
    return std::make_shared<ComposeRule>(gi, fi);
  }

  bool total_knowledge() const override {
    return f_->total_knowledge() && g_->total_knowledge();
  }

 private:
  std::shared_ptr<const Rule> f_, g_;
};

// Level maps loaded from JSON: complete tables at each ladder depth.
// Knowledge plateaus past the deepest level; this is an honest horizon,
// never an extrapolation.
struct TableData {
  std::vector<int> levels;                              // sorted
  std::vector<std::map<std::string, std::string>> maps;  // parallel to levels
};

class TableRule final : public Rule {
 public:
  TableRule(std::shared_ptr<const TableData> fwd, std::shared_ptr<const TableData> inv)
      : fwd_(std::move(fwd)), inv_(std::move(inv)) {}

  std::string out(const std::string& w) const override {
    int best = -1;
    for (size_t i = 0; i < fwd_->levels.size(); ++i)
      if (fwd_->levels[i] <= static_cast<int>(w.size())) best = static_cast<int>(i);
    if (best >= 0) return fwd_->maps[best].at(w.substr(0, fwd_->levels[best]));
    // below the shallowest level: common part of all extensions
    const auto& m = fwd_->maps[0];
    std::string acc;
    bool any = false;
    for (auto it = m.lower_bound(w); it != m.end() && is_prefix(w, it->first); ++it) {
      if (!any) {
        acc = it->second;
        any = true;
      } else {
        acc.resize(lcp_len(acc, it->second));
      }
    }
    return acc;
  }

  int rho_lower(int n) const override {
    int best = -1;
    for (size_t i = 0; i < fwd_->levels.size(); ++i)
      if (fwd_->levels[i] <= n) best = static_cast<int>(i);
    if (best < 0) return 0;
    int r = -1;
    for (auto& [w, v] : fwd_->maps[best]) {
      int len = static_cast<int>(v.size());
      if (r < 0 || len < r) r = len;
    }
    return std::max(r, 0);
  }

  std::string signature() const override {
    std::string s = "table:";
    for (size_t i = 0; i < fwd_->levels.size(); ++i) {
      s += std::to_string(fwd_->levels[i]) + "{";
      for (auto& [w, v] : fwd_->maps[i]) s += w + ">" + v + ",";
      s += "}";
    }
    return s;
  }

  std::shared_ptr<const Rule> inverse_rule() const override {
    if (!inv_) return nullptr;
    return std::make_shared<TableRule>(inv_, fwd_);
  }

  bool total_knowledge() const override { return false; }

 private:
  std::shared_ptr<const TableData> fwd_, inv_;
};

std::shared_ptr<const TableData> parse_table(const nlohmann::json& j) {
  if (!j.contains("ladder") || !j.contains("maps"))
    throw CantorError(ErrorKind::usage, "transducer", "table JSON needs 'ladder' and 'maps'");
  auto data = std::make_shared<TableData>();
  for (auto& v : j.at("ladder")) data->levels.push_back(v.get<int>());
  std::sort(data->levels.begin(), data->levels.end());
  if (data->levels.empty() || data->levels.front() < 1)
    throw CantorError(ErrorKind::usage, "transducer", "ladder must list depths >= 1");
  for (int d : data->levels) {
    const auto key = std::to_string(d);
    if (!j.at("maps").contains(key))
      throw CantorError(ErrorKind::usage, "transducer", "missing level map for depth " + key);
    std::map<std::string, std::string> m;
    for (auto& [w, v] : j.at("maps").at(key).items()) {
      require_binary(w, "transducer");
      require_binary(v.get<std::string>(), "transducer");
      m[w] = v.get<std::string>();
    }
    if (m.size() != (size_t{1} << d))
      throw CantorError(ErrorKind::usage, "transducer",
                        "level " + key + " map must cover all " + std::to_string(1 << d) +
                            " words");
    for (auto& [w, v] : m)
      if (static_cast<int>(w.size()) != d)
        throw CantorError(ErrorKind::usage, "transducer", "level " + key + " key '" + w +
                                                              "' has wrong length");
    data->maps.push_back(std::move(m));
  }
  // prefix consistency across levels
  for (size_t i = 0; i + 1 < data->levels.size(); ++i) {
    int d = data->levels[i];
    for (auto& [w, v] : data->maps[i + 1])
      if (!is_prefix(data->maps[i].at(w.substr(0, d)), v))
        throw CantorError(ErrorKind::usage, "transducer",
                          "level maps are not prefix-consistent at '" + w + "'");
  }
  return data;
}

}  // namespace

// ------------------------------------------------------------ CantorPoint

struct CantorPoint::Node {
  // pattern form
  std::string pre, per;
  // image form
  std::shared_ptr<Node> base;
  std::shared_ptr<const Rule> via_rule;
  std::optional<Transducer> via;
  mutable std::mutex mu;
  mutable std::string memo;

  int bit(long i) const {
    if (!via) {
      if (i < static_cast<long>(pre.size())) return pre[i] - '0';
      return per[(i - pre.size()) % per.size()] - '0';
    }
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<long>(memo.size()) <= i) {
      int n = via->depth_for(static_cast<int>(memo.size()) + 1);
      std::string w(n, '0');
      for (int k = 0; k < n; ++k) w[k] = static_cast<char>('0' + base->bit(k));
      std::string o = via->out(w);
      if (static_cast<long>(o.size()) <= i && static_cast<long>(o.size()) <= static_cast<long>(memo.size()))
        throw CantorError(ErrorKind::precision, "point",
                          "image generator made no progress at index " + std::to_string(i));
      memo = o;
    }
    return memo[i] - '0';
  }
};

CantorPoint CantorPoint::periodic(const std::string& period) {
  return eventually("", period);
}

CantorPoint CantorPoint::eventually(const std::string& preamble, const std::string& period) {
  require_binary(preamble, "point");
  require_binary(period, "point");
  if (period.empty()) throw CantorError(ErrorKind::usage, "point", "period must be nonempty");
  CantorPoint p;
  p.node_ = std::make_shared<Node>();
  p.node_->pre = preamble;
  p.node_->per = period;
  return p;
}

CantorPoint CantorPoint::image(const Transducer& t, const CantorPoint& base) {
  CantorPoint p;
  p.node_ = std::make_shared<Node>();
  p.node_->base = base.node_;
  p.node_->via = t;
  return p;
}

int CantorPoint::bit(long i) const {
  if (i < 0) throw CantorError(ErrorKind::usage, "point", "negative bit index");
  return node_->bit(i);
}

std::string CantorPoint::prefix(int n) const {
  std::string w(static_cast<size_t>(std::max(n, 0)), '0');
  for (int i = 0; i < n; ++i) w[i] = static_cast<char>('0' + bit(i));
  return w;
}

// ------------------------------------------------------------- Transducer

struct Transducer::Impl {
  std::shared_ptr<const Rule> rule;
  Kind kind;
  int max_depth;
  mutable std::mutex mu;
  mutable std::vector<int> rho_cache;
  mutable std::map<int, std::optional<std::string>> onto_cache;
  std::shared_ptr<const Rule> inverse;
};

Transducer::Transducer(std::shared_ptr<const Rule> rule, Kind kind, int max_depth) {
  if (!rule) throw CantorError(ErrorKind::usage, "transducer", "null rule");
  if (max_depth < 1) throw CantorError(ErrorKind::usage, "transducer", "max_depth must be >= 1");
  impl_ = std::make_shared<Impl>();
  impl_->rule = std::move(rule);
  impl_->kind = kind;
  impl_->max_depth = max_depth;
  if (kind == Kind::homeo) {
    impl_->inverse = impl_->rule->inverse_rule();
    if (!impl_->inverse)
      throw CantorError(ErrorKind::usage, "transducer",
                        "homeomorphism kind requires an invertible rule");
  }
}

const Rule& Transducer::rule() const { return *impl_->rule; }
std::shared_ptr<const Rule> Transducer::rule_ptr() const { return impl_->rule; }
Transducer::Kind Transducer::kind() const { return impl_->kind; }
bool Transducer::is_homeo() const { return impl_->kind == Kind::homeo; }
int Transducer::max_depth() const { return impl_->max_depth; }

std::string Transducer::out(const std::string& w) const {
  require_binary(w, "transducer");
  return impl_->rule->out(w);
}

int Transducer::rho(int n) const {
  if (n < 0) return 0;
  std::lock_guard<std::mutex> lock(impl_->mu);
  while (static_cast<int>(impl_->rho_cache.size()) <= n) {
    int i = static_cast<int>(impl_->rho_cache.size());
    int v = std::max(0, impl_->rule->rho_lower(i));
    if (!impl_->rho_cache.empty()) v = std::max(v, impl_->rho_cache.back());
    impl_->rho_cache.push_back(v);
  }
  return impl_->rho_cache[n];
}

int Transducer::depth_for(int p) const {
  if (p <= 0) return 0;
  for (int n = 0; n <= impl_->max_depth; ++n)
    if (rho(n) >= p) return n;
  throw PrecisionUnavailable("input depth achieving output precision " + std::to_string(p), p);
}

std::optional<std::string> Transducer::uncovered_word(int m) const {
  if (m < 0) throw CantorError(ErrorKind::usage, "transducer", "negative onto depth");
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->onto_cache.find(m);
    if (it != impl_->onto_cache.end()) return it->second;
  }
  int n = depth_for(m);
  std::vector<bool> covered(size_t{1} << m, false);
  for (unsigned long long x = 0; x < (1ULL << n); ++x) {
    std::string o = impl_->rule->out(word_at(x, n));
    unsigned long long idx = 0;
    for (int i = 0; i < m; ++i) idx = (idx << 1) | static_cast<unsigned long long>(o[i] - '0');
    covered[idx] = true;
  }
  std::optional<std::string> result;
  for (unsigned long long x = 0; x < (1ULL << m); ++x)
    if (!covered[x]) {
      result = word_at(x, m);
      break;
    }
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->onto_cache[m] = result;
  return result;
}

bool Transducer::onto_at(int m) const { return !uncovered_word(m).has_value(); }

std::optional<TailMap> Transducer::tail_map(const std::string& w) const {
  require_binary(w, "transducer");
  return impl_->rule->tail_map(w);
}

std::optional<ClopenSet> Transducer::image_of_cylinder(const std::string& w) const {
  require_binary(w, "transducer");
  return impl_->rule->exact_image(w);
}

Transducer Transducer::inverse() const {
  if (impl_->kind != Kind::homeo)
    throw CantorError(ErrorKind::usage, "transducer", "inverse of a non-homeomorphism");
  return Transducer(impl_->inverse, Kind::homeo, impl_->max_depth);
}

std::string Transducer::signature() const { return impl_->rule->signature(); }

bool Transducer::same_map(const Transducer& o) const {
  if (impl_ == o.impl_ || impl_->rule == o.impl_->rule) return true;
  return impl_->rule->total_knowledge() && o.impl_->rule->total_knowledge() &&
         impl_->rule->signature() == o.impl_->rule->signature();
}

namespace {

nlohmann::json level_table(const Rule& r, int table_depth) {
  nlohmann::json level = nlohmann::json::object();
  for (unsigned long long x = 0; x < (1ULL << table_depth); ++x) {
    std::string w = word_at(x, table_depth);
    level[w] = r.out(w);
  }
  nlohmann::json j;
  j["ladder"] = {table_depth};
  nlohmann::json maps = nlohmann::json::object();
  maps[std::to_string(table_depth)] = std::move(level);
  j["maps"] = std::move(maps);
  return j;
}

}  // namespace

nlohmann::json Transducer::to_json(int table_depth) const {
  if (table_depth < 1 || table_depth > 20)
    throw CantorError(ErrorKind::usage, "transducer", "table depth out of range");
  nlohmann::json j = level_table(*impl_->rule, table_depth);
  j["kind"] = is_homeo() ? "homeo" : "endo";
  if (is_homeo()) j["inverse"] = level_table(*impl_->inverse, table_depth);
  return j;
}

Transducer Transducer::from_json(const nlohmann::json& j, int max_depth) {
  auto fwd = parse_table(j);
  std::string kind = j.value("kind", "endo");
  if (kind == "endo") {
    return Transducer(std::make_shared<TableRule>(fwd, nullptr), Kind::endo, max_depth);
  }
  if (kind != "homeo")
    throw CantorError(ErrorKind::usage, "transducer", "kind must be 'endo' or 'homeo'");
  if (!j.contains("inverse"))
    throw CantorError(ErrorKind::usage, "transducer", "homeo table needs an 'inverse' table");
  auto inv = parse_table(j.at("inverse"));
  auto rule = std::make_shared<TableRule>(fwd, inv);
  auto irule = std::make_shared<TableRule>(inv, fwd);
  // round trip must be prefix-consistent with the identity wherever decided
  for (size_t i = 0; i < fwd->levels.size(); ++i)
    for (auto& [w, v] : fwd->maps[i]) {
      std::string back = irule->out(v);
      if (first_disagreement(back, w) >= 0)
        throw CantorError(ErrorKind::usage, "transducer",
                          "inverse table does not invert the forward table at '" + w + "'");
    }
  return Transducer(rule, Kind::homeo, max_depth);
}

// ------------------------------------------------------------- operations

std::string apply(const Transducer& f, const CantorPoint& x, int precision) {
  int n = f.depth_for(precision);
  return f.out(x.prefix(n));
}

nlohmann::json DistanceCertificate::to_json() const {
  nlohmann::json j;
  j["upper"] = upper.str();
  j["lower"] = lower.str();
  j["depth_used"] = depth_used;
  j["witness"] = witness;
  return j;
}

DistanceCertificate sup_distance(const Transducer& f, const Transducer& g, int depth) {
  if (depth < 0 || depth > f.max_depth() || depth > g.max_depth())
    throw PrecisionUnavailable("sup_distance at depth " + std::to_string(depth), depth);
  DistanceCertificate cert;
  cert.depth_used = depth;
  if (f.same_map(g)) {
    cert.upper = Dyadic::zero();
    cert.lower = Dyadic::zero();
    return cert;
  }
  Dyadic upper = Dyadic::zero();
  Dyadic lower = Dyadic::zero();
  std::string witness;
  int witness_index = -1;
  for (unsigned long long x = 0; x < (1ULL << depth); ++x) {
    std::string w = word_at(x, depth);
    std::string a = f.out(w);
    std::string b = g.out(w);
    int i = first_disagreement(a, b);
    if (i >= 0) {
      Dyadic v = Dyadic::pow2(i);
      upper = Dyadic::max_of(upper, v);
      if (lower < v) {
        lower = v;
        witness = w;
        witness_index = i;
      }
    } else {
      upper = Dyadic::max_of(upper, Dyadic::pow2(static_cast<int>(std::min(a.size(), b.size()))));
    }
  }
  // trim the witness to the shortest prefix already exhibiting the
  // disagreement
  if (witness_index >= 0) {
    for (size_t l = 0; l <= witness.size(); ++l) {
      std::string p = witness.substr(0, l);
      if (first_disagreement(f.out(p), g.out(p)) == witness_index) {
        witness = p;
        break;
      }
    }
  }
  cert.upper = upper;
  cert.lower = lower;
  cert.witness = witness;
  return cert;
}

Dyadic modulus_delta(const Transducer& f, Dyadic eps) {
  if (eps.is_zero()) throw CantorError(ErrorKind::usage, "modulus", "epsilon must be positive");
  int e = eps.exponent();
  int need = e + 2;
  for (int m = std::max(0, need); m <= f.max_depth(); ++m)
    if (f.rho(m) >= need) return Dyadic::pow2(m);
  throw PrecisionUnavailable("modulus for epsilon " + eps.str(), need);
}

// --------------------------------------------------------- prefix algebra

ClopenSet PrefixExchange::domain() const {
  std::vector<std::string> w;
  w.reserve(pairs.size());
  for (auto& [a, b] : pairs) w.push_back(a);
  return ClopenSet::normalize(std::move(w));
}

ClopenSet PrefixExchange::range() const {
  std::vector<std::string> w;
  w.reserve(pairs.size());
  for (auto& [a, b] : pairs) w.push_back(b);
  return ClopenSet::normalize(std::move(w));
}

PrefixExchange clopen_homeo(const ClopenSet& a, const ClopenSet& b) {
  if (a.is_empty()) throw EmptyClopen("clopen_homeo domain");
  if (b.is_empty()) throw EmptyClopen("clopen_homeo range");
  std::vector<std::string> xs = a.cylinders();
  std::vector<std::string> ys = b.cylinders();
  // split the shortest word (largest cylinder), lexicographically first on
  // ties, in whichever list is smaller, until the sizes agree
  auto split_once = [](std::vector<std::string>& v) {
    size_t best = 0;
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i].size() < v[best].size()) best = i;
    std::string w = v[best];
    v[best] = w + "0";
    v.insert(v.begin() + static_cast<long>(best) + 1, w + "1");
  };
  while (xs.size() != ys.size()) {
    if (xs.size() < ys.size())
      split_once(xs);
    else
      split_once(ys);
  }
  PrefixExchange px;
  px.pairs.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) px.pairs.emplace_back(xs[i], ys[i]);
  return px;
}

Transducer glue(const std::vector<PrefixExchange>& pieces, int max_depth) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (auto& p : pieces)
    pairs.insert(pairs.end(), p.pairs.begin(), p.pairs.end());
  if (pairs.empty()) throw CantorError(ErrorKind::usage, "glue", "no pieces");
  auto rule = std::make_shared<PrefixExchangeRule>(pairs);  // validates antichains
  std::vector<std::string> firsts, seconds;
  for (auto& [x, y] : pairs) {
    firsts.push_back(x);
    seconds.push_back(y);
  }
  if (!(clopen_normalize(firsts) == ClopenSet::whole()))
    throw CantorError(ErrorKind::usage, "glue", "domains do not cover the space");
  if (!(clopen_normalize(seconds) == ClopenSet::whole()))
    throw CantorError(ErrorKind::usage, "glue", "ranges do not cover the space");
  return Transducer(rule, Transducer::Kind::homeo, max_depth);
}

Transducer prefix_exchange_map(std::vector<std::pair<std::string, std::string>> pairs,
                               int max_depth) {
  PrefixExchange px;
  px.pairs = std::move(pairs);
  return glue({px}, max_depth);
}

Transducer compose(const Transducer& f, const Transducer& g) {
  auto rule = std::make_shared<ComposeRule>(f.rule_ptr(), g.rule_ptr());
  auto kind = (f.is_homeo() && g.is_homeo()) ? Transducer::Kind::homeo : Transducer::Kind::endo;
  return Transducer(rule, kind, std::max(f.max_depth(), g.max_depth()));
}

Transducer power(const Transducer& f, int n) {
  if (n < 0) throw CantorError(ErrorKind::usage, "power", "negative exponent");
  if (n == 0) return identity_map();
  Transducer acc = f;
  for (int i = 1; i < n; ++i) acc = compose(f, acc);
  return acc;
}

Transducer piecewise(std::vector<Piece> pieces, int max_depth) {
  std::vector<RawPiece> raw;
  bool all_homeo = true;
  raw.reserve(pieces.size());
  for (auto& p : pieces) {
    all_homeo = all_homeo && p.inner.is_homeo();
    raw.push_back(RawPiece{p.in_prefix, p.inner.rule_ptr(), p.out_prefix});
  }
  auto rule = std::make_shared<PiecewiseRule>(std::move(raw));
  auto kind = (all_homeo && rule->inverse_rule()) ? Transducer::Kind::homeo
                                                  : Transducer::Kind::endo;
  return Transducer(rule, kind, max_depth);
}

// ---------------------------------------------------------------- builtins

Transducer shift_map() {
  static const Transducer t(std::make_shared<ShiftRule>(), Transducer::Kind::endo);
  return t;
}

Transducer identity_map() {
  static const Transducer t(std::make_shared<IdentityRule>(), Transducer::Kind::homeo);
  return t;
}

Transducer bitflip_map() {
  static const Transducer t(std::make_shared<BitflipRule>(), Transducer::Kind::homeo);
  return t;
}

Transducer odometer_map() {
  static const Transducer t(std::make_shared<OdometerRule>(), Transducer::Kind::homeo);
  return t;
}

}  // namespace cantor
