#include "cantor/sft_model.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <vector>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

// visiting order of two-sided coordinates: 0, -1, 1, -2, 2, ...
long coord_at_step(long s) {
  if (s == 0) return 0;
  return (s % 2) ? -((s + 1) / 2) : s / 2;
}

// path of `v` through the balanced tree over the sorted candidate list:
// the left branch always takes the larger half
void append_choice(const std::vector<int>& cands, int v, std::string& out) {
  int lo = 0, hi = static_cast<int>(cands.size());
  int idx = static_cast<int>(std::lower_bound(cands.begin(), cands.end(), v) - cands.begin());
  while (hi - lo > 1) {
    int split = lo + (hi - lo + 1) / 2;
    if (idx < split) {
      out.push_back('0');
      hi = split;
    } else {
      out.push_back('1');
      lo = split;
    }
  }
}

}  // namespace

struct SftModel::Codec {
  DirectedGraph graph;
  std::vector<int> all;             // 0..n-1
  std::vector<std::string> codes;   // choice path of each vertex at step 0
  int forced_cap;

  explicit Codec(const DirectedGraph& g) : graph(g) {
    all.resize(g.order());
    std::iota(all.begin(), all.end(), 0);
    codes.resize(g.order());
    for (int v = 0; v < g.order(); ++v) append_choice(all, v, codes[v]);
    forced_cap = 2 * g.order() + 64;
  }

  const std::vector<int>& allowed(const std::map<long, int>& m, long p) const {
    if (p == 0) return all;
    if (p < 0) return graph.in(m.at(p + 1));
    return graph.out(m.at(p - 1));
  }

  // consume bits of w in visiting order; stop at the first choice the
  // bits do not decide (or once a forced run exceeds the cap, which only
  // happens for degenerate graphs the constructor rejects)
  std::map<long, int> decode(const std::string& w) const {
    std::map<long, int> m;
    size_t i = 0;
    int forced_run = 0;
    for (long s = 0;; ++s) {
      long p = coord_at_step(s);
      const std::vector<int>& cands = allowed(m, p);
      if (cands.size() == 1) {
        m[p] = cands[0];
        if (++forced_run > forced_cap) break;
        continue;
      }
      forced_run = 0;
      int lo = 0, hi = static_cast<int>(cands.size());
      bool starved = false;
      while (hi - lo > 1) {
        if (i == w.size()) {
          starved = true;
          break;
        }
        int split = lo + (hi - lo + 1) / 2;
        if (w[i++] == '0')
          hi = split;
        else
          lo = split;
      }
      if (starved) break;
      m[p] = cands[lo];
    }
    return m;
  }

  // encoding of the point t'(p) = t(p + dir), emitted in visiting order
  // as far as the known assignments determine it
  std::string encode_shifted(const std::map<long, int>& m, int dir) const {
    std::map<long, int> placed;
    std::string out;
    int forced_run = 0;
    for (long s = 0;; ++s) {
      long p = coord_at_step(s);
      const std::vector<int>& cands = allowed(placed, p);
      auto src = m.find(p + dir);
      if (cands.size() == 1) {
        if (src != m.end() && src->second != cands[0])
          throw CantorError(ErrorKind::verification, "model",
                            "shifted assignments contradict the graph");
        placed[p] = cands[0];
        if (++forced_run > forced_cap) break;
        continue;
      }
      forced_run = 0;
      if (src == m.end()) break;
      if (!std::binary_search(cands.begin(), cands.end(), src->second))
        throw CantorError(ErrorKind::verification, "model",
                          "shifted assignment is not locally allowed");
      append_choice(cands, src->second, out);
      placed[p] = src->second;
    }
    return out;
  }
};

namespace {

class ModelShiftRule final : public Rule {
 public:
  ModelShiftRule(std::shared_ptr<const SftModel::Codec> codec, int dir)
      : codec_(std::move(codec)), dir_(dir) {}

  std::string out(const std::string& w) const override {
    return codec_->encode_shifted(codec_->decode(w), dir_);
  }

  // exact per-depth minimum output length, by enumeration (memoized)
  int rho_lower(int n) const override {
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<int>(memo_.size()) <= n) {
      int d = static_cast<int>(memo_.size());
      int best = -1;
      std::string w(d, '0');
      for (unsigned long long x = 0; x < (1ULL << d); ++x) {
        for (int i = 0; i < d; ++i) w[i] = (x & (1ULL << (d - 1 - i))) ? '1' : '0';
        int len = static_cast<int>(out(w).size());
        if (best < 0 || len < best) best = len;
      }
      memo_.push_back(best < 0 ? 0 : best);
    }
    return memo_[n];
  }

  std::string signature() const override {
    std::string s = "sftshift";
    s += (dir_ > 0) ? "+" : "-";
    s += ":";
    for (auto& name : codec_->graph.vertex_names()) s += name + ",";
    s += ";";
    for (auto& [u, v] : codec_->graph.edges())
      s += std::to_string(u) + ">" + std::to_string(v) + ",";
    return s;
  }

  std::shared_ptr<const Rule> inverse_rule() const override {
    return std::make_shared<ModelShiftRule>(codec_, -dir_);
  }

 private:
  std::shared_ptr<const SftModel::Codec> codec_;
  int dir_;
  mutable std::mutex mu_;
  mutable std::vector<int> memo_;
};

}  // namespace

SftModel::SftModel(Sft sft, int max_depth)
    : SftModel(std::make_shared<const Sft>(std::move(sft)), max_depth) {}

SftModel::SftModel(std::shared_ptr<const Sft> sft, int max_depth)
    : sft_(std::move(sft)),
      codec_([&] {
        auto check = cantor_check(*sft_);
        if (!check.yes)
          throw CantorError(ErrorKind::hypothesis, "model",
                            "shift space is not a Cantor set: " + check.reason);
        return std::make_shared<const Codec>(sft_->graph());
      }()),
      max_depth_(max_depth),
      shift_(Transducer(std::make_shared<ModelShiftRule>(codec_, +1),
                        Transducer::Kind::homeo, max_depth)) {}

const std::string& SftModel::vertex_code(int u) const { return codec_->codes.at(u); }

std::map<long, int> SftModel::decode(const std::string& w) const { return codec_->decode(w); }

nlohmann::json SftModel::to_json() const {
  nlohmann::json j;
  j["graph"] = graph().to_json();
  nlohmann::json codes = nlohmann::json::object();
  for (int v = 0; v < graph().order(); ++v) codes[graph().name(v)] = vertex_code(v);
  j["codes"] = codes;
  return j;
}

}  // namespace cantor
