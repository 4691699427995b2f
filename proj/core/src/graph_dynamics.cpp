#include "cantor/graph_dynamics.hpp"

#include <algorithm>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

std::string word_of(unsigned long long x, int n) {
  std::string w(n, '0');
  for (int i = 0; i < n; ++i)
    if (x & (1ULL << (n - 1 - i))) w[i] = '1';
  return w;
}

}  // namespace

ClopenSet exact_preimage(const Transducer& t, const ClopenSet& s) {
  if (s.is_empty()) return s;
  int d = s.max_depth();
  int n = t.depth_for(d);
  std::vector<std::string> hits;
  std::string w;
  // s is a union of depth-<=d cylinders, so once |out(w)| >= d the image
  // cylinder is inside s or disjoint from it; shallower prefixes may
  // already decide either way
  auto rec = [&](auto&& self) -> void {
    std::string o = t.out(w);
    if (s.contains_point_prefix(o)) {
      hits.push_back(w);
      return;
    }
    if (!s.meets_cylinder(o)) return;
    if (static_cast<int>(w.size()) >= n) return;  // unreachable: |o| >= d decides
    w.push_back('0');
    self(self);
    w.back() = '1';
    self(self);
    w.pop_back();
  };
  rec(rec);
  return ClopenSet::normalize(std::move(hits));
}

ClopenSet exact_image(const Transducer& t, const ClopenSet& s) {
  if (s.is_empty()) return s;
  if (t.is_homeo()) return exact_preimage(t.inverse(), s);
  ClopenSet acc = ClopenSet::empty_set();
  std::vector<std::string> queue = s.cylinders();
  while (!queue.empty()) {
    std::string w = std::move(queue.back());
    queue.pop_back();
    if (auto img = t.image_of_cylinder(w)) {
      acc = acc.unite(*img);
      continue;
    }
    if (static_cast<int>(w.size()) >= t.max_depth())
      throw PrecisionUnavailable("exact image of cylinder [" + w + "]",
                                 static_cast<int>(w.size()) + 1);
    queue.push_back(w + "0");
    queue.push_back(w + "1");
  }
  return acc;
}

nlohmann::json DynGraph::to_json() const {
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : witnesses)
    ws.push_back({{"from", w.from},
                  {"to", w.to},
                  {"in", w.input_word},
                  {"out", w.output_word}});
  return {{"graph", graph.to_json()},
          {"partition", partition.to_json()},
          {"depth_used", depth_used},
          {"witnesses", ws}};
}

DynGraph dynamics_graph(const Transducer& f, const CPartition& p, int depth) {
  int d_part = p.max_cylinder_depth();
  if (depth < d_part)
    throw CantorError(ErrorKind::usage, "dynamics",
                      "depth " + std::to_string(depth) +
                          " does not cover partition cylinders of depth " +
                          std::to_string(d_part));
  if (f.rho(depth) < d_part)
    throw PrecisionUnavailable(
        "transition graph needs output depth " + std::to_string(d_part) +
            " at input depth " + std::to_string(depth),
        d_part);
  // onto at the partition depth guarantees every part an incoming edge
  if (auto miss = f.uncovered_word(d_part))
    throw DegreeViolation(p.parts().at(p.index_of_word(*miss)).label(), "in");

  std::map<std::pair<int, int>, EdgeWitness> found;
  for (unsigned long long x = 0; x < (1ULL << depth); ++x) {
    std::string w = word_of(x, depth);
    std::string o = f.out(w);
    int i = p.index_of_word(w);
    int j = p.index_of_word(o);
    found.try_emplace({i, j}, EdgeWitness{i, j, w, o});
  }

  std::vector<std::string> names;
  names.reserve(p.parts().size());
  for (const auto& part : p.parts()) names.push_back(part.label());
  std::vector<std::pair<int, int>> edges;
  edges.reserve(found.size());
  for (const auto& [e, unused] : found) edges.push_back(e);
  DirectedGraph graph(std::move(names), std::move(edges));

  std::vector<EdgeWitness> witnesses;
  witnesses.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) witnesses.push_back(found.at(e));
  return DynGraph{std::move(graph), p, depth, std::move(witnesses)};
}

nlohmann::json SubgraphCertificate::to_json() const {
  nlohmann::json missing = nlohmann::json::array();
  for (const auto& [u, v] : missing_edges)
    missing.push_back({{"from", u},
                       {"to", v},
                       {"from_part", g_graph.graph.name(u)},
                       {"to_part", g_graph.graph.name(v)}});
  return {{"f_graph", f_graph.to_json()},
          {"g_graph", g_graph.to_json()},
          {"epsilon", epsilon.str()},
          {"delta", delta.str()},
          {"mesh", mesh.str()},
          {"certified_upper", certified_upper.str()},
          {"holds", holds},
          {"missing_edges", missing}};
}

SubgraphCertificate subgraph_certificate(const Transducer& f, const Transducer& g,
                                         const CPartition& p, Dyadic eps) {
  if (eps.is_zero())
    throw CantorError(ErrorKind::usage, "subgraph", "epsilon must be positive");
  Dyadic delta = modulus_delta(f, eps);
  if (p.mesh() > delta) throw MeshTooCoarse(p.mesh().str(), delta.str());

  int d_part = p.max_cylinder_depth();
  int depth = std::max({d_part, f.depth_for(d_part), g.depth_for(d_part)});
  DynGraph fg = dynamics_graph(f, p, depth);
  DynGraph gg = dynamics_graph(g, p, depth);

  std::vector<std::pair<int, int>> missing;
  for (const auto& e : gg.graph.edges())
    if (!fg.graph.has_edge(e.first, e.second)) missing.push_back(e);
  bool holds = missing.empty();
  Dyadic upper =
      holds ? Dyadic::max_of(eps.half().half(), p.mesh()) : Dyadic::one();
  return SubgraphCertificate{std::move(fg), std::move(gg), eps,    delta,
                             p.mesh(),      upper,         holds, std::move(missing)};
}

std::vector<ApproxStage> sft_approximation(const Transducer& f,
                                           const std::vector<CPartition>& partitions,
                                           int max_depth) {
  if (partitions.empty())
    throw CantorError(ErrorKind::usage, "approximation", "no partitions given");
  for (size_t i = 0; i < partitions.size(); ++i) {
    if (partitions[i].size() < 2)
      throw CantorError(ErrorKind::usage, "approximation",
                        "partition " + std::to_string(i + 1) + " is trivial");
    if (i > 0 && !(partitions[i].mesh() < partitions[i - 1].mesh()))
      throw CantorError(ErrorKind::usage, "approximation",
                        "meshes must be strictly decreasing");
  }

  std::vector<ApproxStage> stages;
  for (size_t i = 0; i < partitions.size(); ++i) {
    int k = static_cast<int>(i) + 1;
    const CPartition& p = partitions[i];
    int d_part = p.max_cylinder_depth();
    DynGraph dg = dynamics_graph(f, p, std::max(d_part, f.depth_for(d_part)));

    MixingCertificate mc = mixing_certificate(dg.graph);
    if (!mc.primitive) throw ChainMixingUnverified(k, mc.reason);
    Sft sft(dg.graph);
    CantorCheck cc = cantor_check(sft);
    if (!cc.yes) throw NotCantor(k, cc.reason);

    SftModel model(sft, max_depth);
    std::vector<PrefixExchange> pieces;
    pieces.reserve(p.parts().size());
    for (int u = 0; u < dg.graph.order(); ++u)
      pieces.push_back(clopen_homeo(ClopenSet::cylinder(model.vertex_code(u)),
                                    p.parts().at(u)));
    Transducer psi = glue(pieces, max_depth);
    Transducer h = compose(psi, compose(model.shift(), psi.inverse()));

    // the best exponent this mesh and f's modulus can certify
    int big_k = p.mesh().exponent();
    int e = std::min(big_k - 2, f.rho(big_k) - 2);
    SubgraphCertificate cert = subgraph_certificate(f, h, p, Dyadic::pow2(e));
    bool equal = cert.f_graph.graph.edges() == cert.g_graph.graph.edges();
    stages.push_back(ApproxStage{std::move(sft), std::move(model), std::move(psi),
                                 std::move(h), std::move(cert), equal});
  }
  return stages;
}

struct ItineraryMap::Impl {
  Transducer g, ginv;
  CPartition v;
  int cap;
  std::vector<std::vector<ClopenSet>> pre;  // pre[l][c] = g^-l(part c)
  std::vector<std::vector<Word>> lang;      // lang[l], lex by part index
  std::vector<std::string> labels;
};

class ItineraryMap::WindowView : public SubshiftWindow {
 public:
  explicit WindowView(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  int alphabet_size() const override { return impl_->v.size(); }
  std::string symbol_name(int a) const override { return impl_->labels.at(a); }
  int length_cap() const override { return impl_->cap; }
  bool allowed(const Word& w) const override {
    if (static_cast<int>(w.size()) > impl_->cap)
      throw WindowTooShort(impl_->cap, static_cast<int>(w.size()));
    const auto& sl = impl_->lang[w.size()];
    return std::binary_search(sl.begin(), sl.end(), w);
  }
  std::string provenance() const override {
    return "itinerary:" + std::to_string(impl_->v.size()) + " parts";
  }
  void for_each_word(int l,
                     const std::function<void(const Word&)>& fn) const override {
    if (l < 0) throw CantorError(ErrorKind::usage, "window", "negative length");
    if (l > impl_->cap) throw WindowTooShort(impl_->cap, l);
    for (const Word& w : impl_->lang[l]) fn(w);
  }

 private:
  std::shared_ptr<const Impl> impl_;
};

ItineraryMap::ItineraryMap(const Transducer& g, CPartition v, int l_lang) {
  if (!g.is_homeo())
    throw CantorError(ErrorKind::usage, "itinerary",
                      "source must be a homeomorphism");
  if (v.size() < 2)
    throw CantorError(ErrorKind::usage, "itinerary",
                      "partition must be nontrivial");
  if (l_lang < 1)
    throw CantorError(ErrorKind::usage, "itinerary",
                      "language cap must be at least 1");

  Impl impl{g, g.inverse(), std::move(v), l_lang, {}, {}, {}};
  impl.pre.resize(l_lang);
  impl.pre[0] = impl.v.parts();
  for (int l = 1; l < l_lang; ++l) {
    impl.pre[l].reserve(impl.v.size());
    for (int c = 0; c < impl.v.size(); ++c)
      impl.pre[l].push_back(exact_preimage(g, impl.pre[l - 1][c]));
  }
  for (const auto& part : impl.v.parts()) impl.labels.push_back(part.label());

  impl.lang.resize(l_lang + 1);
  impl.lang[0] = {Word{}};
  Word w;
  auto rec = [&](auto&& self, const ClopenSet& live) -> void {
    int l = static_cast<int>(w.size());
    if (l == l_lang) return;
    for (int c = 0; c < impl.v.size(); ++c) {
      ClopenSet next = live.intersect(impl.pre[l][c]);
      if (next.is_empty()) continue;
      w.push_back(c);
      impl.lang[l + 1].push_back(w);
      self(self, next);
      w.pop_back();
    }
  };
  rec(rec, ClopenSet::whole());
  impl_ = std::make_shared<const Impl>(std::move(impl));
}

const Transducer& ItineraryMap::source() const { return impl_->g; }
const CPartition& ItineraryMap::partition() const { return impl_->v; }
int ItineraryMap::language_cap() const { return impl_->cap; }

const std::vector<Word>& ItineraryMap::language(int l) const {
  if (l < 0) throw CantorError(ErrorKind::usage, "itinerary", "negative length");
  if (l > impl_->cap) throw WindowTooShort(impl_->cap, l);
  return impl_->lang[l];
}

bool ItineraryMap::allowed(const Word& w) const {
  if (static_cast<int>(w.size()) > impl_->cap)
    throw WindowTooShort(impl_->cap, static_cast<int>(w.size()));
  const auto& sl = impl_->lang[w.size()];
  return std::binary_search(sl.begin(), sl.end(), w);
}

ClopenSet ItineraryMap::cylinder_set(const Word& w) const {
  if (static_cast<int>(w.size()) > impl_->cap)
    throw WindowTooShort(impl_->cap, static_cast<int>(w.size()));
  ClopenSet s = ClopenSet::whole();
  for (size_t l = 0; l < w.size(); ++l) {
    if (w[l] < 0 || w[l] >= impl_->v.size())
      throw CantorError(ErrorKind::usage, "itinerary", "symbol out of range");
    s = s.intersect(impl_->pre[l][w[l]]);
  }
  return s;
}

int ItineraryMap::symbol_at(const CantorPoint& y, long l) const {
  CantorPoint z = y;
  for (long i = 0; i < l; ++i) z = CantorPoint::image(impl_->g, z);
  for (long i = 0; i > l; --i) z = CantorPoint::image(impl_->ginv, z);
  return impl_->v.index_of_word(z.prefix(impl_->v.max_cylinder_depth()));
}

Word ItineraryMap::itinerary(const CantorPoint& y, long from, int len) const {
  CantorPoint z = y;
  for (long i = 0; i < from; ++i) z = CantorPoint::image(impl_->g, z);
  for (long i = 0; i > from; --i) z = CantorPoint::image(impl_->ginv, z);
  Word out;
  out.reserve(len);
  for (int i = 0; i < len; ++i) {
    out.push_back(impl_->v.index_of_word(z.prefix(impl_->v.max_cylinder_depth())));
    if (i + 1 < len) z = CantorPoint::image(impl_->g, z);
  }
  return out;
}

std::shared_ptr<const SubshiftWindow> ItineraryMap::window() const {
  return std::make_shared<const WindowView>(impl_);
}

nlohmann::json ItineraryMap::to_json() const {
  return {{"cap", impl_->cap},
          {"partition", impl_->v.to_json()},
          {"language", impl_->lang}};
}

nlohmann::json PeriodEvidence::to_json() const {
  nlohmann::json wit = nlohmann::json::object();
  for (const auto& [n, w] : witness) wit[std::to_string(n)] = w;
  return {{"bound", bound}, {"present", present}, {"absent", absent},
          {"witness", wit}};
}

PeriodEvidence period_evidence(const Transducer& t, int bound,
                               const PerconOptions& opt) {
  if (bound < 1)
    throw CantorError(ErrorKind::usage, "percon", "bound must be at least 1");
  PeriodEvidence ev;
  ev.bound = bound;

  // closed paths of every transition graph over-approximate the spectrum,
  // so a length absent from any one of them is certifiably not a period
  std::set<int> could;
  bool have_graph = false;
  for (int kk = 1; kk <= opt.max_partition_depth; ++kk) {
    int depth;
    try {
      depth = std::max(kk, t.depth_for(kk));
    } catch (const PrecisionUnavailable&) {
      break;
    }
    DynGraph dg = dynamics_graph(t, depth_partition(kk), depth);
    PeriodSpectrum spec = period_spectrum(dg.graph, bound);
    if (!have_graph) {
      could = spec.present;
      have_graph = true;
    } else {
      std::set<int> keep;
      for (int n : could)
        if (spec.contains(n)) keep.insert(n);
      could = std::move(keep);
    }
  }
  if (have_graph)
    for (int n = 1; n <= bound; ++n)
      if (!could.count(n)) ev.absent.insert(n);

  // a tail map of t^n sending [w] to a prefix-comparable cylinder pins an
  // eventually periodic fixed point of t^n, hence period n (and multiples)
  for (int n = 1; n <= bound; ++n) {
    if (ev.present.count(n)) continue;
    Transducer tn = power(t, n);
    std::string found;
    bool ok = false;
    for (int d = 0; d <= opt.probe_depth && !ok; ++d) {
      for (unsigned long long x = 0; x < (1ULL << d) && !ok; ++x) {
        std::string w = word_of(x, d);
        auto tm = tn.tail_map(w);
        if (!tm || tm->op != TailOp::copy) continue;
        const std::string& im = tm->image;
        bool comparable =
            im.size() <= w.size()
                ? std::equal(im.begin(), im.end(), w.begin())
                : std::equal(w.begin(), w.end(), im.begin());
        if (comparable) {
          found = w;
          ok = true;
        }
      }
    }
    if (ok)
      for (int m = n; m <= bound; m += n) {
        ev.present.insert(m);
        ev.witness.emplace(m, found);
      }
  }

  for (int n : ev.present)
    if (ev.absent.count(n))
      throw CantorError(ErrorKind::verification, "percon",
                        "contradictory evidence for period " + std::to_string(n));
  return ev;
}

nlohmann::json PerconVerdict::to_json() const {
  return {{"bound", bound},
          {"holds_up_to_bound", holds_up_to_bound},
          {"shortcut", shortcut},
          {"violations", violations},
          {"unresolved", unresolved}};
}

namespace {

bool has_self_loop(const DirectedGraph& g) {
  for (int u = 0; u < g.order(); ++u)
    if (g.has_edge(u, u)) return true;
  return false;
}

}  // namespace

PerconVerdict per_containment(const Transducer& g, const Sft& target, int bound,
                              const PerconOptions& opt) {
  if (bound < 1)
    throw CantorError(ErrorKind::usage, "percon", "bound must be at least 1");
  PerconVerdict v;
  v.bound = bound;
  if (has_self_loop(target.graph())) {
    // a fixed point has every period
    v.shortcut = true;
    v.holds_up_to_bound = true;
    return v;
  }
  PeriodSpectrum tspec = period_spectrum(target.graph(), bound);
  PeriodEvidence src = period_evidence(g, bound, opt);
  for (int n = 1; n <= bound; ++n) {
    if (tspec.contains(n)) continue;
    if (src.absent.count(n)) continue;
    if (src.present.count(n))
      v.violations.push_back(n);
    else
      v.unresolved.push_back(n);
  }
  v.holds_up_to_bound = v.violations.empty() && v.unresolved.empty();
  return v;
}

PerconVerdict per_containment(const Transducer& g, const Transducer& f, int bound,
                              const PerconOptions& opt) {
  if (bound < 1)
    throw CantorError(ErrorKind::usage, "percon", "bound must be at least 1");
  PerconVerdict v;
  v.bound = bound;
  PeriodEvidence tgt = period_evidence(f, bound, opt);
  if (tgt.present.count(1)) {
    v.shortcut = true;
    v.holds_up_to_bound = true;
    return v;
  }
  PeriodEvidence src = period_evidence(g, bound, opt);
  for (int n = 1; n <= bound; ++n) {
    if (tgt.present.count(n)) continue;
    if (src.absent.count(n)) continue;
    if (src.present.count(n) && tgt.absent.count(n))
      v.violations.push_back(n);
    else
      v.unresolved.push_back(n);
  }
  v.holds_up_to_bound = v.violations.empty() && v.unresolved.empty();
  return v;
}

PerconVerdict per_containment(const PeriodSpectrum& source, const Sft& target,
                              int bound) {
  if (bound < 1)
    throw CantorError(ErrorKind::usage, "percon", "bound must be at least 1");
  if (source.bound < bound)
    throw CantorError(ErrorKind::usage, "percon",
                      "source spectrum bound " + std::to_string(source.bound) +
                          " below requested bound " + std::to_string(bound));
  PerconVerdict v;
  v.bound = bound;
  if (has_self_loop(target.graph())) {
    v.shortcut = true;
    v.holds_up_to_bound = true;
    return v;
  }
  PeriodSpectrum tspec = period_spectrum(target.graph(), bound);
  for (int n = 1; n <= bound; ++n)
    if (source.contains(n) && !tspec.contains(n)) v.violations.push_back(n);
  v.holds_up_to_bound = v.violations.empty();
  return v;
}

}  // namespace cantor
