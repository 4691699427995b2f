// Finite-resolution dynamics over clopen partitions: the transition graph
// of a map at a stated depth, subgraph distance certificates, shift-model
// approximation stages, itinerary factors, and two-sided periodic-spectrum
// evidence. Everything here is exact at its certified depth: edges come
// with replayable input/output witnesses, and every bound is a dyadic
// value derived from the transducer's own modulus ladder.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/clopen.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/sft_model.hpp"
#include "cantor/subshift_window.hpp"
#include "cantor/symbolic.hpp"
#include "cantor/transducer.hpp"

namespace cantor {

// exact clopen preimage through the rule ladder
ClopenSet exact_preimage(const Transducer& t, const ClopenSet& s);
// exact clopen image; inverse route for homeomorphisms, rule-level
// cylinder images otherwise
ClopenSet exact_image(const Transducer& t, const ClopenSet& s);

struct EdgeWitness {
  int from = 0, to = 0;
  std::string input_word;   // lex-least input cylinder realizing the edge
  std::string output_word;  // its forced image prefix
};

// The transition graph of f over a partition: edge (U,U') iff the image
// of U meets U', decided exactly at depth_used. Vertices are the parts,
// named by their cylinder labels and ordered as in the partition.
struct DynGraph {
  DirectedGraph graph;
  CPartition partition;
  int depth_used = 0;
  std::vector<EdgeWitness> witnesses;  // aligned with graph.edges()

  nlohmann::json to_json() const;
  std::string to_dot() const { return graph.to_dot(); }
};

// pre: depth covers the partition cylinders and rho(depth) reaches them.
// Fails loudly (DegreeViolation) when f is not onto at the partition
// depth; never pads edges.
DynGraph dynamics_graph(const Transducer& f, const CPartition& p, int depth);

// If every edge of g's graph is an edge of f's graph over a partition
// with mesh <= modulus_delta(f, eps), then d(f,g) < eps: any g-step lands
// in a part some f-step also reaches, and the two f-images share the
// forced prefix. certified_upper is the exact dyadic form of that chain,
// max(eps/4, mesh); it degrades to 1 (the space diameter) when the
// inclusion fails.
struct SubgraphCertificate {
  DynGraph f_graph, g_graph;
  Dyadic epsilon, delta, mesh;
  Dyadic certified_upper;
  bool holds = false;
  std::vector<std::pair<int, int>> missing_edges;  // g-edges absent from f

  nlohmann::json to_json() const;
};

SubgraphCertificate subgraph_certificate(const Transducer& f, const Transducer& g,
                                         const CPartition& p, Dyadic eps);

// One resolution stage of the shift-model approximation: the transition
// graph realized as a vertex shift, its stream model, the conjugator psi
// matching time-0 vertex cylinders to parts, and the conjugate
// h = psi . shift . psi^-1 with its distance certificate.
struct ApproxStage {
  Sft sft;
  SftModel model;
  Transducer psi;
  Transducer h;
  SubgraphCertificate cert;
  bool graphs_equal = false;  // G(h,P) identical to G(f,P), both directions
};

// pre: partitions nontrivial with strictly decreasing mesh. Each stage
// requires the transition graph to be primitive (ChainMixingUnverified)
// and its shift space to be a Cantor set (NotCantor). The stage epsilon
// is the best exponent the mesh and f's modulus support at that depth.
std::vector<ApproxStage> sft_approximation(const Transducer& f,
                                           const std::vector<CPartition>& partitions,
                                           int max_depth = 24);

// The symbol stream of part indices visited by an orbit, with the exact
// window language of length <= language_cap computed by clopen
// arithmetic: a word is allowed iff the intersection of the pulled-back
// parts is nonempty.
class ItineraryMap {
 public:
  // g must be a homeomorphism over a nontrivial partition
  ItineraryMap(const Transducer& g, CPartition v, int l_lang);

  const Transducer& source() const;
  const CPartition& partition() const;
  int language_cap() const;

  const std::vector<Word>& language(int l) const;  // lex by part index
  bool allowed(const Word& w) const;
  // clopen set of points whose forward itinerary begins with w
  ClopenSet cylinder_set(const Word& w) const;
  // part index of g^l(y); negative l goes through the inverse
  int symbol_at(const CantorPoint& y, long l) const;
  Word itinerary(const CantorPoint& y, long from, int len) const;

  // language view for the marker layer; shares this map's state
  std::shared_ptr<const SubshiftWindow> window() const;

  nlohmann::json to_json() const;

 private:
  struct Impl;
  class WindowView;
  std::shared_ptr<const Impl> impl_;
};

struct PerconOptions {
  int max_partition_depth = 6;  // spectra of G(t, depth k) certify absences
  int probe_depth = 6;          // cylinder depth for fixed-point witnesses
};

// Two-sided evidence about the period spectrum of a map: n is present
// when a tail-map witness pins a genuine fixed point of t^n, absent when
// some partition's transition graph has no length-n closed path. Periods
// with neither certificate stay unknown.
struct PeriodEvidence {
  int bound = 0;
  std::set<int> present, absent;
  std::map<int, std::string> witness;  // cylinder word per present period

  nlohmann::json to_json() const;
};

PeriodEvidence period_evidence(const Transducer& t, int bound,
                               const PerconOptions& opt = {});

// Verdict on "every period of the source is a period of the target" up
// to a bound. A target fixed point gives every period at once (shortcut).
// Inconclusive periods are listed, never silently passed.
struct PerconVerdict {
  int bound = 0;
  bool holds_up_to_bound = false;
  bool shortcut = false;
  std::vector<int> violations, unresolved;

  nlohmann::json to_json() const;
};

PerconVerdict per_containment(const Transducer& g, const Sft& target, int bound,
                              const PerconOptions& opt = {});
PerconVerdict per_containment(const Transducer& g, const Transducer& f, int bound,
                              const PerconOptions& opt = {});
// exact source spectrum (e.g. an itinerary graph's); requires
// source.bound >= bound
PerconVerdict per_containment(const PeriodSpectrum& source, const Sft& target,
                              int bound);

}  // namespace cantor
