// Marker sets and sliding block codes. A marker set is a clopen set of
// centered words whose first N shifts are disjoint and which comes within
// N-1 of the center of every sufficiently aperiodic window; on top of it
// sits a radius-(k+N+L) local rule that sends an arbitrary subshift window
// language into a mixing vertex shift, hitting a prescribed word. All
// searches are deterministic (lexicographic tie-breaking) and every chosen
// witness is serializable, so checks replay without re-searching.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/subshift_window.hpp"
#include "cantor/symbolic.hpp"

namespace cantor {

// Membership of sigma^i(t) in the marker clopen set is decided by the
// width-(2L+1) block around i. spacing = N, window = k of the two
// invariants: shifts sigma^l, 0 <= l < N, are pairwise disjoint, and every
// allowed (2k+1)-word that is not j-periodic for every j < N carries a
// mark within N-1 of its center.
struct MarkerSet {
  int radius = 0;   // L
  int spacing = 0;  // N
  int window = 0;   // k
  std::vector<Word> centers;  // sorted width-(2L+1) words

  // is position i of w marked? requires the full block around i
  bool marked_at(const Word& w, int i) const;
  // all marked positions of w, i.e. i in [radius, |w|-1-radius]
  std::vector<int> marks(const Word& w) const;

  nlohmann::json to_json() const;
  static MarkerSet from_json(const nlohmann::json& j);
};

// Exhaustive re-check of the two invariants over the window language.
struct MarkerCheck {
  bool disjoint = false;
  bool covering = false;
  std::optional<Word> witness;  // a violating word, if any

  bool ok() const { return disjoint && covering; }
};

MarkerCheck check_markers(const SubshiftWindow& lam, const MarkerSet& f);

// Greedy search: probe radii L = 0..k-spacing+1 (a larger L leaves the
// covering bound undecidable inside a (2k+1)-window), scan candidate
// center words lexicographically, keep a candidate iff disjointness
// survives, and accept the first radius whose pass covers. A fixed radius
// may be forced. Also enforces that every j-periodic (j < spacing)
// allowed (2k+1)-word wraps to a genuine cyclic orbit of the language,
// which is what makes the periodic-window exemption sound.
MarkerSet find_markers(const SubshiftWindow& lam, int spacing, int window,
                       int forced_radius = -1);

// The coding side: a target mixing vertex shift with transition length n
// (any two vertices are joined by every edge-count >= n), a word w0
// containing all target words, the span N = 2n + |w0|, the constant
// symbol map Phi, bridging words Psi(v,v',l) for l in [N-1, 2N-2] with
// v Psi v' a path and w0 inside Psi, and one sigma^j-fixed point of the
// target per small-period orbit of the source. Psi entries are searched
// on demand (lexicographically least via a feasibility table) and
// memoized; to_json dumps exactly the materialized ones.
class CodingTables {
 public:
  const Sft& target() const;
  int transition_length() const;            // n
  const Word& hitting_word() const;         // w0
  int span() const;                         // N = 2n + |w0|
  int phi(int source_symbol) const;         // constant: lex-least vertex
  const Word& psi(int v, int v2, int len) const;
  const std::map<Word, Word>& periodic_images() const;  // orbit rep -> word
  const Word* periodic_image(const Word& orbit_rep) const;

  // every materialized psi entry, keyed (v, v', l); deterministic
  std::map<std::tuple<int, int, int>, Word> psi_entries() const;

  nlohmann::json to_json() const;

 private:
  friend CodingTables coding_tables(const Sft&, const std::vector<Word>&,
                                    const std::vector<Word>&);
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// pre: sigma primitive; every target word nonempty and in sigma's
// language; every orbit rep primitive (least period = length) with
// length < N. Throws WordNotInLanguage / PeriodUnavailable.
CodingTables coding_tables(const Sft& sigma, const std::vector<Word>& targets,
                           const std::vector<Word>& source_orbits);

// Diagnostic scan of a word under a marker set: marked positions and the
// maximal unmarked runs between them, classified as the local rule sees
// them. Periods and core representatives are reported for runs that have
// a visible periodic core.
struct MarkedInterval {
  enum class Kind { Short, Long, LeftOpen, RightOpen, Whole };
  Kind kind = Kind::Whole;
  int begin = 0, end = 0;  // inclusive, within the decidable range
  int period = 0;          // least period of the visible core; 0 if none
  Word core_rep;           // lex-least rotation of the core word
};

struct IntervalDecomposition {
  int lo = 0, hi = 0;  // decidable mark range
  std::vector<int> marks;
  std::vector<MarkedInterval> intervals;

  nlohmann::json to_json() const;
};

IntervalDecomposition interval_decomposition(const Word& w, const MarkerSet& f);

// The sliding block code of the marker construction: radius L' = k+N+L.
// At a marked position the rule emits Phi; inside a short interval, the
// matching Psi symbol; inside a long or unbounded interval, the flanks
// emit bridge Psi symbols and the core emits the phase-aligned periodic
// image. The rule is a pure function of the window, hence shift-commuting.
class BlockCode {
 public:
  int radius() const;  // L'
  const MarkerSet& markers() const;
  const CodingTables& tables() const;

  // |w| == 2*radius()+1; the image symbol at the center
  int rule(const Word& w) const;
  // image of every position with full context; |w| >= 2*radius()+1
  Word image_word(const Word& w) const;

  // a domain word and its image exhibiting w0 (set by synthesize_code)
  const std::pair<Word, Word>& hitting_witness() const;

  nlohmann::json to_json() const;

 private:
  friend BlockCode synthesize_code(std::shared_ptr<const SubshiftWindow>,
                                   const Sft&, const MarkerSet&,
                                   const CodingTables&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Builds the code and verifies it exhaustively at the checkable length:
// for every allowed word of length 2L'+2, the two central image symbols
// agree with an independent interval-decomposition coding and form an
// edge of the target graph (the target is a memory-one vertex shift, so
// pairwise edge validity extends to image words of every length). Also
// constructs an explicit domain word whose image contains w0. Throws
// CommutationCheckFailed on any mismatch.
BlockCode synthesize_code(std::shared_ptr<const SubshiftWindow> lam,
                          const Sft& sigma, const MarkerSet& f,
                          const CodingTables& t);

}  // namespace cantor
