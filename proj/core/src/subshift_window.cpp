#include "cantor/subshift_window.hpp"

#include <algorithm>

#include "cantor/errors.hpp"

namespace cantor {

bool is_j_periodic(const Word& w, int j) {
  if (j <= 0)
    throw CantorError(ErrorKind::usage, "window", "period must be positive");
  for (size_t i = 0; i + j < w.size(); ++i)
    if (w[i] != w[i + j]) return false;
  return true;
}

int least_period(const Word& w) {
  for (int j = 1; j < static_cast<int>(w.size()); ++j)
    if (is_j_periodic(w, j)) return j;
  return static_cast<int>(w.size());
}

namespace {

void check_cap(int cap, int need) {
  if (need > cap) throw WindowTooShort(cap, need);
}

}  // namespace

void SubshiftWindow::for_each_word(
    int l, const std::function<void(const Word&)>& fn) const {
  if (l < 0) throw CantorError(ErrorKind::usage, "window", "negative length");
  check_cap(length_cap(), l);
  Word w;
  w.reserve(l);
  // factorial language: dead prefixes have no allowed extensions
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == l) {
      fn(w);
      return;
    }
    for (int a = 0; a < alphabet_size(); ++a) {
      w.push_back(a);
      if (allowed(w)) self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

bool SubshiftWindow::cyclic_allowed(const Word& w) const {
  if (w.empty()) return false;
  int cap = length_cap();
  check_cap(cap, static_cast<int>(w.size()));
  // the |w| phase windows of length cap are every window of the periodic
  // point the language can see; all shorter subwords are their prefixes
  int p = static_cast<int>(w.size());
  Word r(cap);
  for (int s = 0; s < p; ++s) {
    for (int i = 0; i < cap; ++i) r[i] = w[(s + i) % p];
    if (!allowed(r)) return false;
  }
  return true;
}

std::vector<Word> SubshiftWindow::words(int l) const {
  std::vector<Word> out;
  for_each_word(l, [&](const Word& w) { out.push_back(w); });
  return out;
}

long SubshiftWindow::word_count(int l) const {
  long n = 0;
  for_each_word(l, [&](const Word&) { ++n; });
  return n;
}

SftWindow::SftWindow(Sft sft, int cap) : sft_(std::move(sft)), cap_(cap) {
  if (cap_ < 1)
    throw CantorError(ErrorKind::usage, "window", "cap must be at least 1");
}

bool SftWindow::allowed(const Word& w) const {
  check_cap(cap_, static_cast<int>(w.size()));
  return sft_.allowed(w);
}

std::string SftWindow::provenance() const {
  std::string s = "sft:";
  for (int v = 0; v < sft_.graph().order(); ++v) {
    if (v) s += ",";
    s += sft_.graph().name(v);
  }
  return s;
}

void SftWindow::for_each_word(
    int l, const std::function<void(const Word&)>& fn) const {
  if (l < 0) throw CantorError(ErrorKind::usage, "window", "negative length");
  check_cap(cap_, l);
  const DirectedGraph& g = sft_.graph();
  Word w;
  w.reserve(l);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == l) {
      fn(w);
      return;
    }
    if (w.empty()) {
      for (int a = 0; a < g.order(); ++a) {
        w.push_back(a);
        self(self);
        w.pop_back();
      }
    } else {
      for (int a : g.out(w.back())) {
        w.push_back(a);
        self(self);
        w.pop_back();
      }
    }
  };
  rec(rec);
}

bool SftWindow::cyclic_allowed(const Word& w) const {
  if (w.empty()) return false;
  const DirectedGraph& g = sft_.graph();
  for (int a : w)
    if (a < 0 || a >= g.order()) return false;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!g.has_edge(w[i], w[i + 1])) return false;
  return g.has_edge(w.back(), w.front());
}

ExplicitWindow::ExplicitWindow(std::vector<std::string> alphabet,
                               std::vector<std::vector<Word>> words_by_length)
    : alphabet_(std::move(alphabet)), slices_(std::move(words_by_length)) {
  auto fail = [](const std::string& why) {
    throw CantorError(ErrorKind::usage, "window", "explicit window: " + why);
  };
  if (alphabet_.empty()) fail("empty alphabet");
  if (slices_.size() < 2) fail("needs slices up to length 1 at least");
  if (slices_[0] != std::vector<Word>{Word{}}) fail("length-0 slice must be {empty}");
  int a_sz = static_cast<int>(alphabet_.size());
  for (size_t l = 1; l < slices_.size(); ++l) {
    const auto& sl = slices_[l];
    if (!std::is_sorted(sl.begin(), sl.end())) fail("slice not sorted");
    if (std::adjacent_find(sl.begin(), sl.end()) != sl.end()) fail("duplicate word");
    const auto& prev = slices_[l - 1];
    for (const Word& w : sl) {
      if (w.size() != l) fail("word length mismatch");
      for (int a : w)
        if (a < 0 || a >= a_sz) fail("symbol out of range");
      // factorial both ways pins every subword inductively
      Word head(w.begin(), w.end() - 1), tail(w.begin() + 1, w.end());
      if (!std::binary_search(prev.begin(), prev.end(), head) ||
          !std::binary_search(prev.begin(), prev.end(), tail))
        fail("language not factorial at " + std::to_string(l));
    }
    for (const Word& v : prev) {
      auto lo = std::lower_bound(sl.begin(), sl.end(), v,
                                 [](const Word& x, const Word& p) {
                                   return Word(x.begin(), x.begin() + p.size()) < p;
                                 });
      bool extends = lo != sl.end() && std::equal(v.begin(), v.end(), lo->begin());
      if (!extends) fail("word not extendable below the cap");
    }
  }
}

bool ExplicitWindow::allowed(const Word& w) const {
  check_cap(length_cap(), static_cast<int>(w.size()));
  const auto& sl = slices_[w.size()];
  return std::binary_search(sl.begin(), sl.end(), w);
}

void ExplicitWindow::for_each_word(
    int l, const std::function<void(const Word&)>& fn) const {
  if (l < 0) throw CantorError(ErrorKind::usage, "window", "negative length");
  check_cap(length_cap(), l);
  for (const Word& w : slices_[l]) fn(w);
}

nlohmann::json ExplicitWindow::to_json() const {
  return nlohmann::json{{"alphabet", alphabet_}, {"slices", slices_}};
}

ExplicitWindow ExplicitWindow::from_json(const nlohmann::json& j) {
  return ExplicitWindow(j.at("alphabet").get<std::vector<std::string>>(),
                        j.at("slices").get<std::vector<std::vector<Word>>>());
}

std::vector<Word> periodic_orbit_reps(const SubshiftWindow& lam, int max_period) {
  std::vector<Word> reps;
  for (int j = 1; j <= max_period; ++j) {
    lam.for_each_word(j, [&](const Word& w) {
      if (least_period(w) != j || !lam.cyclic_allowed(w)) return;
      Word rot = w;
      for (int s = 1; s < j; ++s) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < w) return;  // not the lex-least rotation
      }
      reps.push_back(w);
    });
  }
  return reps;
}

}  // namespace cantor
