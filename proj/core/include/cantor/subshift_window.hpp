// Finite windows into subshift languages: the alphabet-and-language
// interface consumed by the marker and coding layers. A window speaks
// for a genuine subshift only up to its length cap; queries beyond the
// cap are refused rather than guessed. Languages are factorial and
// extendable below the cap, and enumeration is always lexicographic in
// the declared symbol order.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cantor/symbolic.hpp"

namespace cantor {

// w repeats with step j wherever both sides are visible (i + j < |w|).
// Every j >= |w| is vacuously true.
bool is_j_periodic(const Word& w, int j);
// least j >= 1 with is_j_periodic(w, j); |w| for primitive words
int least_period(const Word& w);

class SubshiftWindow {
 public:
  virtual ~SubshiftWindow() = default;

  virtual int alphabet_size() const = 0;
  virtual std::string symbol_name(int a) const = 0;
  // longest word length this window can decide
  virtual int length_cap() const = 0;
  // membership of w (|w| <= length_cap, else WindowTooShort)
  virtual bool allowed(const Word& w) const = 0;
  // where the language comes from, for reports
  virtual std::string provenance() const = 0;

  // lexicographic enumeration of the allowed words of length l
  virtual void for_each_word(
      int l, const std::function<void(const Word&)>& fn) const;
  // the |w|-periodic repetition of w stays allowed as far as the window
  // can see (exact for shift-of-finite-type windows)
  virtual bool cyclic_allowed(const Word& w) const;

  // collected enumeration; only for languages known to be small
  std::vector<Word> words(int l) const;
  long word_count(int l) const;
};

// the full path language of a vertex shift, optionally capped
class SftWindow : public SubshiftWindow {
 public:
  static constexpr int kUncapped = 1 << 20;
  explicit SftWindow(Sft sft, int cap = kUncapped);

  const Sft& sft() const { return sft_; }

  int alphabet_size() const override { return sft_.graph().order(); }
  std::string symbol_name(int a) const override { return sft_.graph().name(a); }
  int length_cap() const override { return cap_; }
  bool allowed(const Word& w) const override;
  std::string provenance() const override;
  void for_each_word(int l,
                     const std::function<void(const Word&)>& fn) const override;
  bool cyclic_allowed(const Word& w) const override;  // exact closed-path test

 private:
  Sft sft_;
  int cap_;
};

// a language given by explicit per-length slices (tests, replay).
// Validates sortedness, factoriality, and extendability on construction.
class ExplicitWindow : public SubshiftWindow {
 public:
  ExplicitWindow(std::vector<std::string> alphabet,
                 std::vector<std::vector<Word>> words_by_length);

  int alphabet_size() const override { return static_cast<int>(alphabet_.size()); }
  std::string symbol_name(int a) const override { return alphabet_.at(a); }
  int length_cap() const override { return static_cast<int>(slices_.size()) - 1; }
  bool allowed(const Word& w) const override;
  std::string provenance() const override { return "explicit"; }
  void for_each_word(int l,
                     const std::function<void(const Word&)>& fn) const override;

  nlohmann::json to_json() const;
  static ExplicitWindow from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> alphabet_;
  std::vector<std::vector<Word>> slices_;  // slices_[l] sorted, unique
};

// lex-least representatives of the certified periodic orbits with least
// period <= max_period, ordered by (period, word)
std::vector<Word> periodic_orbit_reps(const SubshiftWindow& lam, int max_period);

}  // namespace cantor
