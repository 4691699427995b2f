// Error taxonomy. Every failure names the hypothesis or resource that broke,
// so callers (and the CLI exit-code mapping) can distinguish "your system does
// not satisfy the standing assumptions" from "not enough precision" from
// "a certificate failed to replay".
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cantor {

// hypothesis  -> the input refutes a mathematical hypothesis (CLI exit 2)
// precision   -> depth ladder / search budget exhausted        (CLI exit 3)
// verification-> a certificate or internal check failed        (CLI exit 4)
// usage       -> malformed input or violated precondition      (CLI exit 1)
enum class ErrorKind { usage, hypothesis, precision, verification };

class CantorError : public std::runtime_error {
 public:
  CantorError(ErrorKind kind, std::string stage, const std::string& what)
      : std::runtime_error(what), kind_(kind), stage_(std::move(stage)) {}
  ErrorKind kind() const { return kind_; }
  const std::string& stage() const { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

struct DegreeViolation : CantorError {
  DegreeViolation(std::string vertex, std::string side)
      : CantorError(ErrorKind::hypothesis, "degree",
                    "vertex '" + vertex + "' has no " + side + " edge"),
        vertex(std::move(vertex)), side(std::move(side)) {}
  std::string vertex, side;
};

struct PrecisionUnavailable : CantorError {
  explicit PrecisionUnavailable(const std::string& what, int needed_depth = -1)
      : CantorError(ErrorKind::precision, "precision", what),
        needed_depth(needed_depth) {}
  int needed_depth;
};

struct MeshTooCoarse : CantorError {
  MeshTooCoarse(const std::string& mesh, const std::string& required)
      : CantorError(ErrorKind::usage, "mesh",
                    "partition mesh " + mesh + " exceeds required bound " + required),
        required_delta(required) {}
  std::string required_delta;
};

struct ChainMixingUnverified : CantorError {
  explicit ChainMixingUnverified(int stage_k, const std::string& why)
      : CantorError(ErrorKind::hypothesis, "mixing",
                    "dynamics graph at stage " + std::to_string(stage_k) +
                        " is not primitive: " + why),
        stage_k(stage_k) {}
  int stage_k;
};

struct NotCantor : CantorError {
  explicit NotCantor(int stage_k, const std::string& why)
      : CantorError(ErrorKind::hypothesis, "cantor",
                    "SFT at stage " + std::to_string(stage_k) +
                        " is not a Cantor set: " + why),
        stage_k(stage_k) {}
  int stage_k;
};

struct EmptyClopen : CantorError {
  explicit EmptyClopen(const std::string& what)
      : CantorError(ErrorKind::usage, "clopen", what) {}
};

struct EmptyPreimage : CantorError {
  explicit EmptyPreimage(std::string part)
      : CantorError(ErrorKind::hypothesis, "preimage",
                    "factor map misses target part " + part),
        part(std::move(part)) {}
  std::string part;
};

struct MarkerSearchFailed : CantorError {
  explicit MarkerSearchFailed(const std::string& what)
      : CantorError(ErrorKind::precision, "markers", what) {}
};

struct WindowTooShort : CantorError {
  WindowTooShort(int have, int need)
      : CantorError(ErrorKind::usage, "window",
                    "window language reaches length " + std::to_string(have) +
                        " but the check needs " + std::to_string(need)),
        have(have), need(need) {}
  int have, need;
};

struct WordNotInLanguage : CantorError {
  explicit WordNotInLanguage(std::string word)
      : CantorError(ErrorKind::usage, "language",
                    "word '" + word + "' is not in the language"),
        word(std::move(word)) {}
  std::string word;
};

struct PeriodUnavailable : CantorError {
  explicit PeriodUnavailable(int period)
      : CantorError(ErrorKind::hypothesis, "periods",
                    "target shift has no periodic point of period " +
                        std::to_string(period)),
        period(period) {}
  int period;
};

struct PerconViolation : CantorError {
  explicit PerconViolation(std::vector<int> periods)
      : CantorError(ErrorKind::hypothesis, "percon",
                    "period containment fails for periods " + join(periods)),
        periods(std::move(periods)) {}
  std::vector<int> periods;

 private:
  static std::string join(const std::vector<int>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
  }
};

struct InsufficientAperiodicity : CantorError {
  // certified_period > 0 means g^j = identity was verified structurally;
  // 0 means the witness search was exhausted without a decision.
  InsufficientAperiodicity(int certified_period, const std::string& what)
      : CantorError(ErrorKind::hypothesis, "aperiodicity", what),
        certified_period(certified_period) {}
  int certified_period;
};

struct CommutationCheckFailed : CantorError {
  explicit CommutationCheckFailed(const std::string& what)
      : CantorError(ErrorKind::verification, "commutation", what) {}
};

struct ReplayMismatch : CantorError {
  explicit ReplayMismatch(std::string mismatch_stage, const std::string& what)
      : CantorError(ErrorKind::verification, "replay:" + mismatch_stage, what),
        mismatch_stage(std::move(mismatch_stage)) {}
  std::string mismatch_stage;
};

}  // namespace cantor
