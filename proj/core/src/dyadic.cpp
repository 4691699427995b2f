#include "cantor/dyadic.hpp"

#include <cmath>
#include <cstdlib>

namespace cantor {

std::string Dyadic::str() const {
  if (zero_) return "0";
  if (exp_ == 0) return "1";
  if (exp_ < 0) return "2^" + std::to_string(-exp_);
  return "2^-" + std::to_string(exp_);
}

double Dyadic::approx() const { return zero_ ? 0.0 : std::ldexp(1.0, -exp_); }

std::optional<Dyadic> Dyadic::parse(const std::string& s) {
  if (s == "0") return zero();
  if (s == "1") return one();
  if (s.rfind("2^", 0) != 0) return std::nullopt;
  const std::string rest = s.substr(2);
  if (rest.empty()) return std::nullopt;
  char* end = nullptr;
  long v = std::strtol(rest.c_str(), &end, 10);
  if (end == nullptr || *end != '\0') return std::nullopt;
  return pow2(static_cast<int>(-v));
}

}  // namespace cantor
