// Binary-stream realization of a two-sided vertex shift.  A point of
// Sigma(G) is flattened by visiting coordinates 0, -1, 1, -2, 2, ... and
// encoding each vertex choice through a balanced binary tree over the
// locally allowed vertices (all vertices at coordinate 0, in-neighbors on
// the negative side, out-neighbors on the positive side).  Forced choices
// consume no bits, so the encoding is a bijection between the one-sided
// binary Cantor space and Sigma(G) whenever the shift space is a Cantor
// set.  The shift map conjugated through this codec is a
// homeomorphism-kind Transducer of the binary space, with the time-0
// vertex cylinder C_0(u) equal to the binary cylinder of u's choice path.
#pragma once

#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "cantor/symbolic.hpp"
#include "cantor/transducer.hpp"

namespace cantor {

class SftModel {
 public:
  // requires cantor_check(sft) = yes (otherwise the codec cannot be a
  // bijection); throws a hypothesis error naming the reason
  explicit SftModel(Sft sft, int max_depth = 24);

  const Sft& sft() const { return *sft_; }
  const DirectedGraph& graph() const { return sft_->graph(); }
  int max_depth() const { return max_depth_; }

  // choice path of vertex u at coordinate 0; C_0(u) = [vertex_code(u)]
  const std::string& vertex_code(int u) const;

  // coordinate -> vertex assignments forced by the bit prefix w
  std::map<long, int> decode(const std::string& w) const;

  // the shift conjugated through the codec (homeomorphism kind); its
  // inverse is the codec conjugate of the inverse shift
  Transducer shift() const { return shift_; }

  nlohmann::json to_json() const;

  struct Codec;  // opaque codec state shared with the shift rule

 private:
  std::shared_ptr<const Sft> sft_;
  std::shared_ptr<const Codec> codec_;
  int max_depth_;
  Transducer shift_;

  SftModel(std::shared_ptr<const Sft> sft, int max_depth);
};

}  // namespace cantor
