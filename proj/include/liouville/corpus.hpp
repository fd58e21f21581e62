#pragma once

#include <string>
#include <vector>

#include "liouville/initial_data.hpp"

namespace liouville {

/// A named smooth Cauchy datum used by the verification runs.
struct CorpusEntry {
  std::string name;
  std::string phi;
  std::string pi;
  double mass = 1.0;

  CauchyData data() const;
};

/// Ten smooth pairs mixing constants, Gaussians, 1/cosh profiles and
/// low-frequency sines, with |phi| <= 3 and |pi| <= 2 on [-8, 8].
const std::vector<CorpusEntry>& smooth_corpus();

}  // namespace liouville
