#include "liouville/corpus.hpp"

namespace liouville {

CauchyData CorpusEntry::data() const { return CauchyData::from_expressions(phi, pi, {{"m", mass}}); }

const std::vector<CorpusEntry>& smooth_corpus() {
  static const std::vector<CorpusEntry> corpus{
      {"constant-log16", "log(16)", "0", 1.0},
      {"zero", "0", "0", 1.0},
      {"constant-one", "1", "0", 1.0},
      {"gaussian", "exp(-x^2)", "0", 1.0},
      {"sech-with-gaussian-momentum", "1/cosh(x)", "0.5*exp(-x^2)", 1.0},
      {"slow-sine", "0.5*sin(0.5*x)", "0", 1.0},
      {"shifted-gaussian", "1 + 0.5*exp(-(x - 1)^2)", "-0.3*sin(0.3*x)", 1.0},
      {"wide-sech-drift", "2/cosh(0.5*x)", "0.2", 1.0},
      {"mixed", "-1 + 0.3*sin(0.4*x) + 0.5*exp(-x^2)", "0.5/cosh(x)", 1.0},
      {"even-odd", "0.8*exp(-0.5*x^2)", "x*exp(-x^2)", 1.0},
  };
  return corpus;
}

}  // namespace liouville
