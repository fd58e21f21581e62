#pragma once

#include <array>
#include <optional>
#include <vector>

#include "liouville/potentials.hpp"

namespace liouville {

/// Extended precision used for chiral tables and everything assembled from
/// them. Chiral solutions grow exponentially away from the base point while
/// F stays O(1), so F is a cancelling sum of large products.
using Real = long double;

/// Initial values (f1, f1', f2, f2') of a chiral pair at the base point.
using PairICs = std::array<double, 4>;

struct ChiralICs {
  double base_point = 0.0;
  PairICs chi{1.0, 0.0, 0.0, 1.0};
  PairICs psi{0.0, -1.0, 1.0, 0.0};
};

/// Initial values at x0 that make F, dF/dt and dF/dx on the t = 0 slice
/// agree with the Cauchy data. The chi block is the identity (gauge choice);
/// both Wronskians equal 1.
ChiralICs synthesize_ics(const CauchyData& d, double m, double x0 = 0.0);

/// Values and first derivatives of both members of a pair at one argument.
struct PairJet {
  Real f1 = 0, df1 = 0, f2 = 0, df2 = 0;

  Real wronskian() const noexcept { return f1 * df2 - f2 * df1; }
};

/// Two solutions of f'' = p f tabulated on a uniform grid, with dense output
/// by quintic Hermite interpolation of (f, f', f'') between nodes.
class WronskianPair {
 public:
  struct Node {
    Real f1, df1, ddf1;
    Real f2, df2, ddf2;
  };

  WronskianPair(Real origin, Real step, std::vector<Node> nodes, std::optional<Potential> potential = {});

  /// Tabulates a hand-specified pair of expressions in `x` (used for chiral
  /// families that do not come from Cauchy data). No Wronskian check here.
  static WronskianPair tabulate(const Expr& f1, const Expr& f2, Interval range, double step,
                                const Params& params = {});

  PairJet eval(Real s) const;

  Real step() const noexcept { return step_; }
  Real origin() const noexcept { return origin_; }
  Interval range() const noexcept;
  std::size_t size() const noexcept { return nodes_.size(); }
  Real argument(std::size_t i) const noexcept { return origin_ + static_cast<Real>(i) * step_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const std::optional<Potential>& potential() const noexcept { return potential_; }

 private:
  Real origin_;
  Real step_;
  std::vector<Node> nodes_;
  std::optional<Potential> potential_;
};

/// Classical RK4 for (f, f')' = (f', p f), marching from x0 to both ends of
/// `range`. Nodes sit at x0 + k h and cover `range`.
WronskianPair integrate_pair(const Potential& p, const PairICs& ics, double x0, Interval range,
                             double h);

/// max over nodes of |f1 f2' - f2 f1' - 1|.
double wronskian_drift(const WronskianPair& wp);

struct ChiralPairs {
  WronskianPair chi;  // argument x + t, potential w
  WronskianPair psi;  // argument x - t, potential u
};

/// Stage S2: both chiral pairs for Cauchy data, integrated over `range`.
ChiralPairs integrate_chirals(const PotentialPair& potentials, const ChiralICs& ics, Interval range,
                              double h);

}  // namespace liouville
