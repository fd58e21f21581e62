#pragma once

#include <functional>

#include "liouville/initial_data.hpp"

namespace liouville {

/// Scalar function of one real argument driving f'' = p f.
using Potential = std::function<double(double)>;

/// Chiral potentials built from Cauchy data and the mass m:
///   u = [(phi' - pi)^2 - 4 (phi'' - pi') + m^2 e^phi] / 16   (argument x - t)
///   w = [(phi' + pi)^2 - 4 (phi'' + pi') + m^2 e^phi] / 16   (argument x + t)
/// Evaluated lazily at whatever points the caller asks for.
class PotentialPair {
 public:
  PotentialPair(CauchyData source, double mass);

  double u(double s) const;
  double w(double s) const;

  Potential u_callable() const;
  Potential w_callable() const;

  double mass() const noexcept { return mass_; }
  const CauchyData& source() const noexcept { return source_; }

 private:
  double evaluate(double s, double sign) const;

  CauchyData source_;
  double mass_;
};

PotentialPair compute_potentials(const CauchyData& d, double m);

}  // namespace liouville
