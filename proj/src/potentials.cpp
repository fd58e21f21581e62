#include "liouville/potentials.hpp"

#include <cmath>

namespace liouville {

PotentialPair::PotentialPair(CauchyData source, double mass) : source_(std::move(source)), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
}

double PotentialPair::evaluate(double s, double sign) const {
  const double dphi = source_.phi(s, 1);
  const double ddphi = source_.phi(s, 2);
  const double pi = source_.pi(s, 0);
  const double dpi = source_.pi(s, 1);
  const double a = dphi + sign * pi;
  const double value =
      (a * a - 4.0 * (ddphi + sign * dpi) + mass_ * mass_ * std::exp(source_.phi(s, 0))) / 16.0;
  if (!std::isfinite(value)) throw NumericFailure("non-finite potential at s = " + std::to_string(s));
  return value;
}

double PotentialPair::u(double s) const { return evaluate(s, -1.0); }

double PotentialPair::w(double s) const { return evaluate(s, +1.0); }

Potential PotentialPair::u_callable() const {
  return [self = *this](double s) { return self.u(s); };
}

Potential PotentialPair::w_callable() const {
  return [self = *this](double s) { return self.w(s); };
}

PotentialPair compute_potentials(const CauchyData& d, double m) { return PotentialPair(d, m); }

}  // namespace liouville
