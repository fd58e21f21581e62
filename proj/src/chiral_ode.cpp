#include "liouville/chiral_ode.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace liouville {

namespace {

constexpr Real kOverflowLimit = 1e150L;

std::string describe(Real s) {
  std::ostringstream out;
  out.precision(17);
  out << static_cast<double>(s);
  return out.str();
}

// Quintic Hermite basis on [0, 1] for (y0, y0', y0'', y1'', y1', y1).
struct QuinticBasis {
  std::array<Real, 6> value;
  std::array<Real, 6> slope;

  explicit QuinticBasis(Real t) {
    const Real t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    value = {1 - 10 * t3 + 15 * t4 - 6 * t5,
             t - 6 * t3 + 8 * t4 - 3 * t5,
             (t2 - 3 * t3 + 3 * t4 - t5) / 2,
             (t3 - 2 * t4 + t5) / 2,
             -4 * t3 + 7 * t4 - 3 * t5,
             10 * t3 - 15 * t4 + 6 * t5};
    slope = {-30 * t2 + 60 * t3 - 30 * t4,
             1 - 18 * t2 + 32 * t3 - 15 * t4,
             (2 * t - 9 * t2 + 12 * t3 - 5 * t4) / 2,
             (3 * t2 - 8 * t3 + 5 * t4) / 2,
             -12 * t2 + 28 * t3 - 15 * t4,
             30 * t2 - 60 * t3 + 30 * t4};
  }
};

Real call_potential(const Potential& p, Real s) {
  double value = 0.0;
  try {
    value = p(static_cast<double>(s));
  } catch (const OutOfDomain& e) {
    throw OutOfDomain("potential unavailable at s = " + describe(s) + ": " + e.what());
  } catch (const Error& e) {
    throw NumericFailure("potential evaluation failed at s = " + describe(s) + ": " + e.what());
  }
  if (!std::isfinite(value)) throw NumericFailure("non-finite potential at s = " + describe(s));
  return value;
}

struct State {
  Real f1, df1, f2, df2;
};

// One RK4 step of (f, f')' = (f', p f) for both members; p0, pm, p1 are the
// potential at the start, midpoint and end of the step.
State rk4_step(const State& y, Real h, Real p0, Real pm, Real p1) {
  auto rhs = [](const State& s, Real p) { return State{s.df1, p * s.f1, s.df2, p * s.f2}; };
  auto axpy = [](const State& s, Real a, const State& k) {
    return State{s.f1 + a * k.f1, s.df1 + a * k.df1, s.f2 + a * k.f2, s.df2 + a * k.df2};
  };
  const State k1 = rhs(y, p0);
  const State k2 = rhs(axpy(y, h / 2, k1), pm);
  const State k3 = rhs(axpy(y, h / 2, k2), pm);
  const State k4 = rhs(axpy(y, h, k3), p1);
  return State{y.f1 + h / 6 * (k1.f1 + 2 * k2.f1 + 2 * k3.f1 + k4.f1),
               y.df1 + h / 6 * (k1.df1 + 2 * k2.df1 + 2 * k3.df1 + k4.df1),
               y.f2 + h / 6 * (k1.f2 + 2 * k2.f2 + 2 * k3.f2 + k4.f2),
               y.df2 + h / 6 * (k1.df2 + 2 * k2.df2 + 2 * k3.df2 + k4.df2)};
}

WronskianPair::Node make_node(const State& y, Real p) {
  return {y.f1, y.df1, p * y.f1, y.f2, y.df2, p * y.f2};
}

}  // namespace

ChiralICs synthesize_ics(const CauchyData& d, double m, double x0) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("mass must be positive");
  const double phi = d.phi(x0, 0);
  if (!std::isfinite(phi)) throw NumericFailure("non-finite phi at base point");
  const double dphi = d.phi(x0, 1);
  const double pi = d.pi(x0, 0);

  // g = F(0, x) = (4/m) exp(-phi/2); h = dF/dt; p, q = light-cone derivatives.
  const double g = 4.0 / m * std::exp(-phi / 2.0);
  const double dg = -dphi / 2.0 * g;
  const double ht = -pi / 2.0 * g;
  const double p = (dg + ht) / 2.0;
  const double q = (dg - ht) / 2.0;
  if (!(g > 0.0) || !std::isfinite(g)) throw NumericFailure("F at the base point is not representable");

  ChiralICs ics;
  ics.base_point = x0;
  ics.chi = {1.0, 0.0, 0.0, 1.0};
  ics.psi = {p, (p * q - 1.0) / g, g, q};
  return ics;
}

WronskianPair::WronskianPair(Real origin, Real step, std::vector<Node> nodes,
                             std::optional<Potential> potential)
    : origin_(origin), step_(step), nodes_(std::move(nodes)), potential_(std::move(potential)) {
  if (!(step_ > 0)) throw InvalidArgument("table step must be positive");
  if (nodes_.size() < 2) throw InvalidArgument("a chiral table needs at least two nodes");
}

Interval WronskianPair::range() const noexcept {
  return {static_cast<double>(origin_), static_cast<double>(argument(nodes_.size() - 1))};
}

PairJet WronskianPair::eval(Real s) const {
  const Real last = argument(nodes_.size() - 1);
  // Slack of a few ulps so queries computed as x +/- t at the table ends succeed.
  const Real slack = 64 * std::numeric_limits<double>::epsilon() *
                     std::max<Real>(1, std::max(std::fabs(origin_), std::fabs(last)));
  if (!(s >= origin_ - slack && s <= last + slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "chiral argument " << static_cast<double>(s) << " outside tabulated range ["
        << static_cast<double>(origin_) << ", " << static_cast<double>(last) << "]";
    throw OutOfDomain(msg.str());
  }
  const Real pos = (s - origin_) / step_;
  auto i = static_cast<std::ptrdiff_t>(std::floor(pos));
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(nodes_.size()) - 2);
  const Real t = pos - static_cast<Real>(i);
  const Node& a = nodes_[static_cast<std::size_t>(i)];
  const Node& b = nodes_[static_cast<std::size_t>(i) + 1];
  const QuinticBasis basis(t);
  const Real h = step_;
  const Real h2 = h * h;

  auto interpolate = [&](Real y0, Real d0, Real dd0, Real y1, Real d1, Real dd1) {
    const std::array<Real, 6> c{y0, h * d0, h2 * dd0, h2 * dd1, h * d1, y1};
    Real v = 0, dv = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      v += c[k] * basis.value[k];
      dv += c[k] * basis.slope[k];
    }
    return std::pair{v, dv / h};
  };
  const auto [f1, df1] = interpolate(a.f1, a.df1, a.ddf1, b.f1, b.df1, b.ddf1);
  const auto [f2, df2] = interpolate(a.f2, a.df2, a.ddf2, b.f2, b.df2, b.ddf2);
  return {f1, df1, f2, df2};
}

WronskianPair WronskianPair::tabulate(const Expr& f1, const Expr& f2, Interval range, double step,
                                      const Params& params) {
  if (!(step > 0.0)) throw InvalidArgument("table step must be positive");
  if (!(range.hi > range.lo)) throw InvalidArgument("table range must be non-empty");
  const Expr d1 = differentiate(f1), dd1 = differentiate(d1);
  const Expr d2 = differentiate(f2), dd2 = differentiate(d2);
  const auto intervals = static_cast<std::size_t>(std::ceil(range.length() / step - 1e-9));
  std::vector<Node> nodes;
  nodes.reserve(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    // Same node arguments as WronskianPair::argument.
    const auto s = static_cast<double>(static_cast<Real>(range.lo) + static_cast<Real>(i) * step);
    nodes.push_back({evaluate(f1, s, params), evaluate(d1, s, params), evaluate(dd1, s, params),
                     evaluate(f2, s, params), evaluate(d2, s, params), evaluate(dd2, s, params)});
  }
  return WronskianPair(range.lo, step, std::move(nodes));
}

WronskianPair integrate_pair(const Potential& p, const PairICs& ics, double x0, Interval range,
                             double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("ODE step must be positive");
  if (!(range.lo <= x0 && x0 <= range.hi))
    throw InvalidArgument("integration range must contain the base point");
  for (double v : ics)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite initial value");

  const Real step = h;
  auto right = static_cast<std::size_t>(std::ceil((range.hi - x0) / h - 1e-9));
  const auto left = static_cast<std::size_t>(std::ceil((x0 - range.lo) / h - 1e-9));
  if (left + right == 0) right = 1;
  const std::size_t n = left + right + 1;
  const Real origin = static_cast<Real>(x0) - static_cast<Real>(left) * step;
  auto argument = [&](std::size_t i) { return origin + static_cast<Real>(i) * step; };

  std::vector<WronskianPair::Node> nodes(n);
  const State start{ics[0], ics[1], ics[2], ics[3]};
  const Real p_start = call_potential(p, x0);
  nodes[left] = make_node(start, p_start);

  auto march = [&](int direction, std::size_t count) {
    State y = start;
    Real p0 = p_start;
    std::size_t i = left;
    const Real signed_step = direction * step;
    for (std::size_t k = 0; k < count; ++k) {
      const Real s = argument(i);
      const Real pm = call_potential(p, s + signed_step / 2);
      const std::size_t next = direction > 0 ? i + 1 : i - 1;
      const Real p1 = call_potential(p, argument(next));
      y = rk4_step(y, signed_step, p0, pm, p1);
      if (!(std::fabs(y.f1) < kOverflowLimit && std::fabs(y.f2) < kOverflowLimit &&
            std::fabs(y.df1) < kOverflowLimit && std::fabs(y.df2) < kOverflowLimit))
        throw NumericFailure("chiral solution overflow at s = " + describe(argument(next)));
      nodes[next] = make_node(y, p1);
      p0 = p1;
      i = next;
    }
  };
  march(+1, right);
  march(-1, left);

  return WronskianPair(origin, step, std::move(nodes), p);
}

double wronskian_drift(const WronskianPair& wp) {
  Real drift = 0;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const auto& n = wp.node(i);
    drift = std::max(drift, std::fabs(n.f1 * n.df2 - n.f2 * n.df1 - 1));
  }
  return static_cast<double>(drift);
}

ChiralPairs integrate_chirals(const PotentialPair& potentials, const ChiralICs& ics, Interval range,
                              double h) {
  // The two chiralities are independent problems.
  auto chi = std::async(std::launch::async, [&] {
    return integrate_pair(potentials.w_callable(), ics.chi, ics.base_point, range, h);
  });
  WronskianPair psi = integrate_pair(potentials.u_callable(), ics.psi, ics.base_point, range, h);
  return {chi.get(), std::move(psi)};
}

}  // namespace liouville
