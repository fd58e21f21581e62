#include "liouville/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace liouville {

void SpacetimeGrid::validate() const {
  if (nt <= 0 || nx <= 0) throw InvalidArgument("grid node counts must be positive");
  if (!(t_max >= t_min) || !(x_max >= x_min)) throw InvalidArgument("grid ranges must be ordered");
  if ((nt > 1 && t_max == t_min) || (nx > 1 && x_max == x_min))
    throw InvalidArgument("grid with several nodes needs a non-empty range");
  for (double v : {t_min, t_max, x_min, x_max})
    if (!std::isfinite(v)) throw InvalidArgument("grid bounds must be finite");
}

Interval SpacetimeGrid::chiral_hull(double x0) const {
  const double r = std::max(std::abs(t_min), std::abs(t_max)) +
                   std::max(std::abs(x_min - x0), std::abs(x_max - x0));
  return {x0 - r, x0 + r};
}

LiouvilleSolution::LiouvilleSolution(WronskianPair chi, WronskianPair psi, double mass,
                                     Pairing pairing, double chi_drift, double psi_drift)
    : chi_(std::move(chi)),
      psi_(std::move(psi)),
      mass_(mass),
      pairing_(pairing),
      chi_drift_(chi_drift),
      psi_drift_(psi_drift) {}

LightConeValues LiouvilleSolution::eval_F(double t, double x) const {
  const Real plus = static_cast<Real>(x) + t;
  const Real minus = static_cast<Real>(x) - t;
  const PairJet c = chi_.eval(plus);
  const PairJet p = psi_.eval(minus);
  // Which psi member multiplies chi1.
  const bool cross = pairing_ == Pairing::cross;
  const Real pa = cross ? p.f2 : p.f1, dpa = cross ? p.df2 : p.df1;
  const Real pb = cross ? p.f1 : p.f2, dpb = cross ? p.df1 : p.df2;
  // Node arguments carry round-off relative to the table extent, so the
  // first-order terms count towards the size of F as well.
  const Real reach = std::max({std::fabs(chi_.range().lo), std::fabs(chi_.range().hi),
                               std::fabs(psi_.range().lo), std::fabs(psi_.range().hi), 1.0});
  const Real size = std::fabs(c.f1 * pa) + std::fabs(c.f2 * pb) +
                    reach * (std::fabs(c.df1 * pa) + std::fabs(c.df2 * pb) +
                             std::fabs(c.f1 * dpa) + std::fabs(c.f2 * dpb));
  return {c.f1 * pa + c.f2 * pb, c.df1 * pa + c.df2 * pb, c.f1 * dpa + c.f2 * dpb,
          c.df1 * dpa + c.df2 * dpb, size};
}

// Table inputs are doubles, so F is only resolved to double round-off of its terms.
bool LightConeValues::vanishes() const noexcept {
  return std::fabs(F) <= 64 * std::numeric_limits<double>::epsilon() * magnitude;
}

Real LiouvilleSolution::eval_phi_extended(double t, double x) const {
  const LightConeValues v = eval_F(t, x);
  if (v.vanishes()) throw SingularSolution(t, x);
  const Real F = v.F;
  const Real m = mass_;
  const Real phi = -std::log(m * m / 16 * F * F);
  if (!std::isfinite(phi)) throw SingularSolution(t, x);
  return phi;
}

double LiouvilleSolution::eval_phi(double t, double x) const {
  return static_cast<double>(eval_phi_extended(t, x));
}

bool LiouvilleSolution::contains(double t, double x) const noexcept {
  return chi_.range().contains(x + t) && psi_.range().contains(x - t);
}

bool LiouvilleSolution::contains(const SpacetimeGrid& g) const noexcept {
  return chi_.range().contains(Interval{g.x_min + g.t_min, g.x_max + g.t_max}) &&
         psi_.range().contains(Interval{g.x_min - g.t_max, g.x_max - g.t_min});
}

LiouvilleSolution build_solution(WronskianPair chi, WronskianPair psi, double m, Pairing pairing,
                                 double drift_tolerance) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("mass must be positive");
  const double chi_drift = wronskian_drift(chi);
  const double psi_drift = wronskian_drift(psi);
  for (auto [name, drift] : {std::pair{"chi", chi_drift}, std::pair{"psi", psi_drift}}) {
    if (!(drift <= drift_tolerance)) {
      std::ostringstream msg;
      msg << name << " pair Wronskian drift " << drift << " exceeds tolerance " << drift_tolerance;
      throw WronskianViolation(msg.str(), drift);
    }
  }
  return LiouvilleSolution(std::move(chi), std::move(psi), m, pairing, chi_drift, psi_drift);
}

CauchyData restrict_to_slice(const LiouvilleSolution& sol, std::span<const double> xs) {
  std::vector<double> phi(xs.size()), pi(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const LightConeValues v = sol.eval_F(0.0, xs[i]);
    if (v.vanishes()) throw SingularSolution(0.0, xs[i]);
    phi[i] = sol.eval_phi(0.0, xs[i]);
    pi[i] = static_cast<double>(-2 * v.dt() / v.F);
  }
  return CauchyData::from_samples(xs, phi, pi);
}

FieldTable evaluate_grid(const LiouvilleSolution& sol, const SpacetimeGrid& g) {
  g.validate();
  if (!sol.contains(g)) {
    std::ostringstream msg;
    const Interval chi = sol.chi().range(), psi = sol.psi().range();
    msg << "grid needs chiral ranges x+t in [" << g.x_min + g.t_min << ", " << g.x_max + g.t_max
        << "] and x-t in [" << g.x_min - g.t_max << ", " << g.x_max - g.t_min
        << "]; tables cover [" << chi.lo << ", " << chi.hi << "] and [" << psi.lo << ", " << psi.hi
        << "]";
    throw OutOfDomain(msg.str());
  }
  FieldTable table;
  table.grid = g;
  table.rows.reserve(static_cast<std::size_t>(g.nt) * static_cast<std::size_t>(g.nx));
  table.min_abs_F = std::numeric_limits<double>::infinity();
  table.min_F = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nt; ++i) {
    for (int j = 0; j < g.nx; ++j) {
      const double t = g.t(i), x = g.x(j);
      const auto F = static_cast<double>(sol.eval_F(t, x).F);
      table.rows.push_back({t, x, F, sol.eval_phi(t, x)});
      table.min_abs_F = std::min(table.min_abs_F, std::abs(F));
      table.min_F = std::min(table.min_F, F);
    }
  }
  return table;
}

LiouvilleSolution solve(const CauchyData& d, double m, Interval chiral_range,
                        const SolveOptions& options) {
  const Interval range{std::min(chiral_range.lo, options.x0) - options.margin,
                       std::max(chiral_range.hi, options.x0) + options.margin};
  const PotentialPair potentials = compute_potentials(d, m);
  const ChiralICs ics = synthesize_ics(d, m, options.x0);
  ChiralPairs pairs = integrate_chirals(potentials, ics, range, options.h);
  return build_solution(std::move(pairs.chi), std::move(pairs.psi), m, options.pairing,
                        options.drift_tolerance);
}

LiouvilleSolution solve(const CauchyData& d, double m, const SpacetimeGrid& g,
                        const SolveOptions& options) {
  g.validate();
  return solve(d, m, g.chiral_hull(options.x0), options);
}

}  // namespace liouville
