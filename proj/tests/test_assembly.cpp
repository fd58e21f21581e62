#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "liouville/corpus.hpp"
#include "support.hpp"

using namespace liouville;
using namespace liouville::testing;
using Catch::Matchers::WithinAbs;

namespace {

double as_double(Real v) { return static_cast<double>(v); }

SolveOptions padded(double margin = 0.5) {
  SolveOptions o;
  o.margin = margin;
  return o;
}

// (f1, f2) -> (a f1 + b f2, c f1 + d f2), applied to values and derivatives.
WronskianPair regauge(const WronskianPair& wp, double a, double b, double c, double d) {
  std::vector<WronskianPair::Node> nodes;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const auto& n = wp.node(i);
    nodes.push_back({a * n.f1 + b * n.f2, a * n.df1 + b * n.df2, a * n.ddf1 + b * n.ddf2,
                     c * n.f1 + d * n.f2, c * n.df1 + d * n.df2, c * n.ddf1 + d * n.ddf2});
  }
  return WronskianPair(wp.origin(), wp.step(), nodes, wp.potential());
}

}  // namespace

TEST_CASE("linear family gives F = 2x", "[assembly]") {
  const LiouvilleSolution sol = linear_family();
  const LightConeValues v = sol.eval_F(3.0, 1.0);
  CHECK_THAT(as_double(v.F), WithinAbs(2.0, 1e-12));
  CHECK_THAT(as_double(v.d_plus), WithinAbs(1.0, 1e-12));
  CHECK_THAT(as_double(v.d_minus), WithinAbs(1.0, 1e-12));
  CHECK_THAT(as_double(v.d_plus_minus), WithinAbs(0.0, 1e-12));
  CHECK_THAT(as_double(v.identity()), WithinAbs(-1.0, 1e-12));
  CHECK_THROWS_AS(sol.eval_phi_extended(0.5, 0.0), SingularSolution);
  // Away from x = 0 the singular solution -log(m^2 x^2 / 4) is recovered.
  CHECK_THAT(sol.eval_phi(0.7, 1.3), WithinAbs(-std::log(1.3 * 1.3 / 4), 1e-12));
}

TEST_CASE("hyperbolic family gives F = cosh(2t)", "[assembly]") {
  const LiouvilleSolution sol = hyperbolic_family(4.0);
  const LightConeValues v = sol.eval_F(0.0, 0.4);
  CHECK_THAT(as_double(v.F), WithinAbs(1.0, 1e-12));
  CHECK_THAT(as_double(v.d_plus), WithinAbs(0.0, 1e-12));
  CHECK_THAT(as_double(v.d_minus), WithinAbs(0.0, 1e-12));
  CHECK_THAT(as_double(v.d_plus_minus), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(sol.eval_phi(0.0, 0.0), WithinAbs(0.0, 1e-12));
  CHECK_THAT(as_double(sol.eval_F(1.1, -2.0).F), WithinAbs(std::cosh(2.2), 1e-10));
}

TEST_CASE("build rejects broken Wronskians and bad mass", "[assembly]") {
  const WronskianPair good = family_pair("1", "x", {-2.0, 2.0});
  const WronskianPair broken = family_pair("1.01", "x", {-2.0, 2.0});
  CHECK_THROWS_AS(build_solution(good, broken, 1.0), WronskianViolation);
  CHECK_THROWS_AS(build_solution(broken, good, 1.0), WronskianViolation);
  CHECK_THROWS_AS(build_solution(good, good, 0.0), InvalidArgument);
  try {
    build_solution(good, broken, 1.0);
  } catch (const WronskianViolation& e) {
    CHECK_THAT(e.drift(), WithinAbs(0.01, 1e-12));
  }
}

TEST_CASE("constant data reproduces the closed form", "[assembly]") {
  for (const auto& [c, m] : std::vector<std::pair<double, double>>{{std::log(16.0), 1.0}, {0.0, 4.0}, {1.0, 1.0}}) {
    const CauchyData d = CauchyData::from_expressions("c", "0", {{"c", c}});
    const SpacetimeGrid g;
    const LiouvilleSolution sol = solve(d, m, g);
    const FieldTable table = evaluate_grid(sol, g);
    double err = 0.0;
    for (const auto& r : table.rows) err = std::max(err, std::abs(r.phi - constant_data_phi(c, m, r.t)));
    INFO("c = " << c << ", m = " << m);
    CHECK(err <= 1e-6);
    const double k = m / 4.0 * std::exp(c / 2.0);
    CHECK_THAT(table.min_F, WithinAbs(1.0 / k, 1e-9));
  }
}

TEST_CASE("grid evaluation edge cases", "[assembly]") {
  const CauchyData d = CauchyData::from_expressions("exp(-x^2)", "0.2*sin(x)");
  SpacetimeGrid point;
  point.t_min = point.t_max = 0.0;
  point.x_min = point.x_max = 0.0;
  point.nt = point.nx = 1;
  const FieldTable one = evaluate_grid(solve(d, 1.0, point), point);
  REQUIRE(one.rows.size() == 1);
  CHECK_THAT(one.rows[0].phi, WithinAbs(d.phi(0.0), 1e-9));

  SpacetimeGrid empty;
  empty.nt = 0;
  CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  CHECK_THROWS_AS(solve(d, 1.0, empty), InvalidArgument);

  const LiouvilleSolution small = solve(d, 1.0, Interval{-1.0, 1.0});
  CHECK_THROWS_AS(evaluate_grid(small, SpacetimeGrid{}), OutOfDomain);
}

TEST_CASE("chiral hull", "[assembly]") {
  SpacetimeGrid g;
  const Interval hull = g.chiral_hull(0.0);
  CHECK(hull.lo == -6.0);
  CHECK(hull.hi == 6.0);
  const Interval shifted = g.chiral_hull(1.0);
  // R = max|t| + max|x - x0| = 2 + 5.
  CHECK(shifted.lo == -6.0);
  CHECK(shifted.hi == 8.0);
  CHECK(g.t(0) == -2.0);
  CHECK(g.x(80) == 4.0);
}

TEST_CASE("restriction examples", "[assembly]") {
  std::vector<double> xs;
  for (int k = 0; k <= 80; ++k) xs.push_back(-4.0 + 0.1 * k);
  for (double m : {1.0, 2.0}) {
    const CauchyData d = CauchyData::from_expressions("log(16/m^2)", "0", {{"m", m}});
    const CauchyData slice = restrict_to_slice(solve(d, m, SpacetimeGrid{}, padded()), xs);
    for (double x : xs) {
      CHECK_THAT(slice.phi(x), WithinAbs(std::log(16.0 / (m * m)), 1e-9));
      CHECK_THAT(slice.pi(x), WithinAbs(0.0, 1e-9));
    }
  }
  const double m = 2.0;
  const CauchyData h = restrict_to_slice(hyperbolic_family(m), xs);
  CHECK_THAT(h.phi(0.35), WithinAbs(-std::log(m * m / 16), 1e-9));
  CHECK_THAT(h.pi(-1.0), WithinAbs(0.0, 1e-9));
  CHECK_THROWS_AS(restrict_to_slice(linear_family(), xs), SingularSolution);
}

TEST_CASE("light-cone identity and positivity on the corpus", "[assembly][property]") {
  std::mt19937_64 rng(5);
  const SpacetimeGrid g;
  std::uniform_real_distribution<double> t(g.t_min, g.t_max), x(g.x_min, g.x_max);
  for (const auto& entry : smooth_corpus()) {
    const LiouvilleSolution sol = solve(entry.data(), entry.mass, g);
    INFO(entry.name);
    for (int k = 0; k < 200; ++k) {
      const LightConeValues v = sol.eval_F(t(rng), x(rng));
      CHECK_THAT(as_double(v.identity()), WithinAbs(-1.0, 1e-6));
    }
    CHECK(evaluate_grid(sol, g).min_F > 0.0);
  }
}

TEST_CASE("same-index pairing breaks the light-cone identity", "[assembly]") {
  SolveOptions o;
  o.pairing = Pairing::same_index;
  const LiouvilleSolution sol = solve(CauchyData::from_expressions("exp(-x^2)", "0"), 1.0, SpacetimeGrid{}, o);
  CHECK(sol.pairing() == Pairing::same_index);
  CHECK(std::abs(as_double(sol.eval_F(0.5, 0.5).identity()) + 1.0) > 0.5);
}

TEST_CASE("phi is invariant under unimodular regauging", "[assembly][property]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> entry(-1.5, 1.5);
  const SpacetimeGrid g;
  for (const auto& c : {smooth_corpus()[3], smooth_corpus()[8]}) {
    const CauchyData d = c.data();
    const ChiralPairs pairs = integrate_chirals(PotentialPair(d, c.mass), synthesize_ics(d, c.mass),
                                                g.chiral_hull(0.0), 1e-3);
    const LiouvilleSolution base = build_solution(pairs.chi, pairs.psi, c.mass);
    for (int trial = 0; trial < 5; ++trial) {
      double a = entry(rng), b = entry(rng), cc = entry(rng);
      while (std::abs(a) < 0.2) a = entry(rng);
      const double dd = (1.0 + b * cc) / a;
      // chi -> (a chi1 + b chi2, c chi1 + d chi2); (psi2, psi1) -> (d psi2 - c psi1, -b psi2 + a psi1).
      const WronskianPair chi = regauge(pairs.chi, a, b, cc, dd);
      const WronskianPair psi = regauge(pairs.psi, a, -b, -cc, dd);
      const LiouvilleSolution turned = build_solution(chi, psi, c.mass);
      for (int k = 0; k < 50; ++k) {
        const double t = g.t_min + (g.t_max - g.t_min) * k / 49, x = g.x_max - 0.13 * k;
        CHECK_THAT(as_double(turned.eval_F(t, x).F), WithinAbs(as_double(base.eval_F(t, x).F), 1e-9));
        CHECK_THAT(turned.eval_phi(t, x), WithinAbs(base.eval_phi(t, x), 1e-9));
      }
    }
  }
}

TEST_CASE("solve validates its inputs", "[assembly]") {
  const CauchyData d = CauchyData::from_expressions("0", "0");
  CHECK_THROWS_AS(solve(d, -1.0, SpacetimeGrid{}), InvalidArgument);
  SolveOptions o;
  o.h = 0.0;
  CHECK_THROWS_AS(solve(d, 1.0, SpacetimeGrid{}, o), InvalidArgument);
  CHECK_THROWS_AS(solve(CauchyData::from_expressions("log(x)", "0"), 1.0, SpacetimeGrid{}), Error);
}
