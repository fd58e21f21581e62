#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "liouville/initial_data.hpp"

using namespace liouville;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return xs;
}

CauchyData sampled_from(const CauchyData& d, double lo, double hi, int n) {
  const auto xs = linspace(lo, hi, n);
  std::vector<double> phi, pi;
  for (double x : xs) {
    phi.push_back(d.phi(x));
    pi.push_back(d.pi(x));
  }
  return CauchyData::from_samples(xs, phi, pi);
}

}  // namespace

TEST_CASE("closed-form data examples", "[initial_data]") {
  const CauchyData c = CauchyData::from_expressions("log(16/m^2)", "0", {{"m", 1.0}});
  for (double x : {-3.0, 0.0, 2.5}) {
    CHECK_THAT(c.phi(x), WithinAbs(std::log(16.0), 1e-15));
    CHECK(c.pi(x) == 0.0);
    CHECK(c.phi(x, 1) == 0.0);
    CHECK(c.phi(x, 2) == 0.0);
  }
  const CauchyData z = CauchyData::from_expressions("0", "0");
  CHECK(z.phi(1.0) == 0.0);
  CHECK(z.pi(-1.0) == 0.0);
  CHECK_THROWS_AS(CauchyData::from_expressions("sech(x)", "0"), UnknownIdentifier);
  CHECK(c.is_closed_form());
}

TEST_CASE("closed-form derivatives are symbolic", "[initial_data]") {
  const CauchyData d = CauchyData::from_expressions("sin(2*x)", "x^3");
  const double x = 0.3;
  CHECK_THAT(d.phi(x, 1), WithinAbs(2 * std::cos(2 * x), 1e-15));
  CHECK_THAT(d.phi(x, 2), WithinAbs(-4 * std::sin(2 * x), 1e-15));
  CHECK_THAT(d.pi(x, 1), WithinAbs(3 * x * x, 1e-15));
  CHECK_THAT(d.pi(x, 2), WithinAbs(6 * x, 1e-15));
  CHECK_THROWS_AS(d.phi(x, 3), InvalidArgument);
}

TEST_CASE("from_expressions validation", "[initial_data]") {
  CHECK_THROWS_AS(CauchyData::from_expressions("a*x", "0"), UnknownIdentifier);
  CHECK_THROWS_AS(CauchyData::from_expressions("m*x", "0"), UnboundParameter);
  CHECK_THROWS_AS(CauchyData::from_expressions("abs(x)", "0"), NotDifferentiable);
  CHECK_THROWS_AS(CauchyData::from_expressions("(x", "0"), ParseError);
  CHECK_NOTHROW(CauchyData::from_expressions("a*x", "0", {{"a", 2.0}}));
}

TEST_CASE("sampled data examples", "[initial_data]") {
  const auto xs = linspace(-5.0, 5.0, 101);
  const std::vector<double> phi(xs.size(), std::log(16.0)), pi(xs.size(), 0.0);
  const CauchyData d = CauchyData::from_samples(xs, phi, pi);
  CHECK_FALSE(d.is_closed_form());
  for (double x : {-5.0, -1.234, 0.0, 4.99, 5.0}) {
    CHECK_THAT(d.phi(x), WithinAbs(std::log(16.0), 1e-10));
    CHECK_THAT(d.pi(x), WithinAbs(0.0, 1e-10));
  }
  CHECK_THROWS_AS(d.phi(5.5), OutOfDomain);

  const auto seven = linspace(-1.0, 1.0, 7);
  const std::vector<double> zeros(7, 0.0);
  CHECK_THROWS_AS(CauchyData::from_samples(seven, zeros, zeros), InvalidArgument);

  const auto grid = linspace(-8.0, 8.0, 512);
  std::vector<double> sech, zero(grid.size(), 0.0);
  for (double x : grid) sech.push_back(1.0 / std::cosh(x));
  const CauchyData s = CauchyData::from_samples(grid, sech, zero);
  CHECK_THAT(s.phi(0.0, 1), WithinAbs(0.0, 1e-8));
}

TEST_CASE("sampled data rejects bad grids", "[initial_data]") {
  auto xs = linspace(0.0, 1.0, 10);
  const std::vector<double> v(10, 0.0);
  auto uneven = xs;
  uneven[4] += 0.01;
  CHECK_THROWS_AS(CauchyData::from_samples(uneven, v, v), InvalidArgument);
  auto bad = v;
  bad[3] = std::nan("");
  CHECK_THROWS_AS(CauchyData::from_samples(xs, bad, v), InvalidArgument);
  CHECK_THROWS_AS(CauchyData::from_samples(xs, std::vector<double>(9, 0.0), v), InvalidArgument);
  CHECK_THROWS_AS(CauchyData::from_samples(xs, v, v).phi_expr(), InvalidArgument);
}

TEST_CASE("csv round trip", "[initial_data]") {
  const auto dir = std::filesystem::temp_directory_path() / "liouville-initial-data-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "data.csv";
  const CauchyData d = CauchyData::from_expressions("exp(-x^2)", "0.5*sin(x)");
  write_csv(path, d, linspace(-6.0, 6.0, 1201));
  const CauchyData back = CauchyData::read_csv(path);
  CHECK(back.support().lo == -6.0);
  CHECK(back.support().hi == 6.0);
  for (double x : {-2.0, -0.37, 0.0, 1.5}) {
    CHECK_THAT(back.phi(x), WithinAbs(d.phi(x), 1e-9));
    CHECK_THAT(back.pi(x), WithinAbs(d.pi(x), 1e-9));
  }

  std::ofstream(dir / "bad_header.csv") << "x,phi\n0,1\n";
  CHECK_THROWS_AS(CauchyData::read_csv(dir / "bad_header.csv"), InvalidArgument);
  std::ofstream(dir / "bad_cell.csv") << "x,phi,pi\n0,1,zz\n";
  CHECK_THROWS_AS(CauchyData::read_csv(dir / "bad_cell.csv"), InvalidArgument);
  CHECK_THROWS_AS(CauchyData::read_csv(dir / "missing.csv"), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seminorm examples", "[initial_data]") {
  const CauchyData c = CauchyData::from_expressions("log(16)", "0");
  for (int order = 0; order <= 2; ++order)
    CHECK_THAT(seminorm(c, {order, 4.0, 256}), WithinAbs(std::log(16.0), 1e-14));
  CHECK(seminorm(CauchyData::from_expressions("0", "0"), {}) == 0.0);

  const CauchyData g = CauchyData::from_expressions("exp(-x^2)", "x*exp(-x^2)");
  for (int order = 0; order <= 2; ++order) {
    const double coarse = seminorm(g, {order, 4.0, 256});
    const double fine = seminorm(g, {order, 4.0, 512});
    // Sup over a finer sample set never shrinks, and moves by at most the
    // derivative modulus times the sample spacing.
    CHECK(fine >= coarse - 1e-15);
    CHECK(fine - coarse <= 8.0 / 255 * 4.0);
  }
  CHECK_THROWS_AS(seminorm(g, {3, 4.0, 256}), InvalidArgument);
  CHECK_THROWS_AS(seminorm(g, {0, 4.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(seminorm(g, {0, -1.0, 256}), InvalidArgument);
}

TEST_CASE("perturb examples", "[initial_data]") {
  const CauchyData d = CauchyData::from_expressions("log(16)", "0");
  const Expr eta = parse("1/cosh(x)");
  const CauchyData same = perturb(d, eta, eta, 0.0);
  for (double x : {-1.0, 0.0, 2.0}) {
    CHECK(same.phi(x) == d.phi(x));
    CHECK(same.pi(x) == d.pi(x));
  }
  CHECK_THAT(perturb(d, eta, eta, 0.1).phi(0.0), WithinAbs(std::log(16.0) + 0.1, 1e-15));
}

TEST_CASE("seminorm triangle inequality and homogeneity", "[initial_data][property]") {
  const CauchyData zero = CauchyData::from_expressions("0", "0");
  const std::vector<CauchyData> bases{
      CauchyData::from_expressions("log(16)", "0"),
      CauchyData::from_expressions("exp(-x^2)", "0.3*sin(x)"),
      CauchyData::from_expressions("1/cosh(x)", "0.5*exp(-x^2)"),
  };
  const std::vector<std::pair<const char*, const char*>> etas{
      {"1/cosh(x)", "1/cosh(x)"}, {"sin(x)", "cos(2*x)"}, {"x*exp(-x^2)", "0.5"}};
  for (int order = 0; order <= 2; ++order) {
    const SeminormSpec spec{order, 4.0, 256};
    for (const auto& [ep, eq] : etas) {
      const Expr eta_phi = parse(ep), eta_pi = parse(eq);
      const double eta_norm = seminorm(CauchyData::from_expressions(eta_phi, eta_pi), spec);
      for (double eps : {1.0, 0.1, 1e-3}) {
        for (const auto& d : bases) {
          CHECK(seminorm(perturb(d, eta_phi, eta_pi, eps), spec) <= seminorm(d, spec) + eps * eta_norm + 1e-12);
        }
        CHECK_THAT(seminorm(perturb(zero, eta_phi, eta_pi, eps), spec), WithinAbs(eps * eta_norm, 1e-12));
      }
    }
  }
}

TEST_CASE("spline backing agrees with the closed form", "[initial_data][property]") {
  const double window = 4.0;
  for (const auto& [p, q] : std::vector<std::pair<const char*, const char*>>{
           {"log(16)", "0"}, {"exp(-x^2)", "0"}, {"1/cosh(x)", "0.5*exp(-x^2)"}, {"0.5*sin(0.5*x)", "0.2"}}) {
    INFO(p << " / " << q);
    const CauchyData exact = CauchyData::from_expressions(p, q);
    const CauchyData spline = sampled_from(exact, -window, window, 1024);
    double phi_err = 0.0, dphi_err = 0.0, pi_err = 0.0;
    // Natural end conditions spoil the first few cells; compare on the interior.
    for (double x : linspace(-window + 0.25, window - 0.25, 2000)) {
      phi_err = std::max(phi_err, std::abs(spline.phi(x) - exact.phi(x)));
      dphi_err = std::max(dphi_err, std::abs(spline.phi(x, 1) - exact.phi(x, 1)));
      pi_err = std::max(pi_err, std::abs(spline.pi(x) - exact.pi(x)));
    }
    CHECK(phi_err <= 1e-6);
    CHECK(dphi_err <= 1e-6);
    CHECK(pi_err <= 1e-6);
  }
}
