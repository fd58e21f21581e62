#include "liouville/zero_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liouville {

namespace {

constexpr double kSeedTolerance = 1e-12;

double F_at(const LiouvilleSolution& sol, double t, double x) {
  return static_cast<double>(sol.eval_F(t, x).F);
}

// dx/dt along the zero set: F_t + F_x x' = 0.
double curve_slope(const LiouvilleSolution& sol, double t, double x) {
  const LightConeValues v = sol.eval_F(t, x);
  const Real fx = v.dx();
  if (fx == 0) throw NumericFailure("dF/dx vanishes on the zero curve");
  return static_cast<double>(-v.dt() / fx);
}

CurveSample make_sample(const LiouvilleSolution& sol, double t, double x) {
  const LightConeValues v = sol.eval_F(t, x);
  return {t, x, static_cast<double>(v.F), static_cast<double>(v.dx()),
          static_cast<double>(v.d_plus * v.d_minus)};
}

}  // namespace

std::vector<SpacetimePoint> find_seed_zeros(const LiouvilleSolution& sol, double t0, Interval x_range,
                                            int n_scan) {
  if (n_scan < 2) throw InvalidArgument("zero scan needs at least 2 points");
  if (!(x_range.hi >= x_range.lo)) throw InvalidArgument("scan range must be ordered");
  if (!sol.contains(t0, x_range.lo) || !sol.contains(t0, x_range.hi))
    throw OutOfDomain("scan slice leaves the solution domain");

  std::vector<double> xs(static_cast<std::size_t>(n_scan)), fs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = x_range.lo + x_range.length() * static_cast<double>(k) / (n_scan - 1);
    fs[k] = F_at(sol, t0, xs[k]);
  }

  std::vector<SpacetimePoint> seeds;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (fs[k] == 0.0) {
      seeds.push_back({t0, xs[k]});
      continue;
    }
    if (k + 1 == xs.size() || fs[k + 1] == 0.0 || (fs[k] > 0.0) == (fs[k + 1] > 0.0)) continue;
    double lo = xs[k], hi = xs[k + 1];
    double f_lo = fs[k];
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      mid = 0.5 * (lo + hi);
      const double f_mid = F_at(sol, t0, mid);
      if (std::abs(f_mid) <= kSeedTolerance || mid == lo || mid == hi) break;
      if ((f_mid > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    seeds.push_back({t0, mid});
  }
  std::sort(seeds.begin(), seeds.end(), [](auto a, auto b) { return a.x < b.x; });
  return seeds;
}

ZeroCurve track(const LiouvilleSolution& sol, SpacetimePoint seed, Interval t_range,
                const TrackOptions& options) {
  if (!(options.ht > 0.0)) throw InvalidArgument("tracking step must be positive");
  if (!t_range.contains(seed.t)) throw InvalidArgument("t-range must contain the seed");
  if (!sol.contains(seed.t, seed.x)) throw OutOfDomain("seed outside the solution domain");
  const double f_seed = F_at(sol, seed.t, seed.x);
  if (!(std::abs(f_seed) <= options.seed_tolerance)) {
    std::ostringstream msg;
    msg << "seed is not on the zero set: |F| = " << std::abs(f_seed) << " > "
        << options.seed_tolerance;
    throw InvalidArgument(msg.str());
  }

  ZeroCurve curve;
  curve.seed = seed;
  curve.requested = t_range;
  curve.covered = {seed.t, seed.t};

  auto march = [&](double end) {
    std::vector<CurveSample> out;
    const double span = end - seed.t;
    const auto steps = static_cast<long>(std::ceil(std::abs(span) / options.ht - 1e-9));
    if (steps == 0) return std::pair{out, 0.0};
    const double dt = span / static_cast<double>(steps);
    double x = seed.x;
    for (long k = 1; k <= steps; ++k) {
      const double t = seed.t + static_cast<double>(k - 1) * dt;
      const double t_next = k == steps ? end : seed.t + static_cast<double>(k) * dt;
      try {
        const double k1 = curve_slope(sol, t, x);
        const double k2 = curve_slope(sol, t + dt / 2, x + dt / 2 * k1);
        const double k3 = curve_slope(sol, t + dt / 2, x + dt / 2 * k2);
        const double k4 = curve_slope(sol, t_next, x + dt * k3);
        x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);

        LightConeValues v = sol.eval_F(t_next, x);
        int iterations = 0;
        while (std::fabs(v.F) > options.newton_tolerance && iterations < options.max_newton) {
          x -= static_cast<double>(v.F / v.dx());
          v = sol.eval_F(t_next, x);
          ++iterations;
        }
        if (std::fabs(v.F) > options.newton_tolerance) {
          std::ostringstream msg;
          msg << "Newton corrector diverged at t = " << t_next << " (|F| = "
              << static_cast<double>(std::fabs(v.F)) << " after " << options.max_newton
              << " iterations)";
          throw NumericFailure(msg.str());
        }
      } catch (const OutOfDomain&) {
        curve.truncation = "domain-exit";
        break;
      }
      out.push_back(make_sample(sol, t_next, x));
    }
    return std::pair{out, dt};
  };

  auto [below, step_below] = march(t_range.lo);
  auto [above, step_above] = march(t_range.hi);
  curve.step_below = std::abs(step_below);
  curve.step_above = std::abs(step_above);

  curve.samples.reserve(below.size() + above.size() + 1);
  curve.samples.insert(curve.samples.end(), below.rbegin(), below.rend());
  curve.samples.push_back(make_sample(sol, seed.t, seed.x));
  curve.samples.insert(curve.samples.end(), above.begin(), above.end());
  curve.covered = {curve.samples.front().t, curve.samples.back().t};
  return curve;
}

LemmaReport lemma_report(const ZeroCurve& curve) {
  LemmaReport report;
  report.truncation = curve.truncation;
  if (curve.samples.empty()) return report;
  report.min_abs_dFdx = std::abs(curve.samples.front().dFdx);
  for (const auto& s : curve.samples) {
    report.max_abs_F = std::max(report.max_abs_F, std::abs(s.F));
    report.min_abs_dFdx = std::min(report.min_abs_dFdx, std::abs(s.dFdx));
    report.max_product_defect = std::max(report.max_product_defect, std::abs(s.light_cone_product - 1.0));
  }
  const double requested = curve.requested.length();
  report.coverage = requested > 0.0 ? curve.covered.length() / requested : 1.0;
  return report;
}

}  // namespace liouville
