#pragma once

#include <string>
#include <vector>

#include "liouville/assembly.hpp"

namespace liouville {

struct SpacetimePoint {
  double t = 0.0;
  double x = 0.0;
};

struct CurveSample {
  double t = 0.0;
  double x = 0.0;
  double F = 0.0;
  double dFdx = 0.0;
  double light_cone_product = 0.0;  // d+F * d-F, equal to 1 on the zero set
};

/// A continued curve t -> x(t) with F(t, x(t)) = 0, sampled in increasing t.
struct ZeroCurve {
  SpacetimePoint seed;
  Interval requested;           // t-range asked for
  Interval covered;             // t-range actually reached
  double step_below = 0.0;      // t-step used below the seed
  double step_above = 0.0;      // t-step used above the seed
  std::vector<CurveSample> samples;
  std::string truncation;       // empty, or the reason the march stopped early
};

/// Scans F(t0, .) on `n_scan` uniform points of `x_range` and bisects every
/// sign change to |F| <= 1e-12. Returns seeds sorted by x.
std::vector<SpacetimePoint> find_seed_zeros(const LiouvilleSolution& sol, double t0, Interval x_range,
                                            int n_scan = 512);

struct TrackOptions {
  double ht = 1e-2;
  double newton_tolerance = 1e-10;
  int max_newton = 5;
  /// Largest |F| accepted at the seed.
  double seed_tolerance = 1e-10;
};

/// Predictor (RK4 on dx/dt = -F_t / F_x) and Newton corrector in x at fixed t,
/// marching from the seed to both ends of `t_range`. Leaving the chiral
/// tables truncates the curve ("domain-exit"); Newton failure throws.
ZeroCurve track(const LiouvilleSolution& sol, SpacetimePoint seed, Interval t_range,
                const TrackOptions& options = {});

struct LemmaReport {
  double max_abs_F = 0.0;
  double min_abs_dFdx = 0.0;
  double max_product_defect = 0.0;  // max |d+F d-F - 1|
  double coverage = 0.0;            // covered / requested t-length
  std::string truncation;
};

LemmaReport lemma_report(const ZeroCurve& curve);

}  // namespace liouville
