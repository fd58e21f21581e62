#pragma once

#include <span>
#include <vector>

#include "liouville/chiral_ode.hpp"

namespace liouville {

/// How the chiral factors are combined into F.
///   cross:      F = chi1(x+t) psi2(x-t) + chi2(x+t) psi1(x-t)
///   same_index: F = chi1 psi1 + chi2 psi2  (wrong; kept as a negative control)
enum class Pairing { cross, same_index };

/// F and its light-cone derivatives. d_plus = d/dx+, d_minus = d/dx-,
/// with x+ = x + t and x- = x - t.
struct LightConeValues {
  Real F = 0;
  Real d_plus = 0;
  Real d_minus = 0;
  Real d_plus_minus = 0;
  /// Size of the terms that make up F, including argument round-off; sets the
  /// round-off floor of F.
  Real magnitude = 0;

  Real dt() const noexcept { return d_plus - d_minus; }
  Real dx() const noexcept { return d_plus + d_minus; }
  /// F d+d-F - d+F d-F; equals -1 for every exact solution.
  Real identity() const noexcept { return F * d_plus_minus - d_plus * d_minus; }
  /// True when F is zero to within the rounding of its terms.
  bool vanishes() const noexcept;
};

struct SpacetimeGrid {
  double t_min = -2.0, t_max = 2.0;
  double x_min = -4.0, x_max = 4.0;
  int nt = 41, nx = 81;

  double t(int i) const noexcept { return nt == 1 ? t_min : t_min + (t_max - t_min) * i / (nt - 1); }
  double x(int j) const noexcept { return nx == 1 ? x_min : x_min + (x_max - x_min) * j / (nx - 1); }
  double dt() const noexcept { return nt > 1 ? (t_max - t_min) / (nt - 1) : 0.0; }
  double dx() const noexcept { return nx > 1 ? (x_max - x_min) / (nx - 1) : 0.0; }

  /// Throws InvalidArgument unless node counts are positive and ranges ordered.
  void validate() const;

  /// Chiral range [x0 - R, x0 + R] with R = max|t| + max|x - x0|.
  Interval chiral_hull(double x0) const;
};

/// A point of the solution set: phi(t, x) = -log[(m^2/16) F(t, x)^2].
class LiouvilleSolution {
 public:
  LiouvilleSolution(WronskianPair chi, WronskianPair psi, double mass, Pairing pairing,
                    double chi_drift, double psi_drift);

  LightConeValues eval_F(double t, double x) const;

  double eval_phi(double t, double x) const;
  Real eval_phi_extended(double t, double x) const;

  /// True when both chiral arguments of (t, x) lie inside the tables.
  bool contains(double t, double x) const noexcept;
  bool contains(const SpacetimeGrid& g) const noexcept;

  double mass() const noexcept { return mass_; }
  Pairing pairing() const noexcept { return pairing_; }
  const WronskianPair& chi() const noexcept { return chi_; }
  const WronskianPair& psi() const noexcept { return psi_; }
  double chi_drift() const noexcept { return chi_drift_; }
  double psi_drift() const noexcept { return psi_drift_; }

 private:
  WronskianPair chi_;
  WronskianPair psi_;
  double mass_;
  Pairing pairing_;
  double chi_drift_;
  double psi_drift_;
};

/// Assembles F from the chiral pairs. Refuses pairs whose Wronskian drift
/// exceeds `drift_tolerance`.
LiouvilleSolution build_solution(WronskianPair chi, WronskianPair psi, double m,
                                 Pairing pairing = Pairing::cross, double drift_tolerance = 1e-8);

/// Inverse map: (phi(0, x), phi_t(0, x)) sampled at `xs`, with phi_t taken
/// from the exact chain rule phi_t = -2 F_t / F.
CauchyData restrict_to_slice(const LiouvilleSolution& sol, std::span<const double> xs);

struct FieldRow {
  double t, x, F, phi;
};

struct FieldTable {
  SpacetimeGrid grid;
  std::vector<FieldRow> rows;  // row-major, t outer
  double min_abs_F = 0.0;
  double min_F = 0.0;
};

FieldTable evaluate_grid(const LiouvilleSolution& sol, const SpacetimeGrid& g);

struct SolveOptions {
  double x0 = 0.0;
  double h = 1e-3;
  /// Extra length added on each side of the requested chiral range.
  double margin = 0.0;
  double drift_tolerance = 1e-8;
  Pairing pairing = Pairing::cross;
};

/// The full data-to-solution map: potentials, chiral ODEs, assembly. The
/// chiral tables cover `chiral_range` widened by `options.margin`.
LiouvilleSolution solve(const CauchyData& d, double m, Interval chiral_range,
                        const SolveOptions& options = {});

/// Same, with the chiral range taken from the light-cone hull of `g`.
LiouvilleSolution solve(const CauchyData& d, double m, const SpacetimeGrid& g,
                        const SolveOptions& options = {});

}  // namespace liouville
