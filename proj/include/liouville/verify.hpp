#pragma once

// Independent checks of constructed solutions: PDE residuals, a leapfrog
// finite-difference oracle, round trips through the inverse map, and
// continuity probes of the data-to-solution map and its inverse.

#include <functional>
#include <string_view>
#include <vector>

#include "liouville/assembly.hpp"

namespace liouville {

enum class ResidualMethod { finite_difference, light_cone };

std::string_view to_string(ResidualMethod m);

struct ResidualReport {
  SpacetimeGrid grid;
  ResidualMethod method = ResidualMethod::light_cone;
  double delta = 0.0;  // finite-difference step; 0 for the light-cone method
  double sup_residual = 0.0;
  double at_t = 0.0, at_x = 0.0;  // where the sup is attained
};

/// sup over grid nodes of |phi_tt - phi_xx + (m^2/2) e^phi|.
///   finite_difference: centred second differences of step `delta`.
///   light_cone: |8 (F d+d-F - d+F d-F + 1) / F^2| from exact chiral derivatives.
ResidualReport residual(const LiouvilleSolution& sol, const SpacetimeGrid& g, ResidualMethod method,
                        double delta = 1e-3);

using BoundaryFn = std::function<double(double t, double x)>;

/// Leapfrog solution of the Cauchy problem on a uniform grid, with Dirichlet
/// values on the two spatial edges supplied by `boundary`.
struct OracleField {
  SpacetimeGrid grid;
  std::vector<double> phi;  // row-major, t outer

  double at(int i, int j) const { return phi.at(static_cast<std::size_t>(i) * grid.nx + j); }
};

/// The grid must contain t = 0 as a node and satisfy dt/dx <= 1.
OracleField oracle_integrate(const CauchyData& d, double m, const SpacetimeGrid& g,
                             const BoundaryFn& boundary);

/// sup over oracle nodes of |phi_exact - phi_oracle|.
double compare(const LiouvilleSolution& sol, const OracleField& of);

/// Least-squares slope of log(error) against log(step).
double convergence_order(std::span<const double> steps, std::span<const double> errors);

struct OracleStudy {
  std::vector<double> dx;
  std::vector<double> errors;
  double order = 0.0;
};

/// Oracle vs exact solution on [0, t_max] x [x_min, x_max] for each spatial
/// step in `dx_list`, with dt = courant * dx.
OracleStudy oracle_convergence(const CauchyData& d, double m, const LiouvilleSolution& sol,
                               double t_max, Interval x_range, std::span<const double> dx_list,
                               double courant = 0.5);

/// S^-1 o S: build from `d`, restrict to t = 0, compare with `d` on
/// [-window, window] at `samples` points. Returns the larger of the phi and
/// pi sup errors.
double data_round_trip_error(const CauchyData& d, double m, double window, const SolveOptions& options,
                             int samples = 801);

/// S o S^-1: restrict `sol` to its whole t = 0 slice at spacing
/// `restrict_step`, rebuild from the sampled data and compare phi on `g`.
double solution_round_trip_error(const LiouvilleSolution& sol, const SpacetimeGrid& g,
                                 const SolveOptions& options, double restrict_step = 2.5e-3);

struct ProbeRow {
  double eps = 0.0;
  double input_distance = 0.0;
  double output_deviation = 0.0;
  /// Inverse probe only: sup over grid x-nodes of the phi change in the
  /// restricted data, for comparison with the t = 0 grid row.
  double slice_deviation = 0.0;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;  // in the order of the eps list

  /// Output deviations strictly decrease along the rows.
  bool strictly_decreasing() const;
  /// output(eps_k) / output(eps_{k+1}) for consecutive rows.
  std::vector<double> ratios() const;
};

struct ProbeSetup {
  Expr eta_phi = parse("1/cosh(x)");
  Expr eta_pi = parse("1/cosh(x)");
  SpacetimeGrid grid;
  SeminormSpec seminorm{1, 4.0, 256};
  SolveOptions options;
};

/// eps_list must be non-negative and strictly decreasing.
void validate_eps_list(std::span<const double> eps_list);

/// Continuity of S: for each eps, seminorm distance of perturbed data from
/// `d` (input) against sup over the grid of the solution change (output).
ProbeTable continuity_probe(const CauchyData& d, double m, std::span<const double> eps_list,
                            const ProbeSetup& setup);

/// Continuity of S^-1: sup over the grid of the solution change (input)
/// against the seminorm distance of the restricted Cauchy data (output).
ProbeTable inverse_continuity_probe(const CauchyData& d, double m, std::span<const double> eps_list,
                                    const ProbeSetup& setup);

}  // namespace liouville
