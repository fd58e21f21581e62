#include "liouville/verify.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

namespace liouville {

std::string_view to_string(ResidualMethod m) {
  return m == ResidualMethod::light_cone ? "light-cone" : "finite-difference";
}

namespace {

void require_inside(const LiouvilleSolution& sol, const SpacetimeGrid& g, double pad) {
  SpacetimeGrid padded = g;
  padded.t_min -= pad;
  padded.t_max += pad;
  padded.x_min -= pad;
  padded.x_max += pad;
  if (!sol.contains(padded)) {
    std::ostringstream msg;
    msg << "grid [" << g.t_min << ", " << g.t_max << "] x [" << g.x_min << ", " << g.x_max << "]";
    if (pad > 0) msg << " padded by " << pad;
    msg << " leaves the solution domain";
    throw OutOfDomain(msg.str());
  }
}

}  // namespace

ResidualReport residual(const LiouvilleSolution& sol, const SpacetimeGrid& g, ResidualMethod method,
                        double delta) {
  g.validate();
  ResidualReport report;
  report.grid = g;
  report.method = method;
  const Real m2 = static_cast<Real>(sol.mass()) * sol.mass();

  if (method == ResidualMethod::finite_difference) {
    if (!(delta > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    require_inside(sol, g, delta);
    report.delta = delta;
  } else {
    require_inside(sol, g, 0.0);
  }

  for (int i = 0; i < g.nt; ++i) {
    for (int j = 0; j < g.nx; ++j) {
      const double t = g.t(i), x = g.x(j);
      Real r = 0;
      if (method == ResidualMethod::light_cone) {
        const LightConeValues v = sol.eval_F(t, x);
        if (v.vanishes()) throw SingularSolution(t, x);
        r = 8 * (v.identity() + 1) / (v.F * v.F);
      } else {
        const Real d2 = static_cast<Real>(delta) * delta;
        const Real c = sol.eval_phi_extended(t, x);
        const Real phi_tt = (sol.eval_phi_extended(t + delta, x) - 2 * c +
                             sol.eval_phi_extended(t - delta, x)) / d2;
        const Real phi_xx = (sol.eval_phi_extended(t, x + delta) - 2 * c +
                             sol.eval_phi_extended(t, x - delta)) / d2;
        r = phi_tt - phi_xx + m2 / 2 * std::exp(c);
      }
      const auto abs_r = static_cast<double>(std::fabs(r));
      if (!std::isfinite(abs_r)) throw NumericFailure("non-finite residual");
      if (abs_r > report.sup_residual || (i == 0 && j == 0)) {
        report.sup_residual = abs_r;
        report.at_t = t;
        report.at_x = x;
      }
    }
  }
  return report;
}

OracleField oracle_integrate(const CauchyData& d, double m, const SpacetimeGrid& g,
                             const BoundaryFn& boundary) {
  g.validate();
  if (!(m > 0.0)) throw InvalidArgument("mass must be positive");
  if (g.nx < 3) throw InvalidArgument("oracle grid needs at least 3 spatial nodes");
  const double dt = g.dt(), dx = g.dx();
  if (g.nt > 1 && dt / dx > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "CFL violated: dt/dx = " << dt / dx << " > 1";
    throw InvalidArgument(msg.str());
  }

  int i0 = 0;
  if (g.nt > 1) i0 = static_cast<int>(std::lround(-g.t_min / dt));
  if (i0 < 0 || i0 >= g.nt || std::abs(g.t(i0)) > 1e-9 * std::max(1.0, dt))
    throw InvalidArgument("oracle grid must contain t = 0 as a node");

  OracleField field;
  field.grid = g;
  field.phi.assign(static_cast<std::size_t>(g.nt) * g.nx, 0.0);
  const auto nx = static_cast<std::size_t>(g.nx);
  auto row = [&](int i) { return field.phi.begin() + static_cast<std::ptrdiff_t>(i * nx); };

  std::vector<double> pi(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    row(i0)[j] = d.phi(g.x(static_cast<int>(j)), 0);
    pi[j] = d.pi(g.x(static_cast<int>(j)), 0);
  }

  const double source = m * m / 2.0;
  const double r2 = (dt / dx) * (dt / dx);
  auto check = [&](int i, std::size_t j, double v) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "oracle blow-up at (t, x) = (" << g.t(i) << ", " << g.x(static_cast<int>(j)) << ")";
      throw NumericFailure(msg.str());
    }
    return v;
  };

  for (int dir : {+1, -1}) {
    const int first = i0 + dir;
    if (first < 0 || first >= g.nt) continue;
    // Taylor start: phi + dt pi + dt^2/2 (phi_xx - (m^2/2) e^phi).
    auto cur = row(i0);
    auto next = row(first);
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      const double lap = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) / (dx * dx);
      next[j] = check(first, j,
                      cur[j] + dir * dt * pi[j] + 0.5 * dt * dt * (lap - source * std::exp(cur[j])));
    }
    const double t1 = g.t(first);
    next[0] = boundary(t1, g.x(0));
    next[nx - 1] = boundary(t1, g.x(g.nx - 1));

    for (int i = first; i + dir >= 0 && i + dir < g.nt; i += dir) {
      auto prev = row(i - dir);
      auto now = row(i);
      auto out = row(i + dir);
      for (std::size_t j = 1; j + 1 < nx; ++j) {
        out[j] = check(i + dir, j,
                       2.0 * now[j] - prev[j] + r2 * (now[j + 1] - 2.0 * now[j] + now[j - 1]) -
                           dt * dt * source * std::exp(now[j]));
      }
      const double tn = g.t(i + dir);
      out[0] = boundary(tn, g.x(0));
      out[nx - 1] = boundary(tn, g.x(g.nx - 1));
    }
  }
  return field;
}

double compare(const LiouvilleSolution& sol, const OracleField& of) {
  const SpacetimeGrid& g = of.grid;
  if (!sol.contains(g)) throw OutOfDomain("oracle grid leaves the solution domain");
  double sup = 0.0;
  for (int i = 0; i < g.nt; ++i)
    for (int j = 0; j < g.nx; ++j)
      sup = std::max(sup, std::abs(sol.eval_phi(g.t(i), g.x(j)) - of.at(i, j)));
  return sup;
}

double convergence_order(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size() || steps.size() < 2)
    throw InvalidArgument("convergence order needs at least two (step, error) pairs");
  const auto n = static_cast<double>(steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0) || !(errors[k] > 0.0))
      throw InvalidArgument("convergence order needs positive steps and errors");
    const double lx = std::log(steps[k]), ly = std::log(errors[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OracleStudy oracle_convergence(const CauchyData& d, double m, const LiouvilleSolution& sol,
                               double t_max, Interval x_range, std::span<const double> dx_list,
                               double courant) {
  OracleStudy study;
  for (double dx : dx_list) {
    const double dt = courant * dx;
    SpacetimeGrid g;
    g.t_min = 0.0;
    g.x_min = x_range.lo;
    g.x_max = x_range.hi;
    g.nx = static_cast<int>(std::lround(x_range.length() / dx)) + 1;
    g.nt = static_cast<int>(std::lround(t_max / dt)) + 1;
    g.t_max = (g.nt - 1) * dt;
    const OracleField field =
        oracle_integrate(d, m, g, [&](double t, double x) { return sol.eval_phi(t, x); });
    study.dx.push_back(g.dx());
    study.errors.push_back(compare(sol, field));
  }
  if (study.dx.size() >= 2) study.order = convergence_order(study.dx, study.errors);
  return study;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

std::vector<double> phi_on_grid(const LiouvilleSolution& sol, const SpacetimeGrid& g) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(g.nt) * g.nx);
  for (int i = 0; i < g.nt; ++i)
    for (int j = 0; j < g.nx; ++j) out.push_back(sol.eval_phi(g.t(i), g.x(j)));
  return out;
}

double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sup = std::max(sup, std::abs(a[k] - b[k]));
  return sup;
}

}  // namespace

double data_round_trip_error(const CauchyData& d, double m, double window, const SolveOptions& options,
                             int samples) {
  if (!(window > 0.0) || samples < 8) throw InvalidArgument("bad round-trip window");
  const LiouvilleSolution sol = solve(d, m, Interval{-window, window}, options);
  const std::vector<double> xs = linspace(-window, window, static_cast<std::size_t>(samples));
  const CauchyData back = restrict_to_slice(sol, xs);
  double sup = 0.0;
  for (double x : xs) {
    sup = std::max(sup, std::abs(back.phi(x) - d.phi(x)));
    sup = std::max(sup, std::abs(back.pi(x) - d.pi(x)));
  }
  return sup;
}

double solution_round_trip_error(const LiouvilleSolution& sol, const SpacetimeGrid& g,
                                 const SolveOptions& options, double restrict_step) {
  g.validate();
  if (!(restrict_step > 0.0)) throw InvalidArgument("restriction step must be positive");
  const Interval chi = sol.chi().range(), psi = sol.psi().range();
  const Interval slice{std::max(chi.lo, psi.lo), std::min(chi.hi, psi.hi)};
  const auto n = static_cast<std::size_t>(std::ceil(slice.length() / restrict_step)) + 1;
  const CauchyData data = restrict_to_slice(sol, linspace(slice.lo, slice.hi, n));

  SolveOptions rebuild = options;
  rebuild.margin = 0.0;
  const Interval hull = g.chiral_hull(rebuild.x0);
  if (!slice.contains(hull)) throw OutOfDomain("grid light-cone hull exceeds the restricted slice");
  const LiouvilleSolution again = solve(data, sol.mass(), hull, rebuild);
  return sup_difference(phi_on_grid(sol, g), phi_on_grid(again, g));
}

bool ProbeTable::strictly_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].output_deviation < rows[k - 1].output_deviation)) return false;
  return true;
}

std::vector<double> ProbeTable::ratios() const {
  std::vector<double> out;
  for (std::size_t k = 1; k < rows.size(); ++k)
    out.push_back(rows[k].output_deviation > 0.0
                      ? rows[k - 1].output_deviation / rows[k].output_deviation
                      : std::numeric_limits<double>::infinity());
  return out;
}

void validate_eps_list(std::span<const double> eps_list) {
  if (eps_list.empty()) throw InvalidArgument("eps list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!std::isfinite(eps_list[k]) || eps_list[k] < 0.0)
      throw InvalidArgument("eps values must be finite and non-negative");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw InvalidArgument("eps list must be strictly decreasing");
  }
}

namespace {

template <class Fn>
std::vector<ProbeRow> run_probe_rows(std::span<const double> eps_list, Fn&& row_for) {
  std::vector<std::future<ProbeRow>> jobs;
  for (double eps : eps_list)
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      try {
        return row_for(eps);
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "probe failed at eps = " << eps << ": " << e.what();
        throw NumericFailure(msg.str());
      }
    }));
  std::vector<ProbeRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

}  // namespace

ProbeTable continuity_probe(const CauchyData& d, double m, std::span<const double> eps_list,
                            const ProbeSetup& setup) {
  validate_eps_list(eps_list);
  const LiouvilleSolution base = solve(d, m, setup.grid, setup.options);
  const std::vector<double> base_phi = phi_on_grid(base, setup.grid);

  ProbeTable table;
  table.rows = run_probe_rows(eps_list, [&](double eps) {
    const CauchyData moved = perturb(d, setup.eta_phi, setup.eta_pi, eps);
    const LiouvilleSolution sol = solve(moved, m, setup.grid, setup.options);
    ProbeRow row;
    row.eps = eps;
    row.input_distance = seminorm_distance(moved, d, setup.seminorm);
    row.output_deviation = sup_difference(phi_on_grid(sol, setup.grid), base_phi);
    return row;
  });
  return table;
}

ProbeTable inverse_continuity_probe(const CauchyData& d, double m, std::span<const double> eps_list,
                                    const ProbeSetup& setup) {
  validate_eps_list(eps_list);
  const SpacetimeGrid& g = setup.grid;
  if (setup.seminorm.window > std::min(-g.x_min, g.x_max))
    throw InvalidArgument("seminorm window must lie inside the grid's x-range");

  // Restriction nodes refine the grid's x-nodes so those stay spline nodes.
  constexpr int kRefine = 10;
  const std::vector<double> xs =
      linspace(g.x_min, g.x_max, static_cast<std::size_t>((g.nx - 1) * kRefine + 1));

  const LiouvilleSolution base = solve(d, m, g, setup.options);
  const std::vector<double> base_phi = phi_on_grid(base, g);
  const CauchyData base_slice = restrict_to_slice(base, xs);

  ProbeTable table;
  table.rows = run_probe_rows(eps_list, [&](double eps) {
    const LiouvilleSolution sol = solve(perturb(d, setup.eta_phi, setup.eta_pi, eps), m, g,
                                        setup.options);
    const CauchyData slice = restrict_to_slice(sol, xs);
    ProbeRow row;
    row.eps = eps;
    row.input_distance = sup_difference(phi_on_grid(sol, g), base_phi);
    row.output_deviation = seminorm_distance(slice, base_slice, setup.seminorm);
    for (int j = 0; j < g.nx; ++j)
      row.slice_deviation =
          std::max(row.slice_deviation, std::abs(slice.phi(g.x(j)) - base_slice.phi(g.x(j))));
    return row;
  });
  return table;
}

}  // namespace liouville
