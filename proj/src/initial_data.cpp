#include "liouville/initial_data.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <variant>

namespace liouville {

namespace {

struct SplineDeleter {
  void operator()(gsl_spline* s) const noexcept { gsl_spline_free(s); }
};

/// Natural cubic spline over a uniform grid.
class NaturalSpline {
 public:
  NaturalSpline(std::span<const double> xs, std::span<const double> ys) {
    static const bool handler_off = [] {
      gsl_set_error_handler_off();
      return true;
    }();
    (void)handler_off;
    spline_.reset(gsl_spline_alloc(gsl_interp_cspline, xs.size()));
    if (!spline_) throw NumericFailure("spline allocation failed");
    if (gsl_spline_init(spline_.get(), xs.data(), ys.data(), xs.size()) != GSL_SUCCESS)
      throw NumericFailure("spline initialisation failed");
  }

  double eval(double x, int order) const {
    double out = 0.0;
    int status = GSL_SUCCESS;
    // A null accelerator keeps evaluation free of shared mutable state.
    switch (order) {
      case 0: status = gsl_spline_eval_e(spline_.get(), x, nullptr, &out); break;
      case 1: status = gsl_spline_eval_deriv_e(spline_.get(), x, nullptr, &out); break;
      case 2: status = gsl_spline_eval_deriv2_e(spline_.get(), x, nullptr, &out); break;
      default: throw InvalidArgument("spline derivative order must be 0, 1 or 2");
    }
    if (status != GSL_SUCCESS) throw OutOfDomain("spline query outside sample range");
    return out;
  }

 private:
  std::unique_ptr<gsl_spline, SplineDeleter> spline_;
};

}  // namespace

struct CauchyData::ClosedForm {
  // phi, phi', phi'' and pi, pi', pi''.
  std::array<Expr, kMaxDataDerivative + 1> phi;
  std::array<Expr, kMaxDataDerivative + 1> pi;
};

struct CauchyData::Sampled {
  Interval range;
  std::shared_ptr<const NaturalSpline> phi;
  std::shared_ptr<const NaturalSpline> pi;
};

struct CauchyData::Impl {
  std::variant<ClosedForm, Sampled> backing;
  Params params;
};

CauchyData::CauchyData(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

CauchyData CauchyData::from_expressions(std::string_view phi_text, std::string_view pi_text,
                                        const Params& params) {
  std::vector<std::string> names;
  for (const auto& [name, value] : params) names.push_back(name);
  if (std::find(names.begin(), names.end(), "m") == names.end()) names.emplace_back("m");

  auto parse_field = [&](std::string_view text, const char* field) {
    try {
      return parse(text, names);
    } catch (const ParseError& e) {
      throw ParseError(std::string(field) + ": " + e.what(), e.offset(), e.expected());
    }
  };
  return from_expressions(parse_field(phi_text, "phi"), parse_field(pi_text, "pi"), params);
}

CauchyData CauchyData::from_expressions(const Expr& phi, const Expr& pi, const Params& params) {
  for (const Expr* e : {&phi, &pi})
    for (const auto& name : parameters_of(*e))
      if (!params.contains(name)) throw UnboundParameter(name);

  ClosedForm cf;
  cf.phi[0] = phi;
  cf.pi[0] = pi;
  for (int k = 1; k <= kMaxDataDerivative; ++k) {
    try {
      cf.phi[k] = differentiate(cf.phi[k - 1]);
    } catch (const NotDifferentiable& e) {
      throw NotDifferentiable(std::string("phi: ") + e.what());
    }
    try {
      cf.pi[k] = differentiate(cf.pi[k - 1]);
    } catch (const NotDifferentiable& e) {
      throw NotDifferentiable(std::string("pi: ") + e.what());
    }
  }
  return CauchyData(std::make_shared<const Impl>(Impl{std::move(cf), params}));
}

CauchyData CauchyData::from_samples(std::span<const double> xs, std::span<const double> phi_values,
                                    std::span<const double> pi_values) {
  if (xs.size() < 8)
    throw InvalidArgument("sampled data needs at least 8 points, got " + std::to_string(xs.size()));
  if (phi_values.size() != xs.size() || pi_values.size() != xs.size())
    throw InvalidArgument("sample arrays differ in length");
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(phi_values[i]) || !std::isfinite(pi_values[i]))
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));

  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(h > 0.0)) throw InvalidArgument("sample grid must be strictly increasing");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double step = xs[i] - xs[i - 1];
    if (!(step > 0.0)) throw InvalidArgument("sample grid must be strictly increasing");
    if (std::abs(step - h) > 1e-6 * h)
      throw InvalidArgument("sample grid is not uniform at index " + std::to_string(i));
  }

  Sampled s;
  s.range = {xs.front(), xs.back()};
  s.phi = std::make_shared<const NaturalSpline>(xs, phi_values);
  s.pi = std::make_shared<const NaturalSpline>(xs, pi_values);
  return CauchyData(std::make_shared<const Impl>(Impl{std::move(s), {}}));
}

CauchyData CauchyData::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open data file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty data file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,phi,pi")
    throw InvalidArgument("data file " + path.string() + " must start with header 'x,phi,pi'");

  std::vector<double> xs, phis, pis;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::array<double, 3> values{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!std::getline(fields, cell, ','))
        throw InvalidArgument("row " + std::to_string(row) + " has fewer than 3 columns");
      try {
        std::size_t used = 0;
        values[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (std::getline(fields, cell, ','))
      throw InvalidArgument("row " + std::to_string(row) + " has more than 3 columns");
    xs.push_back(values[0]);
    phis.push_back(values[1]);
    pis.push_back(values[2]);
  }
  return from_samples(xs, phis, pis);
}

double CauchyData::phi(double x, int order) const {
  if (order < 0 || order > kMaxDataDerivative)
    throw InvalidArgument("phi derivative order " + std::to_string(order) + " not available");
  return std::visit(
      [&](const auto& b) -> double {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, ClosedForm>) {
          return evaluate(b.phi[order], x, impl_->params);
        } else {
          if (!b.range.contains(x)) throw OutOfDomain("phi queried outside sample range");
          return b.phi->eval(x, order);
        }
      },
      impl_->backing);
}

double CauchyData::pi(double x, int order) const {
  if (order < 0 || order > kMaxDataDerivative)
    throw InvalidArgument("pi derivative order " + std::to_string(order) + " not available");
  return std::visit(
      [&](const auto& b) -> double {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, ClosedForm>) {
          return evaluate(b.pi[order], x, impl_->params);
        } else {
          if (!b.range.contains(x)) throw OutOfDomain("pi queried outside sample range");
          return b.pi->eval(x, order);
        }
      },
      impl_->backing);
}

bool CauchyData::is_closed_form() const noexcept {
  return std::holds_alternative<ClosedForm>(impl_->backing);
}

const Params& CauchyData::params() const noexcept { return impl_->params; }

const Expr& CauchyData::phi_expr() const {
  if (!is_closed_form()) throw InvalidArgument("sampled data has no expression");
  return std::get<ClosedForm>(impl_->backing).phi[0];
}

const Expr& CauchyData::pi_expr() const {
  if (!is_closed_form()) throw InvalidArgument("sampled data has no expression");
  return std::get<ClosedForm>(impl_->backing).pi[0];
}

Interval CauchyData::support() const noexcept {
  if (const auto* s = std::get_if<Sampled>(&impl_->backing)) return s->range;
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

void write_csv(const std::filesystem::path& path, const CauchyData& d, std::span<const double> xs) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << "x,phi,pi\n" << std::setprecision(17);
  for (double x : xs) out << x << ',' << d.phi(x) << ',' << d.pi(x) << '\n';
}

namespace {

template <class Component>
double sup_over_window(const SeminormSpec& spec, Component&& component) {
  if (spec.order < 0 || spec.order > kMaxDataDerivative)
    throw InvalidArgument("seminorm order " + std::to_string(spec.order) +
                          " exceeds available derivatives (max " +
                          std::to_string(kMaxDataDerivative) + ")");
  if (!(spec.window > 0.0)) throw InvalidArgument("seminorm window must be positive");
  if (spec.sample_count < 64) throw InvalidArgument("seminorm needs at least 64 sample points");

  double sup = 0.0;
  const int n = spec.sample_count;
  for (int i = 0; i < n; ++i) {
    const double x = -spec.window + 2.0 * spec.window * i / (n - 1);
    for (int k = 0; k <= spec.order; ++k) sup = std::max(sup, std::abs(component(x, k)));
  }
  return sup;
}

}  // namespace

double seminorm(const CauchyData& d, const SeminormSpec& spec) {
  return sup_over_window(spec, [&](double x, int k) {
    return std::max(std::abs(d.phi(x, k)), std::abs(d.pi(x, k)));
  });
}

double seminorm_distance(const CauchyData& a, const CauchyData& b, const SeminormSpec& spec) {
  return sup_over_window(spec, [&](double x, int k) {
    return std::max(std::abs(a.phi(x, k) - b.phi(x, k)), std::abs(a.pi(x, k) - b.pi(x, k)));
  });
}

CauchyData perturb(const CauchyData& d, const Expr& eta_phi, const Expr& eta_pi, double eps) {
  if (!d.is_closed_form()) throw InvalidArgument("perturb requires closed-form data");
  if (!std::isfinite(eps)) throw InvalidArgument("perturbation size must be finite");
  const Expr scale = Expr::constant(eps);
  return CauchyData::from_expressions(d.phi_expr() + scale * eta_phi, d.pi_expr() + scale * eta_pi,
                                      d.params());
}

}  // namespace liouville
