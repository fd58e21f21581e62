#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "liouville/expr.hpp"

namespace liouville {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  bool contains(const Interval& other) const noexcept { return other.lo >= lo && other.hi <= hi; }
};

/// Highest derivative order available from either backing.
inline constexpr int kMaxDataDerivative = 2;

/// Cauchy data (phi, pi) = (field, time derivative) on the t = 0 slice.
///
/// Closed-form data keeps the expression trees and their symbolic
/// derivatives; sampled data keeps natural cubic splines through the samples
/// and answers derivative queries from the splines. Immutable once built.
class CauchyData {
 public:
  static CauchyData from_expressions(std::string_view phi_text, std::string_view pi_text,
                                     const Params& params = {});
  static CauchyData from_expressions(const Expr& phi, const Expr& pi, const Params& params = {});

  /// Grid must be uniform, strictly increasing, with at least 8 points.
  static CauchyData from_samples(std::span<const double> xs, std::span<const double> phi_values,
                                 std::span<const double> pi_values);

  /// Reads CSV with header `x,phi,pi`.
  static CauchyData read_csv(const std::filesystem::path& path);

  double phi(double x, int order = 0) const;
  double pi(double x, int order = 0) const;

  bool is_closed_form() const noexcept;
  const Params& params() const noexcept;

  /// Expression trees (closed-form backing only).
  const Expr& phi_expr() const;
  const Expr& pi_expr() const;

  /// Where the data may be queried: the sample range for sampled data,
  /// the whole real line for closed-form data.
  Interval support() const noexcept;

 private:
  struct ClosedForm;
  struct Sampled;
  struct Impl;
  explicit CauchyData(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

void write_csv(const std::filesystem::path& path, const CauchyData& d, std::span<const double> xs);

/// Desk-scale Frechet seminorm: max over derivative orders k <= order and
/// over both components of sup_{|x| <= window} |d^(k)(x)|, with the sup taken
/// over `sample_count` uniform points.
struct SeminormSpec {
  int order = 0;
  double window = 4.0;
  int sample_count = 256;
};

double seminorm(const CauchyData& d, const SeminormSpec& spec);

/// Seminorm of the difference a - b.
double seminorm_distance(const CauchyData& a, const CauchyData& b, const SeminormSpec& spec);

/// (phi + eps * eta_phi, pi + eps * eta_pi). Closed-form data only.
CauchyData perturb(const CauchyData& d, const Expr& eta_phi, const Expr& eta_pi, double eps);

}  // namespace liouville
