#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

#include "qslimit/errors.hpp"

namespace qsl {

enum class GridKind { density, cdf, cf, generic };

std::string_view to_string(GridKind kind);
GridKind grid_kind_from_string(std::string_view name);

template <class Scalar>
inline constexpr bool is_complex_v = !std::is_same_v<Scalar, typename Eigen::NumTraits<Scalar>::Real>;

/// Samples of a real or complex function on a closed uniform grid
/// x_i = lo + i (hi - lo) / (N - 1), i = 0..N-1.
///
/// `tol_mass` bounds the probability mass unaccounted for by the samples
/// (densities and CDFs) and, for CF grids, the accumulated sup-norm error
/// estimate of the stored values. `slack` is the sup-norm discretization error
/// estimate carried through pipelines; it is an estimate, not a certificate.
template <class Scalar>
class GridFunction {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridFunction(double lo, double hi, Values values, GridKind kind, double tol_mass = 0.0,
               double slack = 0.0)
      : lo_(lo), hi_(hi), values_(std::move(values)), kind_(kind), tol_mass_(tol_mass),
        slack_(slack) {
    validate();
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  Eigen::Index size() const { return values_.size(); }
  double spacing() const { return (hi_ - lo_) / static_cast<double>(values_.size() - 1); }
  double x(Eigen::Index i) const {
    return i + 1 == size() ? hi_ : lo_ + static_cast<double>(i) * spacing();
  }
  const Values& values() const { return values_; }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }
  GridKind kind() const { return kind_; }
  double tol_mass() const { return tol_mass_; }
  double slack() const { return slack_; }

  Eigen::ArrayXd abscissae() const {
    Eigen::ArrayXd xs(size());
    for (Eigen::Index i = 0; i < size(); ++i) xs[i] = x(i);
    return xs;
  }

  bool same_grid(const GridFunction& other) const {
    return lo_ == other.lo_ && hi_ == other.hi_ && size() == other.size();
  }

  /// Trapezoid weights h, ..., h with h/2 at the ends.
  Eigen::ArrayXd trapezoid_weights() const {
    Eigen::ArrayXd w = Eigen::ArrayXd::Constant(size(), spacing());
    w[0] *= 0.5;
    w[size() - 1] *= 0.5;
    return w;
  }

  Scalar integral() const { return (trapezoid_weights().template cast<Scalar>() * values_).sum(); }

  /// Piecewise-linear value at an arbitrary abscissa; zero outside the domain.
  Scalar linear_at(double xv) const {
    const double s = (xv - lo_) / spacing();
    if (!(s >= 0.0) || s > static_cast<double>(size() - 1)) return Scalar(0);
    const auto j = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), size() - 2);
    const double frac = s - static_cast<double>(j);
    return values_[j] * (1.0 - frac) + values_[j + 1] * frac;
  }

  GridFunction with_values(Values values, GridKind kind, double tol_mass, double slack) const {
    return GridFunction(lo_, hi_, std::move(values), kind, tol_mass, slack);
  }

 private:
  void validate() const;

  double lo_;
  double hi_;
  Values values_;
  GridKind kind_;
  double tol_mass_;
  double slack_;
};

using RealGrid = GridFunction<double>;
using ComplexGrid = GridFunction<std::complex<double>>;

/// Mass discrepancy tolerated beyond tol_mass for rounding in trapezoid sums.
inline constexpr double kMassRounding = 1e-12;

template <class Scalar>
void GridFunction<Scalar>::validate() const {
  if (values_.size() < 2) throw ContractViolation("GridFunction: need at least two samples");
  if (!(lo_ < hi_)) throw ContractViolation("GridFunction: domain_lo must be below domain_hi");
  if (!(tol_mass_ >= 0.0) || !(slack_ >= 0.0))
    throw ContractViolation("GridFunction: tolerances must be nonnegative");
  if constexpr (is_complex_v<Scalar>) {
    if (kind_ == GridKind::density || kind_ == GridKind::cdf)
      throw ContractViolation("GridFunction: density and cdf grids are real-valued");
    if (kind_ == GridKind::cf && values_[0] != Scalar(1.0))
      throw ContractViolation("GridFunction: characteristic function must equal 1 at t = 0");
    if (kind_ == GridKind::cf && lo_ != 0.0)
      throw ContractViolation("GridFunction: characteristic function grid starts at t = 0");
  } else {
    if (kind_ == GridKind::cf) throw ContractViolation("GridFunction: cf grids are complex");
    if (kind_ == GridKind::density) {
      if ((values_ < 0.0).any()) throw ContractViolation("GridFunction: negative density value");
      const double mass = integral();
      if (std::abs(mass - 1.0) > tol_mass_ + kMassRounding)
        throw ContractViolation("GridFunction: density mass " + std::to_string(mass) +
                                " outside 1 +- tol_mass");
    }
    if (kind_ == GridKind::cdf) {
      for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (values_[i] < 0.0 || values_[i] > 1.0)
          throw ContractViolation("GridFunction: cdf value outside [0, 1]");
        if (i > 0 && values_[i] < values_[i - 1])
          throw ContractViolation("GridFunction: cdf must be nondecreasing");
      }
      if (values_[0] > tol_mass_ + kMassRounding || values_[values_.size() - 1] < 1.0 - tol_mass_ - kMassRounding)
        throw ContractViolation("GridFunction: cdf endpoints inconsistent with tol_mass");
    }
  }
}

/// Moments of a density grid by trapezoid sums.
double grid_mean(const RealGrid& f);
double grid_variance(const RealGrid& f);
double grid_moment(const RealGrid& f, int order);

/// Cumulative trapezoid integral of a density grid, clamped into [0, 1].
RealGrid density_to_cdf(const RealGrid& f);

/// Uniform grid spec used by pipelines.
struct GridSpec {
  double lo;
  double hi;
  Eigen::Index points;

  double spacing() const { return (hi - lo) / static_cast<double>(points - 1); }
  double x(Eigen::Index i) const { return lo + static_cast<double>(i) * spacing(); }
};

inline constexpr GridSpec kDefaultDensityGrid{-3.0, 12.0, 4096};
inline constexpr GridSpec kDefaultCfGrid{0.0, 2000.0, 65536};
inline constexpr GridSpec kDefaultMgfGrid{-4.0, 4.0, 161};

}  // namespace qsl
