#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>

#include "qslimit/grid_function.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/start_law.hpp"

namespace qsl {

/// Density of g(U) for U uniform, i.e. of Z_1 when Z_0 = 0. The density is
/// 2 / |g'(u(x))| on (-eta, 1) with an inverse square-root singularity at
/// -eta; grid values are exact hat-function averages, so no mass is lost at
/// the singular cell.
RealGrid density_of_gU(const GridSpec& spec = kDefaultDensityGrid);

/// Diagnostics of one density step.
struct DensityStepReport {
  double mass = 0.0;
  double clipped_mass = 0.0;
  double dropped_mass = 0.0;
  double interpolation_error = 0.0;
};

/// Relative threshold below which input density values are treated as zero.
inline constexpr double kSupportThreshold = 1e-18;
/// Floor on the quadrature tolerance used in the truncation check.
inline constexpr double kDensityQuadratureTol = 1e-6;

/// One application of the operator to a density grid:
/// f+(x) = 2 int_{1/2}^1 (1/u) int f(z) f((x - g(u) - (1-u) z)/u) dz du.
/// Output values are clipped at zero without renormalization; the mass defect,
/// clipped mass and dropped support mass are recorded in tol_mass. Throws
/// TruncationError if the mass deficit exceeds 10 (tol_mass + quadrature tol).
RealGrid apply_S_density(const RealGrid& f, DensityStepReport* report = nullptr);

/// Samples of the characteristic function of a start law on [0, hi].
ComplexGrid cf_of(const StartLaw& law, const GridSpec& spec = kDefaultCfGrid);

/// Absolute quadrature tolerance per t-point; raised to the cubic
/// interpolation error estimate of the input when that is larger.
inline constexpr double kCfQuadratureTol = 1e-10;
/// Where sup_{s >= t/2} |phi(s)| is below this, phi+(t) is set to 0 and the
/// bound is charged to the error.
inline constexpr double kCfSkipBound = 1e-10;

/// phi+(t) = int_0^1 phi(ut) phi((1-u)t) e^{i t g(u)} du on the grid points
/// t <= t_max. tol_mass of the result accumulates 2 eps_in + quadrature error
/// + interpolation error. Throws DomainError if t_max exceeds the input domain.
ComplexGrid apply_S_cf(const ComplexGrid& phi, double t_max);
inline ComplexGrid apply_S_cf(const ComplexGrid& phi) { return apply_S_cf(phi, phi.hi()); }

struct InversionReport {
  double truncation_remainder = 0.0;
  double cf_error_contribution = 0.0;
  double clipped_mass = 0.0;
};

/// f(x) = (1/pi) Re int_0^T e^{-itx} phi(t) dt on the x-grid, with the tail
/// beyond T bounded by cp T^{1-p} / (pi (p-1)) using |phi(t)| <= cp t^-p.
/// The bound is checked at every stored t > 0; a violation raises
/// PreconditionError naming t. slack of the result = remainder + error terms.
RealGrid invert_cf(const ComplexGrid& phi, const GridSpec& xgrid, double p, double cp,
                   InversionReport* report = nullptr);

/// Samples of the moment generating function of a start law on a lambda-grid
/// (a generic grid; slack carries the error estimate).
RealGrid mgf_of(const StartLaw& law, const GridSpec& spec = kDefaultMgfGrid);

inline constexpr double kMgfRelTol = 1e-13;

/// psi+(lambda) = int_0^1 psi(u lambda) psi((1-u) lambda) e^{lambda g(u)} du
/// on the grid points with |lambda| <= L.
RealGrid apply_S_mgf(const RealGrid& psi, double L);

enum class Representation { density, cf, mgf, moments };

std::string to_string(Representation r);
Representation representation_from_string(std::string_view name);

struct IterationOptions {
  GridSpec density_grid = kDefaultDensityGrid;
  GridSpec cf_grid = kDefaultCfGrid;
  GridSpec mgf_grid = kDefaultMgfGrid;
  int moment_order = kDefaultMomentOrder;
};

/// The requested representations of F_n = S^n F_0.
struct IterationState {
  int n = 0;
  StartLaw start;
  std::optional<RealGrid> density;
  std::optional<ComplexGrid> cf;
  std::optional<RealGrid> mgf;
  std::optional<MomentVector> moments;
};

using StepObserver = std::function<void(const IterationState&)>;

/// Runs n steps in every requested representation. A density for the point
/// mass at 0 starts at n = 1 from density_of_gU; requesting it at n = 0 raises
/// UnsupportedRepresentation. The observer, if given, sees every intermediate
/// state k = 0..n.
IterationState iterate(const StartLaw& start, int n, const std::set<Representation>& reprs,
                       const IterationOptions& options = {}, const StepObserver& observer = {});

}  // namespace qsl
