#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavecrn/integrator.h"
#include "wavecrn/lattice.h"

namespace wavecrn {

// ---------------------------------------------------------------------------
// Lyapunov functionals and conserved quantities
// ---------------------------------------------------------------------------

/// -sum log f_i. Throws DomainError on a non-positive entry.
double lyapunov_log(std::span<const double> f);

/// -prod f_i.
double lyapunov_prod(std::span<const double> f);

/// grad(L) . dfdt for L = -sum log f, i.e. -sum dfdt_i / f_i.
double lyapunov_derivative(std::span<const double> f, std::span<const double> dfdt);

/// The same quantity written as a sum of squares over triads:
///   -sum m V f1 f2 f3 (1/f1 - 1/f2 - 1/f3)^2.
double lyapunov_dissipation(std::span<const double> f, std::span<const Triad> triads);

/// sum_k k f_k over a ray state.
double conserved_energy_ray(std::span<const double> f);

/// sum_p p f_p componentwise over a lattice state.
std::array<double, 3> conserved_momentum(std::span<const double> f, const Lattice& lattice);

// ---------------------------------------------------------------------------
// Equilibria
// ---------------------------------------------------------------------------

struct EquilibriumResult {
  double rho = 0.0;
  std::vector<double> f_star;
};

/// rho = I / sum k f0_k and f*_k = 1 / (rho k): the unique positive
/// equilibrium on the energy level set of f0.
EquilibriumResult equilibrium_ray(std::span<const double> f0);

struct LatticeEquilibrium {
  /// One rho per ray, in decomposition order.
  std::vector<double> rho;
  std::vector<double> f_star;
};

/// Ray-by-ray equilibrium of the exact system on a full lattice state.
LatticeEquilibrium equilibrium_lattice(std::span<const double> f0, const RayDecomposition& rays);

// ---------------------------------------------------------------------------
// Linearization
// ---------------------------------------------------------------------------

/// Analytic Jacobian of the collision term defined by a triad list.
Eigen::MatrixXd jacobian_at(std::span<const double> f, std::span<const Triad> triads);

/// Orthonormal basis (columns) of the complement of span(conserved).
/// Throws DomainError if the vectors are dependent.
Eigen::MatrixXd orthonormal_complement(const std::vector<Eigen::VectorXd>& conserved);

/// Largest real part of the eigenvalues of basis^T J basis.
double restricted_spectral_abscissa(const Eigen::MatrixXd& jacobian, const Eigen::MatrixXd& basis);

/// Spectral abscissa of J on the subspace orthogonal to the conserved
/// directions. Throws DomainError("no transverse dynamics") if that subspace
/// is trivial.
double projected_spectral_abscissa(const Eigen::MatrixXd& jacobian,
                                   const std::vector<Eigen::VectorXd>& conserved);

/// Energy weights (1, 2, ..., I) of a ray.
Eigen::VectorXd ray_energy_weights(int mode_count);

/// One energy-weight vector per ray (a unit vector for rays with I = 1), embedded in
/// lattice coordinates.
std::vector<Eigen::VectorXd> lattice_energy_weights(const RayDecomposition& rays,
                                                    std::size_t lattice_size);

// ---------------------------------------------------------------------------
// Convergence rates, regimes, divergence
// ---------------------------------------------------------------------------

struct RateEstimate {
  /// Slope of log max_i |f_i - f*_i| against t (negative when converging).
  double fitted_rate = 0.0;
  /// exp(intercept).
  double prefactor = 0.0;
  /// NaN unless supplied by the caller.
  double jacobian_abscissa = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t window_samples = 0;
  /// RMS residual of the log-linear fit.
  double fit_residual = 0.0;
};

/// Least-squares fit of the late decay window, where the max-norm error lies
/// in [1e-10, 1e-2] times its initial value, stopping early once the error
/// is within 100x of the final (noise-floor) error. Throws InsufficientDataError
/// when the run does not converge or the window has fewer than 5 samples.
RateEstimate fit_decay_rate(std::span<const TrajectorySample> samples,
                            std::span<const double> f_star,
                            std::optional<double> jacobian_abscissa = std::nullopt);

enum class Regime { kExactEquivalent, kDivergent, kIndeterminate };

std::string_view to_string(Regime regime);

struct RegimeReport {
  double lambda = 0.0;
  Thresholds thresholds;
  Regime classification = Regime::kIndeterminate;
  std::string note;
};

/// exact_equivalent if lambda < lambda_star, divergent if lambda >= 2
/// lambda_star_upper, indeterminate in between.
RegimeReport classify_regime(double lambda, const Thresholds& thresholds);

struct DivergenceCertificate {
  /// sum log f (equivalently prod f) strictly increased between every pair of samples.
  bool product_monotone = false;
  double initial_max_norm = 0.0;
  double growth_factor = 1e3;
  /// First sample time at which the max-norm exceeded growth_factor * initial.
  double exit_time = 0.0;
  double exit_max_norm = 0.0;
  Termination reason = Termination::kReachedTEnd;
};

std::optional<DivergenceCertificate> certify_divergence(const Trajectory& trajectory,
                                                        double growth_factor = 1e3);

/// Least-squares slope of log f_k against log k, k = 1..I. Needs I >= 3.
double spectrum_slope(std::span<const double> f);

}  // namespace wavecrn
