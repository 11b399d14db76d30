#include "wavecrn/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavecrn/errors.h"

namespace wavecrn {

double lyapunov_log(std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) {
    if (!(v > 0.0)) throw DomainError("lyapunov_log needs a strictly positive state");
    sum -= std::log(v);
  }
  return sum;
}

double lyapunov_prod(std::span<const double> f) {
  double prod = 1.0;
  for (double v : f) prod *= v;
  return -prod;
}

double lyapunov_derivative(std::span<const double> f, std::span<const double> dfdt) {
  if (f.size() != dfdt.size()) throw ShapeError("state and derivative differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum -= dfdt[i] / f[i];
  return sum;
}

double lyapunov_dissipation(std::span<const double> f, std::span<const Triad> triads) {
  double sum = 0.0;
  for (const auto& t : triads) {
    if (t.i1 >= f.size() || t.i2 >= f.size() || t.i3 >= f.size()) {
      throw ShapeError("triad index outside state");
    }
    const double f1 = f[t.i1], f2 = f[t.i2], f3 = f[t.i3];
    const double gap = 1.0 / f1 - 1.0 / f2 - 1.0 / f3;
    sum -= t.multiplicity() * t.kernel * f1 * f2 * f3 * gap * gap;
  }
  return sum;
}

double conserved_energy_ray(std::span<const double> f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += static_cast<double>(k + 1) * f[k];
  return sum;
}

std::array<double, 3> conserved_momentum(std::span<const double> f, const Lattice& lattice) {
  if (f.size() != lattice.size()) throw ShapeError("state length differs from lattice size");
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    m[0] += lattice[i].ix() * f[i];
    m[1] += lattice[i].iy() * f[i];
    m[2] += lattice[i].iz() * f[i];
  }
  return m;
}

EquilibriumResult equilibrium_ray(std::span<const double> f0) {
  if (f0.empty()) throw ShapeError("empty ray state");
  for (double v : f0) {
    if (!(v > 0.0)) throw DomainError("equilibrium_ray needs a strictly positive state");
  }
  EquilibriumResult out;
  const double count = static_cast<double>(f0.size());
  out.rho = count / conserved_energy_ray(f0);
  out.f_star.resize(f0.size());
  for (std::size_t k = 0; k < f0.size(); ++k) {
    out.f_star[k] = 1.0 / (out.rho * static_cast<double>(k + 1));
  }
  return out;
}

LatticeEquilibrium equilibrium_lattice(std::span<const double> f0, const RayDecomposition& rays) {
  if (f0.size() != rays.membership.size()) throw ShapeError("state length differs from lattice size");
  LatticeEquilibrium out;
  out.f_star.assign(f0.size(), 0.0);
  std::vector<double> local;
  for (const auto& ray : rays.rays) {
    local.clear();
    for (std::size_t idx : ray.point_indices) local.push_back(f0[idx]);
    const auto eq = equilibrium_ray(local);
    out.rho.push_back(eq.rho);
    for (std::size_t k = 0; k < ray.point_indices.size(); ++k) {
      out.f_star[ray.point_indices[k]] = eq.f_star[k];
    }
  }
  return out;
}

Eigen::MatrixXd jacobian_at(std::span<const double> f, std::span<const Triad> triads) {
  const auto n = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : triads) {
    if (t.i1 >= f.size() || t.i2 >= f.size() || t.i3 >= f.size()) {
      throw ShapeError("triad index outside state");
    }
    const double f1 = f[t.i1], f2 = f[t.i2], f3 = f[t.i3];
    const double c = t.multiplicity() * t.kernel;
    const std::array<std::pair<std::size_t, double>, 3> grad{{
        {t.i1, -(f2 + f3)},
        {t.i2, f3 - f1},
        {t.i3, f2 - f1},
    }};
    const std::array<std::pair<std::size_t, double>, 3> rows{{
        {t.i1, 1.0},
        {t.i2, -1.0},
        {t.i3, -1.0},
    }};
    for (const auto& [r, sign] : rows) {
      for (const auto& [col, d] : grad) {
        jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += sign * c * d;
      }
    }
  }
  return jac;
}

Eigen::MatrixXd orthonormal_complement(const std::vector<Eigen::VectorXd>& conserved) {
  if (conserved.empty()) throw DomainError("no conserved directions given");
  const Eigen::Index n = conserved.front().size();
  const auto m = static_cast<Eigen::Index>(conserved.size());
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (conserved[static_cast<std::size_t>(j)].size() != n) {
      throw ShapeError("conserved vectors differ in length");
    }
    c.col(j) = conserved[static_cast<std::size_t>(j)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(c);
  if (rank_check.rank() != m) throw DomainError("conserved directions are linearly dependent");
  if (m >= n) return Eigen::MatrixXd(n, 0);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - m);
}

double restricted_spectral_abscissa(const Eigen::MatrixXd& jacobian, const Eigen::MatrixXd& basis) {
  if (jacobian.rows() != jacobian.cols()) throw ShapeError("Jacobian must be square");
  if (basis.rows() != jacobian.rows()) throw ShapeError("basis does not match Jacobian");
  if (basis.cols() == 0) throw DomainError("no transverse dynamics");
  const Eigen::MatrixXd reduced = basis.transpose() * jacobian * basis;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(reduced, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw DomainError("eigenvalue computation failed");
  return solver.eigenvalues().real().maxCoeff();
}

double projected_spectral_abscissa(const Eigen::MatrixXd& jacobian,
                                   const std::vector<Eigen::VectorXd>& conserved) {
  return restricted_spectral_abscissa(jacobian, orthonormal_complement(conserved));
}

Eigen::VectorXd ray_energy_weights(int mode_count) {
  return Eigen::VectorXd::LinSpaced(mode_count, 1.0, static_cast<double>(mode_count));
}

std::vector<Eigen::VectorXd> lattice_energy_weights(const RayDecomposition& rays,
                                                    std::size_t lattice_size) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& ray : rays.rays) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lattice_size));
    for (std::size_t k = 0; k < ray.point_indices.size(); ++k) {
      w(static_cast<Eigen::Index>(ray.point_indices[k])) = static_cast<double>(k + 1);
    }
    out.push_back(std::move(w));
  }
  return out;
}

RateEstimate fit_decay_rate(std::span<const TrajectorySample> samples,
                            std::span<const double> f_star,
                            std::optional<double> jacobian_abscissa) {
  if (samples.empty()) throw InsufficientDataError("empty trajectory");
  const auto max_error = [&](const std::vector<double>& f) {
    if (f.size() != f_star.size()) throw ShapeError("sample state differs from equilibrium length");
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, std::abs(f[i] - f_star[i]));
    return e;
  };

  const double initial = max_error(samples.front().state);
  if (!(initial > 0.0)) throw InsufficientDataError("trajectory starts at the equilibrium");
  const double final_error = max_error(samples.back().state);
  if (!(final_error < 1e-3 * initial)) {
    throw InsufficientDataError("trajectory has not converged");
  }

  // First passage through the band. The final error sits on the integrator's
  // noise floor; anything within 100x of it is floor, not decay.
  const double lower = std::max(1e-10 * initial, 100.0 * final_error);
  std::vector<double> ts, logs;
  for (const auto& s : samples) {
    const double e = max_error(s.state);
    if (e < lower) break;
    if (e <= 1e-2 * initial) {
      ts.push_back(s.t);
      logs.push_back(std::log(e));
    }
  }
  if (ts.size() < 5) throw InsufficientDataError("decay window has fewer than 5 samples");

  const auto n = static_cast<double>(ts.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_mean += ts[i];
    y_mean += logs[i];
  }
  t_mean /= n;
  y_mean /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxx += (ts[i] - t_mean) * (ts[i] - t_mean);
    sxy += (ts[i] - t_mean) * (logs[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("decay window has zero duration");

  RateEstimate out;
  out.fitted_rate = sxy / sxx;
  const double intercept = y_mean - out.fitted_rate * t_mean;
  out.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (intercept + out.fitted_rate * ts[i]);
    ss += r * r;
  }
  out.fit_residual = std::sqrt(ss / n);
  out.window_start = ts.front();
  out.window_end = ts.back();
  out.window_samples = ts.size();
  out.jacobian_abscissa =
      jacobian_abscissa.value_or(std::numeric_limits<double>::quiet_NaN());
  return out;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kExactEquivalent:
      return "exact_equivalent";
    case Regime::kDivergent:
      return "divergent";
    case Regime::kIndeterminate:
      return "indeterminate";
  }
  return "unknown";
}

RegimeReport classify_regime(double lambda, const Thresholds& thresholds) {
  if (!(lambda >= 0.0)) throw ConfigError("broadening lambda must be nonnegative");
  RegimeReport out;
  out.lambda = lambda;
  out.thresholds = thresholds;
  if (!thresholds.lambda_star) {
    // No non-resonant triple exists, so broadening never adds a triad.
    out.classification = Regime::kExactEquivalent;
    out.note = "lattice has no non-resonant triples; the broadened system equals the exact one";
  } else if (lambda < *thresholds.lambda_star) {
    out.classification = Regime::kExactEquivalent;
    out.note = "lambda below the smallest nonzero frequency defect: broadened and exact systems coincide";
  } else if (lambda >= thresholds.two_lambda_star_upper) {
    out.classification = Regime::kDivergent;
    out.note = "lambda at or above twice the minimal mode norm: trajectories leave every compact set";
  } else {
    out.classification = Regime::kIndeterminate;
    out.note = "lambda_star <= lambda < 2 lambda_star_upper: long-time behaviour is an open question";
  }
  return out;
}

std::optional<DivergenceCertificate> certify_divergence(const Trajectory& trajectory,
                                                        double growth_factor) {
  const auto& samples = trajectory.samples;
  if (samples.empty()) return std::nullopt;
  const auto max_norm = [](const std::vector<double>& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  };
  const auto log_sum = [](const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += std::log(v);
    return s;
  };

  DivergenceCertificate cert;
  cert.growth_factor = growth_factor;
  cert.initial_max_norm = max_norm(samples.front().state);
  cert.reason = trajectory.reason;
  cert.product_monotone = samples.size() > 1;
  double prev = log_sum(samples.front().state);
  bool exited = false;
  for (std::size_t j = 1; j < samples.size(); ++j) {
    const double cur = log_sum(samples[j].state);
    if (!(cur > prev)) cert.product_monotone = false;
    prev = cur;
    const double m = max_norm(samples[j].state);
    if (!exited && m > growth_factor * cert.initial_max_norm) {
      exited = true;
      cert.exit_time = samples[j].t;
      cert.exit_max_norm = m;
    }
  }
  if (!exited) return std::nullopt;
  return cert;
}

double spectrum_slope(std::span<const double> f) {
  if (f.size() < 3) throw InsufficientDataError("spectrum slope needs at least 3 modes");
  const auto n = static_cast<double>(f.size());
  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0)) throw DomainError("spectrum slope needs a strictly positive state");
    x_mean += std::log(static_cast<double>(k + 1));
    y_mean += std::log(f[k]);
  }
  x_mean /= n;
  y_mean /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double dx = std::log(static_cast<double>(k + 1)) - x_mean;
    sxx += dx * dx;
    sxy += dx * (std::log(f[k]) - y_mean);
  }
  return sxy / sxx;
}

}  // namespace wavecrn
