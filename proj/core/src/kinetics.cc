#include "wavecrn/kinetics.h"

#include <algorithm>
#include <string>

#include "wavecrn/errors.h"

namespace wavecrn {
namespace {

void check_indices(std::size_t size, std::span<const Triad> triads) {
  for (const auto& t : triads) {
    if (t.i1 >= size || t.i2 >= size || t.i3 >= size) {
      throw ShapeError("triad references mode " +
                       std::to_string(std::max({t.i1, t.i2, t.i3})) + " but state has " +
                       std::to_string(size) + " entries");
    }
  }
}

}  // namespace

double kernel(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3,
              const KernelParams& params) {
  return triad_kernel(p1, p2, p3, params);
}

void accumulate_collisions(std::span<const double> f, std::span<const Triad> triads,
                           std::span<double> dfdt) {
  if (dfdt.size() != f.size()) throw ShapeError("derivative buffer size differs from state");
  check_indices(f.size(), triads);
  for (const auto& t : triads) {
    const double f1 = f[t.i1], f2 = f[t.i2], f3 = f[t.i3];
    const double flux = t.multiplicity() * t.kernel * (f2 * f3 - f1 * (f2 + f3));
    dfdt[t.i1] += flux;
    dfdt[t.i2] -= flux;
    dfdt[t.i3] -= flux;
  }
}

std::vector<double> rhs_exact_ray(std::span<const double> f, const Ray& ray,
                                  const KernelParams& params) {
  if (f.size() != static_cast<std::size_t>(ray.mode_count)) {
    throw ShapeError("ray state has " + std::to_string(f.size()) + " entries, ray has " +
                     std::to_string(ray.mode_count) + " modes");
  }
  const auto triads = ray_triads(ray, params);
  std::vector<double> out(f.size(), 0.0);
  accumulate_collisions(f, triads, out);
  return out;
}

std::vector<double> rhs_exact_full(std::span<const double> f, std::span<const Triad> triads) {
  for (const auto& t : triads) {
    if (t.defect != 0.0) throw std::invalid_argument("exact system given a non-resonant triad");
  }
  std::vector<double> out(f.size(), 0.0);
  accumulate_collisions(f, triads, out);
  return out;
}

std::vector<double> rhs_near(std::span<const double> f, std::span<const Triad> triads) {
  std::vector<double> out(f.size(), 0.0);
  accumulate_collisions(f, triads, out);
  return out;
}

}  // namespace wavecrn
