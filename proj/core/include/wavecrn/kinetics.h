#pragma once

#include <span>
#include <vector>

#include "wavecrn/lattice.h"

namespace wavecrn {

/// lambda |p1| |p2| |p3|; symmetric in its arguments, 0 if any is the origin.
double kernel(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3,
              const KernelParams& params = {});

/// Accumulates the three-wave collision term of every triad into dfdt.
///
/// Each unordered triad contributes the flux
///   m * V * [f2 f3 - f1 (f2 + f3)]
/// with m its ordered-pair multiplicity, added to mode p1 and subtracted
/// from p2 and from p3. Summed over triads this reproduces both the gain sum
/// and the factor-2 loss sum of the discrete kinetic equation. Accumulation
/// follows the triad order, so results are bit-reproducible.
void accumulate_collisions(std::span<const double> f, std::span<const Triad> triads,
                           std::span<double> dfdt);

/// Exact-resonance system on one ray, indexed by k = 1..I.
std::vector<double> rhs_exact_ray(std::span<const double> f, const Ray& ray,
                                  const KernelParams& params = {});

/// Exact-resonance system on the whole lattice. Every triad must have zero defect.
std::vector<double> rhs_exact_full(std::span<const double> f, std::span<const Triad> triads);

/// Broadened system, driven by a near-triad list for the chosen lambda.
std::vector<double> rhs_near(std::span<const double> f, std::span<const Triad> triads);

}  // namespace wavecrn
