#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace wavecrn {

/// Coupling constant of the acoustic kernel V = lambda |p1| |p2| |p3|.
struct KernelParams {
  double lambda_coupling = 1.0;

  void validate() const;
};

/// An integer wavevector. The norm doubles as the acoustic frequency |p|.
class LatticePoint {
 public:
  constexpr LatticePoint() = default;
  LatticePoint(int ix, int iy, int iz);

  int ix() const { return ix_; }
  int iy() const { return iy_; }
  int iz() const { return iz_; }
  std::int64_t norm_sq() const { return norm_sq_; }
  double norm() const { return norm_; }
  bool is_origin() const { return norm_sq_ == 0; }

  LatticePoint operator+(const LatticePoint& o) const;
  LatticePoint operator-(const LatticePoint& o) const;
  LatticePoint scaled(int k) const;

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    return a.ix_ == b.ix_ && a.iy_ == b.iy_ && a.iz_ == b.iz_;
  }
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) {
    if (auto c = a.ix_ <=> b.ix_; c != 0) return c;
    if (auto c = a.iy_ <=> b.iy_; c != 0) return c;
    return a.iz_ <=> b.iz_;
  }

 private:
  int ix_ = 0, iy_ = 0, iz_ = 0;
  std::int64_t norm_sq_ = 0;
  double norm_ = 0.0;
};

/// True when a and b are nonzero, parallel and point the same way. This is
/// the integer form of |a + b| == |a| + |b|.
bool same_side_collinear(const LatticePoint& a, const LatticePoint& b);

enum class Dimension { kOne = 1, kThree = 3 };

/// The truncated lattice {p in Z^3 : 0 < |p| < R} (or its restriction to the
/// x-axis), in lexicographic order on (ix, iy, iz).
class Lattice {
 public:
  Lattice(double radius, Dimension dim, std::vector<LatticePoint> points);

  double radius() const { return radius_; }
  Dimension dimension() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<LatticePoint>& points() const { return points_; }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }

  /// Index of p in the canonical order, or nullopt if p is not a mode.
  std::optional<std::size_t> find(const LatticePoint& p) const;

 private:
  double radius_;
  Dimension dim_;
  std::vector<LatticePoint> points_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Throws ConfigError("empty lattice") when radius <= 1.
Lattice build_lattice(double radius, Dimension dim = Dimension::kThree);

/// A primitive direction and its multiples k * generator, k = 1..mode_count.
struct Ray {
  LatticePoint generator;
  int mode_count = 0;
  /// Lattice index of k * generator at position k - 1.
  std::vector<std::size_t> point_indices;
};

struct RayMembership {
  std::size_t ray = 0;
  int k = 0;
};

struct RayDecomposition {
  /// Ordered lexicographically by generator.
  std::vector<Ray> rays;
  /// membership[i] locates lattice point i on its ray.
  std::vector<RayMembership> membership;
};

RayDecomposition decompose_rays(const Lattice& lattice);

/// p1 = p2 + p3. Indices refer to the state vector the triad was built for:
/// lattice indices for lattice triads, k - 1 for ray-local triads.
struct Triad {
  LatticePoint p1, p2, p3;
  std::size_t i1 = 0, i2 = 0, i3 = 0;
  double defect = 0.0;
  double kernel = 0.0;

  /// Number of ordered pairs (p2, p3) this unordered triad stands for.
  int multiplicity() const { return i2 == i3 ? 1 : 2; }
};

/// lambda * |p1| |p2| |p3|, evaluated as lambda * sqrt(n1 n2 n3) from exact
/// integer squared norms; 0 if any argument is the origin.
double triad_kernel(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3,
                    const KernelParams& params);

/// | |p1| - |p2| - |p3| |, exactly 0 for same-side collinear p2, p3.
double frequency_defect(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3);

/// All within-ray triads k2 + k3 = k1 with k2 <= k3, ordered by ray, then k1, then k2.
std::vector<Triad> enumerate_exact_triads(const Lattice& lattice, const RayDecomposition& rays,
                                          const KernelParams& params = {});
std::vector<Triad> enumerate_exact_triads(const Lattice& lattice, const KernelParams& params = {});

/// Triads of a single ray in ray-local coordinates (indices k - 1), same order
/// as the ray's slice of enumerate_exact_triads.
std::vector<Triad> ray_triads(const Ray& ray, const KernelParams& params = {});

/// Every unordered triad with defect <= lambda (inclusive, 1e-12 slack),
/// ordered by the (ray, k) coordinates of p1, then p2, then p3.
std::vector<Triad> enumerate_near_triads(const Lattice& lattice, double lambda,
                                         const KernelParams& params = {});

struct Thresholds {
  /// Smallest nonzero defect; nullopt for a degenerate lattice with none.
  std::optional<double> lambda_star;
  double lambda_star_upper = 0.0;
  double two_lambda_star_upper = 0.0;
};

/// Exhaustive pair search. Throws DomainError for a degenerate lattice.
double lambda_star(const Lattice& lattice);
std::optional<double> try_lambda_star(const Lattice& lattice);
double lambda_star_upper(const Lattice& lattice);
Thresholds compute_thresholds(const Lattice& lattice);

}  // namespace wavecrn
