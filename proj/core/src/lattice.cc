#include "wavecrn/lattice.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "wavecrn/errors.h"

namespace wavecrn {
namespace {

constexpr double kDefectSlack = 1e-12;

std::uint64_t pack(const LatticePoint& p) {
  constexpr std::int64_t kOffset = 1 << 20;
  const auto enc = [](int v) { return static_cast<std::uint64_t>(v + kOffset) & 0x1FFFFF; };
  return (enc(p.ix()) << 42) | (enc(p.iy()) << 21) | enc(p.iz());
}

int gcd3(int a, int b, int c) {
  return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
}

}  // namespace

void KernelParams::validate() const {
  if (!(lambda_coupling > 0.0) || !std::isfinite(lambda_coupling)) {
    throw ConfigError("lambda_coupling must be a positive finite number");
  }
}

LatticePoint::LatticePoint(int ix, int iy, int iz)
    : ix_(ix),
      iy_(iy),
      iz_(iz),
      norm_sq_(std::int64_t{ix} * ix + std::int64_t{iy} * iy + std::int64_t{iz} * iz),
      norm_(std::sqrt(static_cast<double>(norm_sq_))) {}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
  return {ix_ + o.ix_, iy_ + o.iy_, iz_ + o.iz_};
}

LatticePoint LatticePoint::operator-(const LatticePoint& o) const {
  return {ix_ - o.ix_, iy_ - o.iy_, iz_ - o.iz_};
}

LatticePoint LatticePoint::scaled(int k) const { return {k * ix_, k * iy_, k * iz_}; }

bool same_side_collinear(const LatticePoint& a, const LatticePoint& b) {
  if (a.is_origin() || b.is_origin()) return false;
  const std::int64_t cx = std::int64_t{a.iy()} * b.iz() - std::int64_t{a.iz()} * b.iy();
  const std::int64_t cy = std::int64_t{a.iz()} * b.ix() - std::int64_t{a.ix()} * b.iz();
  const std::int64_t cz = std::int64_t{a.ix()} * b.iy() - std::int64_t{a.iy()} * b.ix();
  const std::int64_t dot = std::int64_t{a.ix()} * b.ix() + std::int64_t{a.iy()} * b.iy() +
                           std::int64_t{a.iz()} * b.iz();
  return cx == 0 && cy == 0 && cz == 0 && dot > 0;
}

Lattice::Lattice(double radius, Dimension dim, std::vector<LatticePoint> points)
    : radius_(radius), dim_(dim), points_(std::move(points)) {
  index_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) index_.emplace(pack(points_[i]), i);
}

std::optional<std::size_t> Lattice::find(const LatticePoint& p) const {
  if (p.is_origin() || !(p.norm() < radius_)) return std::nullopt;
  const auto it = index_.find(pack(p));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Lattice build_lattice(double radius, Dimension dim) {
  if (!std::isfinite(radius)) throw ConfigError("lattice radius must be finite");
  if (radius <= 1.0) throw ConfigError("empty lattice");
  if (radius > 1000.0) throw ConfigError("lattice radius too large (max 1000)");

  const int bound = static_cast<int>(std::ceil(radius));
  std::vector<LatticePoint> points;
  const auto keep = [&](int x, int y, int z) {
    LatticePoint p(x, y, z);
    if (!p.is_origin() && p.norm() < radius) points.push_back(p);
  };
  if (dim == Dimension::kOne) {
    for (int x = -bound; x <= bound; ++x) keep(x, 0, 0);
  } else {
    for (int x = -bound; x <= bound; ++x)
      for (int y = -bound; y <= bound; ++y)
        for (int z = -bound; z <= bound; ++z) keep(x, y, z);
  }
  // Loop nesting already yields lexicographic order.
  return Lattice(radius, dim, std::move(points));
}

RayDecomposition decompose_rays(const Lattice& lattice) {
  if (lattice.size() == 0) throw ConfigError("empty lattice");

  std::map<LatticePoint, std::vector<std::pair<int, std::size_t>>> by_generator;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& p = lattice[i];
    const int g = gcd3(p.ix(), p.iy(), p.iz());
    by_generator[LatticePoint(p.ix() / g, p.iy() / g, p.iz() / g)].emplace_back(g, i);
  }

  RayDecomposition out;
  out.membership.resize(lattice.size());
  out.rays.reserve(by_generator.size());
  for (auto& [generator, members] : by_generator) {
    std::sort(members.begin(), members.end());
    Ray ray;
    ray.generator = generator;
    ray.mode_count = static_cast<int>(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
      // The lattice is a ball, so the multiples on a ray are contiguous from 1.
      if (members[j].first != static_cast<int>(j) + 1) {
        throw DomainError("lattice is not star-shaped along a ray");
      }
      ray.point_indices.push_back(members[j].second);
      out.membership[members[j].second] = {out.rays.size(), members[j].first};
    }
    out.rays.push_back(std::move(ray));
  }
  return out;
}

double triad_kernel(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3,
                    const KernelParams& params) {
  if (p1.is_origin() || p2.is_origin() || p3.is_origin()) return 0.0;
  const auto product = static_cast<std::uint64_t>(p1.norm_sq()) *
                       static_cast<std::uint64_t>(p2.norm_sq()) *
                       static_cast<std::uint64_t>(p3.norm_sq());
  return params.lambda_coupling * std::sqrt(static_cast<double>(product));
}

double frequency_defect(const LatticePoint& p1, const LatticePoint& p2, const LatticePoint& p3) {
  if (same_side_collinear(p2, p3)) return 0.0;
  return std::abs(p1.norm() - p2.norm() - p3.norm());
}

std::vector<Triad> ray_triads(const Ray& ray, const KernelParams& params) {
  std::vector<Triad> out;
  const int count = ray.mode_count;
  for (int k1 = 2; k1 <= count; ++k1) {
    for (int k2 = 1; 2 * k2 <= k1; ++k2) {
      const int k3 = k1 - k2;
      Triad t;
      t.p1 = ray.generator.scaled(k1);
      t.p2 = ray.generator.scaled(k2);
      t.p3 = ray.generator.scaled(k3);
      t.i1 = static_cast<std::size_t>(k1 - 1);
      t.i2 = static_cast<std::size_t>(k2 - 1);
      t.i3 = static_cast<std::size_t>(k3 - 1);
      t.defect = 0.0;
      t.kernel = triad_kernel(t.p1, t.p2, t.p3, params);
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Triad> enumerate_exact_triads(const Lattice& lattice, const RayDecomposition& rays,
                                          const KernelParams& params) {
  params.validate();
  std::vector<Triad> out;
  for (const auto& ray : rays.rays) {
    for (Triad t : ray_triads(ray, params)) {
      t.i1 = ray.point_indices[t.i1];
      t.i2 = ray.point_indices[t.i2];
      t.i3 = ray.point_indices[t.i3];
      out.push_back(t);
    }
  }
  (void)lattice;
  return out;
}

std::vector<Triad> enumerate_exact_triads(const Lattice& lattice, const KernelParams& params) {
  return enumerate_exact_triads(lattice, decompose_rays(lattice), params);
}

std::vector<Triad> enumerate_near_triads(const Lattice& lattice, double lambda,
                                         const KernelParams& params) {
  if (!(lambda >= 0.0)) throw ConfigError("broadening lambda must be nonnegative");
  params.validate();
  const RayDecomposition rays = decompose_rays(lattice);
  const auto key = [&](std::size_t i) {
    return std::pair{rays.membership[i].ray, rays.membership[i].k};
  };

  std::vector<Triad> out;
  const std::size_t n = lattice.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto sum = lattice.find(lattice[a] + lattice[b]);
      if (!sum) continue;
      std::size_t i2 = a, i3 = b;
      if (key(i3) < key(i2)) std::swap(i2, i3);
      Triad t;
      t.i1 = *sum;
      t.i2 = i2;
      t.i3 = i3;
      t.p1 = lattice[t.i1];
      t.p2 = lattice[i2];
      t.p3 = lattice[i3];
      t.defect = frequency_defect(t.p1, t.p2, t.p3);
      if (t.defect != 0.0 && t.defect > lambda + kDefectSlack) continue;
      t.kernel = triad_kernel(t.p1, t.p2, t.p3, params);
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(), [&](const Triad& x, const Triad& y) {
    return std::tuple{key(x.i1), key(x.i2), key(x.i3)} <
           std::tuple{key(y.i1), key(y.i2), key(y.i3)};
  });
  return out;
}

std::optional<double> try_lambda_star(const Lattice& lattice) {
  std::optional<double> best;
  const std::size_t n = lattice.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto sum = lattice.find(lattice[a] + lattice[b]);
      if (!sum) continue;
      const double d = frequency_defect(lattice[*sum], lattice[a], lattice[b]);
      if (d == 0.0) continue;
      if (!best || d < *best) best = d;
    }
  }
  return best;
}

double lambda_star(const Lattice& lattice) {
  const auto value = try_lambda_star(lattice);
  if (!value) throw DomainError("undefined (degenerate lattice)");
  return *value;
}

double lambda_star_upper(const Lattice& lattice) {
  if (lattice.size() == 0) throw ConfigError("empty lattice");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : lattice.points()) best = std::min(best, p.norm());
  return best;
}

Thresholds compute_thresholds(const Lattice& lattice) {
  Thresholds t;
  t.lambda_star = try_lambda_star(lattice);
  t.lambda_star_upper = lambda_star_upper(lattice);
  t.two_lambda_star_upper = 2.0 * t.lambda_star_upper;
  return t;
}

}  // namespace wavecrn
