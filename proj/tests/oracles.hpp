#pragma once

// Test-only ground truth built directly from the interval definition of
// the sectors: [i] is the ray 2*pi*i/4m for even i and the open cone
// ]2*pi*(i-1)/4m, 2*pi*(i+1)/4m[ for odd i. Nothing here calls into the
// composition or geometry code under test.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;
inline constexpr double tol = 1e-9;

inline int mod(int a, int n) { return ((a % n) + n) % n; }

// Signed distance from a to b on the circle, in ]-pi, pi].
inline double circ_diff(double a, double b) {
  double d = std::remainder(b - a, 2 * pi);
  return d <= -pi ? d + 2 * pi : d;
}

inline double ray_angle(int m, int i) { return 2 * pi * i / (4.0 * m); }

inline bool in_sector(double angle, int m, int i) {
  i = mod(i, 4 * m);
  const double c = ray_angle(m, i);
  const double d = std::abs(circ_diff(c, angle));
  if (i % 2 == 0) return d <= tol;
  return d < 2 * pi / (4.0 * m) - tol;
}

// Representatives of [i]: the ray itself, or n evenly spaced interior
// points of the cone, expressed in ]-pi, pi].
inline std::vector<double> sector_samples(int m, int i, int n) {
  i = mod(i, 4 * m);
  auto wrap = [](double a) {
    double r = std::remainder(a, 2 * pi);
    return r <= -pi ? r + 2 * pi : r;
  };
  if (i % 2 == 0) return {wrap(ray_angle(m, i))};
  const double lo = ray_angle(m, i - 1), width = 2 * ray_angle(m, 1);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) out.push_back(wrap(lo + width * (q + 0.5) / n));
  return out;
}

/// Do alpha in [i], beta in [j], gamma in [k] with alpha+beta+gamma = 0
/// (mod 2 pi) exist? gamma is solved for, the other two are sampled.
inline bool turn(int m, int i, int j, int k) {
  const int n = 64 * m;
  for (double a : sector_samples(m, i, n))
    for (double b : sector_samples(m, j, n))
      if (in_sector(-a - b, m, k)) return true;
  return false;
}

/// Is there a triangle (possibly three distinct points on a line) with
/// signed corner angles in [i], [j], [k]? Proper triangles have three
/// angles of one sign summing to +-pi; collinear ones have angles 0, 0, pi.
inline bool triangle(int m, int i, int j, int k) {
  const int n = 64 * m;
  for (double a : sector_samples(m, i, n))
    for (double b : sector_samples(m, j, n)) {
      for (double sgn : {1.0, -1.0}) {
        const double c = sgn * pi - a - b;
        if (sgn * a > tol && sgn * b > tol && sgn * c > tol && in_sector(c, m, k)) return true;
      }
      const bool a_flat = std::abs(a) <= tol || std::abs(std::abs(a) - pi) <= tol;
      const bool b_flat = std::abs(b) <= tol || std::abs(std::abs(b) - pi) <= tol;
      const int pis = (std::abs(a) > tol) + (std::abs(b) > tol);
      if (a_flat && b_flat && pis < 2) {
        const double c = pis == 0 ? pi : 0.0;
        if (in_sector(c, m, k)) return true;
      }
    }
  return false;
}

}  // namespace oracle
