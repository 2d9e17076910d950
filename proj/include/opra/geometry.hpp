#pragma once

// Concrete o-points in the plane: qualification into base relations,
// constructive realization of relation triples, random configurations and
// planar transforms.

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opra/algebra.hpp"
#include "opra/composition.hpp"

namespace opra {

inline constexpr double pi = std::numbers::pi;

// An angle in radians, normalized to ]-pi, pi].
class Angle {
 public:
  Angle() = default;

  static Angle from_radians(double a) {
    if (!std::isfinite(a)) throw error("angle must be finite");
    double r = std::fmod(a, 2 * pi);
    if (r <= -pi)
      r += 2 * pi;
    else if (r > pi)
      r -= 2 * pi;
    return Angle(r);
  }

  double radians() const noexcept { return value_; }

  friend bool operator==(Angle, Angle) = default;

 private:
  explicit Angle(double v) : value_(v) {}
  double value_ = 0.0;
};

inline Angle normalize_angle(double a) { return Angle::from_radians(a); }

struct QualifyOptions {
  double eps_pos = 1e-9;  // plane units
  double eps_ang = 1e-9;  // radians
};

/// Half the angular distance between adjacent rays, pi / 2m. Sector i is
/// centred on i times this step.
inline double sector_step(Granularity g) { return pi / (2.0 * g.m()); }

/// The sector [i]_m containing a. Angles within eps of a ray snap to it.
inline int sector_of(Angle a, Granularity g, double eps = QualifyOptions{}.eps_ang) {
  if (!(eps >= 0.0) || eps >= pi / (8.0 * g.m())) throw error("sector_of: eps must lie in [0, pi/8m)");
  const double step = sector_step(g);
  const double t = a.radians() / step;
  const double ray = 2.0 * std::nearbyint(t / 2.0);
  if (std::abs(a.radians() - ray * step) <= eps) return sector_mod(g, static_cast<long long>(ray));
  return sector_mod(g, 2 * static_cast<long long>(std::floor(t / 2.0)) + 1);
}

class OPoint {
 public:
  OPoint() = default;
  OPoint(double x, double y, double phi) : x_(x), y_(y), phi_(normalize_angle(phi)) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw error("o-point coordinates must be finite");
  }

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  Angle phi() const noexcept { return phi_; }

  friend bool operator==(const OPoint&, const OPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  Angle phi_;
};

/// Direction of b as seen from a's position, atan2 convention.
inline double bearing(const OPoint& a, const OPoint& b) { return std::atan2(b.y() - a.y(), b.x() - a.x()); }

inline BaseRelation qualify(const OPoint& a, const OPoint& b, Granularity g, const QualifyOptions& opt = {}) {
  if (!(opt.eps_pos >= 0.0)) throw error("eps_pos must be >= 0");
  if (std::hypot(b.x() - a.x(), b.y() - a.y()) <= opt.eps_pos)
    return BaseRelation::same_pos(g, sector_of(normalize_angle(b.phi().radians() - a.phi().radians()), g, opt.eps_ang));
  const int i = sector_of(normalize_angle(bearing(a, b) - a.phi().radians()), g, opt.eps_ang);
  const int j = sector_of(normalize_angle(bearing(b, a) - b.phi().radians()), g, opt.eps_ang);
  return BaseRelation::diff_pos(g, i, j);
}

inline bool qualify_converse_check(const OPoint& a, const OPoint& b, Granularity g, const QualifyOptions& opt = {}) {
  return qualify(b, a, g, opt) == converse(qualify(a, b, g, opt));
}

struct Triple {
  OPoint a, b, c;
};

// ---------------------------------------------------------------------------
// Realizer

namespace detail {

inline double sector_center(Granularity g, int i) { return i * sector_step(g); }
inline double sector_half_width(Granularity g, int i) { return (i % 2 != 0) ? sector_step(g) : 0.0; }

// An arc of directions: a single ray (half_width 0) or the open arc
// ]center - half_width, center + half_width[.
struct Arc {
  double center;
  double half_width;
};

// Some direction on both arcs, if one exists.
inline std::optional<double> pick_common(Arc p, Arc q) {
  constexpr double tol = 1e-9;
  const double d = normalize_angle(q.center - p.center).radians();
  if (p.half_width == 0.0 && q.half_width == 0.0) {
    if (std::abs(d) <= tol) return p.center;
    return std::nullopt;
  }
  if (p.half_width == 0.0) {
    if (std::abs(d) < q.half_width - tol) return p.center;
    return std::nullopt;
  }
  if (q.half_width == 0.0) {
    if (std::abs(d) < p.half_width - tol) return q.center;
    return std::nullopt;
  }
  const double lo = std::max(-p.half_width, d - q.half_width);
  const double hi = std::min(p.half_width, d + q.half_width);
  if (hi - lo <= tol) return std::nullopt;
  return p.center + 0.5 * (lo + hi);
}

// Orientations phi with (base - phi) in [i].
inline Arc heading_arc(Granularity g, double base, int i) {
  return {base - sector_center(g, i), sector_half_width(g, i)};
}

// Orientations phi with (phi - base) in [i].
inline Arc offset_arc(Granularity g, double base, int i) {
  return {base + sector_center(g, i), sector_half_width(g, i)};
}

inline double require_pick(std::optional<double> v, const char* what) {
  if (!v) throw std::logic_error(std::string("realizer: no common direction for ") + what);
  return *v;
}

// Positions of a triangle whose signed corner angles
//   phi_AB - phi_AC in [u], phi_BC - phi_BA in [v], phi_CA - phi_CB in [w]
// lie in the given sectors. Requires triangle(u, v, w).
inline std::array<std::pair<double, double>, 3> place_triangle(Granularity g, int u, int v, int w) {
  const int two_m = 2 * g.m();
  const int sgn = sign(g, u);
  if (sgn == 0) {
    // Collinear: exactly one corner carries the angle pi.
    if (u == two_m) return {{{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}}};
    if (v == two_m) return {{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}};
    return {{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}}};
  }
  // Interior angle magnitudes lo + f * (hi - lo) with one common f chosen so
  // they sum to pi. Ray sectors have lo == hi.
  std::array<int, 3> sec = {u, v, w};
  std::array<double, 3> lo{}, width{};
  double lo_sum = 0.0, width_sum = 0.0;
  for (std::size_t q = 0; q < 3; ++q) {
    const double c = std::abs(normalize_angle(sector_center(g, sec[q])).radians());
    const double h = sector_half_width(g, sec[q]);
    lo[q] = c - h;
    width[q] = 2 * h;
    lo_sum += lo[q];
    width_sum += width[q];
  }
  const double f = width_sum > 0.0 ? (pi - lo_sum) / width_sum : 0.0;
  if (width_sum > 0.0 && !(f > 0.0 && f < 1.0)) throw std::logic_error("realizer: triangle angles out of reach");
  std::array<double, 3> ang{};
  for (std::size_t q = 0; q < 3; ++q) ang[q] = lo[q] + f * width[q];
  // Law of sines with |AB| = 1. A positive corner angle at A means C lies
  // clockwise of B, i.e. below the x-axis.
  const double ac = std::sin(ang[1]) / std::sin(ang[2]);
  const double cy = (sgn > 0 ? -1.0 : 1.0) * ac * std::sin(ang[0]);
  return {{{0.0, 0.0}, {1.0, 0.0}, {ac * std::cos(ang[0]), cy}}};
}

}  // namespace detail

/// Concrete o-points A, B, C with A r_ab B, B r_bc C and A r_ac C, or
/// nullopt when opra rejects the triple. Throws std::logic_error if the
/// construction fails to reproduce the input relations.
inline std::optional<Triple> realize_triple(const BaseRelation& r_ab, const BaseRelation& r_bc,
                                            const BaseRelation& r_ac) {
  using detail::heading_arc;
  using detail::offset_arc;
  using detail::pick_common;
  using detail::require_pick;
  using detail::sector_center;

  if (!opra(r_ab, r_bc, r_ac)) return std::nullopt;
  const Granularity g = r_ab.granularity();
  const int i = r_ab.i(), j = r_ab.j();
  const int k = r_bc.i(), l = r_bc.j();
  const int s = r_ac.i(), t = r_ac.j();

  Triple out;
  if (r_ab.is_same_pos() && r_bc.is_same_pos()) {
    const double phi_b = sector_center(g, i);
    const double phi_c = require_pick(pick_common(offset_arc(g, phi_b, k), offset_arc(g, 0.0, s)), "C");
    out = {OPoint(0, 0, 0), OPoint(0, 0, phi_b), OPoint(0, 0, phi_c)};
  } else if (r_ab.is_same_pos()) {
    const double phi_b = sector_center(g, i);
    const double dir = require_pick(pick_common(offset_arc(g, phi_b, k), offset_arc(g, 0.0, s)), "AC");
    const double phi_c = dir + pi - sector_center(g, t);
    out = {OPoint(0, 0, 0), OPoint(0, 0, phi_b), OPoint(std::cos(dir), std::sin(dir), phi_c)};
  } else if (r_bc.is_same_pos()) {
    const double dir = sector_center(g, i);
    const double back = dir + pi;
    const double phi_b = back - sector_center(g, j);
    const double phi_c = require_pick(pick_common(offset_arc(g, phi_b, k), heading_arc(g, back, t)), "C");
    const double bx = std::cos(dir), by = std::sin(dir);
    out = {OPoint(0, 0, 0), OPoint(bx, by, phi_b), OPoint(bx, by, phi_c)};
  } else if (r_ac.is_same_pos()) {
    const double dir = sector_center(g, i);
    const double phi_b = dir + pi - sector_center(g, j);
    const double phi_c = require_pick(pick_common(offset_arc(g, 0.0, s), heading_arc(g, dir, l)), "C");
    out = {OPoint(0, 0, 0), OPoint(std::cos(dir), std::sin(dir), phi_b), OPoint(0, 0, phi_c)};
  } else {
    std::optional<std::array<int, 3>> corner;
    detail::for_each_corner_triple(g, i, j, k, l, s, t, OpraMode::optimized, [&](int u, int v, int w) {
      corner = std::array<int, 3>{u, v, w};
      return true;
    });
    if (!corner) throw std::logic_error("realizer: no corner sectors for an accepted triple");
    const auto pos = detail::place_triangle(g, (*corner)[0], (*corner)[1], (*corner)[2]);
    const OPoint pa(pos[0].first, pos[0].second, 0), pb(pos[1].first, pos[1].second, 0),
        pc(pos[2].first, pos[2].second, 0);
    const double phi_a = require_pick(pick_common(heading_arc(g, bearing(pa, pb), i), heading_arc(g, bearing(pa, pc), s)), "A");
    const double phi_b = require_pick(pick_common(heading_arc(g, bearing(pb, pa), j), heading_arc(g, bearing(pb, pc), k)), "B");
    const double phi_c = require_pick(pick_common(heading_arc(g, bearing(pc, pb), l), heading_arc(g, bearing(pc, pa), t)), "C");
    out = {OPoint(pa.x(), pa.y(), phi_a), OPoint(pb.x(), pb.y(), phi_b), OPoint(pc.x(), pc.y(), phi_c)};
  }

  if (qualify(out.a, out.b, g) != r_ab || qualify(out.b, out.c, g) != r_bc || qualify(out.a, out.c, g) != r_ac)
    throw std::logic_error("realizer: construction does not reproduce " + format_relation(r_ab) + ", " +
                           format_relation(r_bc) + ", " + format_relation(r_ac));
  return out;
}

// ---------------------------------------------------------------------------
// Random configurations

// Deterministic stream of o-point triples mixing three regimes:
//   uniform   positions in [-10, 10]^2, orientations in ]-pi, pi]
//   boundary  directions and orientations on multiples of pi/2m, so rays
//             (even sectors) occur
//   same      two or three coincident positions, exact or perturbed
//             orientation offsets
class ConfigurationSampler {
 public:
  enum class Regime { uniform, boundary, same };

  ConfigurationSampler(Granularity g, std::uint64_t seed) : g_(g), rng_(seed) {}

  Triple next() { return next(static_cast<Regime>(below(3))); }

  Triple next(Regime regime) {
    switch (regime) {
      case Regime::uniform:
        return {random_opoint(), random_opoint(), random_opoint()};
      case Regime::boundary: {
        const double ax = below(11) - 5.0, ay = below(11) - 5.0;
        const OPoint a(ax, ay, step_angle());
        const double d1 = step_angle(), r1 = 0.5 + 2.5 * unit();
        const OPoint b(ax + r1 * std::cos(d1), ay + r1 * std::sin(d1), step_angle());
        // C hangs off A or B along another multiple of pi/2m.
        const OPoint& anchor = below(2) == 0 ? a : b;
        const double d2 = step_angle(), r2 = 0.5 + 2.5 * unit();
        const OPoint c(anchor.x() + r2 * std::cos(d2), anchor.y() + r2 * std::sin(d2), step_angle());
        return {a, b, c};
      }
      case Regime::same: {
        const OPoint a = random_opoint();
        const OPoint b(a.x(), a.y(), a.phi().radians() + offset());
        const OPoint far = random_opoint();
        switch (below(4)) {
          case 0: return {a, b, OPoint(a.x(), a.y(), a.phi().radians() + offset())};
          case 1: return {a, b, far};
          case 2: return {a, far, OPoint(far.x(), far.y(), far.phi().radians() + offset())};
          default: return {a, far, OPoint(a.x(), a.y(), a.phi().radians() + offset())};
        }
      }
    }
    return {};
  }

 private:
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(unit() * n); }
  double step_angle() { return below(g_.sectors()) * sector_step(g_); }
  // A multiple of pi/2m, perturbed half the time by less than a sector.
  double offset() {
    double o = step_angle();
    if (below(2) == 0) o += (unit() - 0.5) * 0.8 * sector_step(g_);
    return o;
  }
  OPoint random_opoint() { return OPoint(-10.0 + 20.0 * unit(), -10.0 + 20.0 * unit(), pi - 2 * pi * unit()); }

  Granularity g_;
  std::mt19937_64 rng_;
};

inline std::vector<Triple> sample_configurations(Granularity g, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw error("sample count must be >= 1");
  ConfigurationSampler sampler(g, seed);
  std::vector<Triple> out;
  out.reserve(n);
  for (std::size_t q = 0; q < n; ++q) out.push_back(sampler.next());
  return out;
}

// ---------------------------------------------------------------------------
// Transforms

/// x' = a x + b y + tx,  y' = c x + d y + ty
struct Affine2 {
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  static Affine2 identity() { return {}; }
  static Affine2 rotation(double theta) {
    return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta), 0, 0};
  }
  static Affine2 scaling(double s) { return {s, 0, 0, s, 0, 0}; }
  static Affine2 translation(double x, double y) { return {1, 0, 0, 1, x, y}; }
  static Affine2 shear_x(double k) { return {1, k, 0, 1, 0, 0}; }

  double determinant() const noexcept { return a * d - b * c; }

  /// (*this) after other.
  Affine2 after(const Affine2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d,
            a * o.tx + b * o.ty + tx, c * o.tx + d * o.ty + ty};
  }
};

/// Maps the position through T and the heading to the image of its unit
/// direction vector.
inline OPoint transform(const OPoint& p, const Affine2& t) {
  if (!(std::abs(t.determinant()) > 1e-12)) throw error("transform: degenerate affine map");
  const double x = t.a * p.x() + t.b * p.y() + t.tx;
  const double y = t.c * p.x() + t.d * p.y() + t.ty;
  const double ux = std::cos(p.phi().radians()), uy = std::sin(p.phi().radians());
  return OPoint(x, y, std::atan2(t.c * ux + t.d * uy, t.a * ux + t.b * uy));
}

// ---------------------------------------------------------------------------
// Scene files:  opoint <name> <x> <y> <phi_radians>   ('#' starts a comment)

struct NamedOPoint {
  std::string name;
  OPoint point;
};

using Scene = std::vector<NamedOPoint>;

inline Scene parse_scene(std::istream& in) {
  Scene scene;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    auto fail = [&](const std::string& what) {
      throw parse_error("scene line " + std::to_string(line_no) + ": " + what);
    };
    if (keyword != "opoint") fail("unknown keyword '" + keyword + "'");
    std::string name;
    double x = 0, y = 0, phi = 0;
    if (!(ls >> name >> x >> y >> phi)) fail("expected 'opoint <name> <x> <y> <phi>'");
    if (std::string extra; ls >> extra) fail("trailing token '" + extra + "'");
    for (const auto& p : scene)
      if (p.name == name) fail("duplicate o-point '" + name + "'");
    try {
      scene.push_back({name, OPoint(x, y, phi)});
    } catch (const error& e) {
      fail(e.what());
    }
  }
  return scene;
}

inline Scene parse_scene(const std::string& text) {
  std::istringstream is(text);
  return parse_scene(is);
}

}  // namespace opra
