#pragma once

// Composition of OPRA_m relations by the turn/triangle rules, and
// composition tables.

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opra/algebra.hpp"

namespace opra {

enum class OpraMode {
  optimized,  // u, v, w drawn from three-element candidate sets
  naive,      // u, v, w range over all of [0, 4m)
};

/// True iff angles in [i], [j], [k] exist that add up to a complete turn.
/// Arguments are arbitrary integers, reduced modulo 4m; the tolerance of
/// one sector only applies when both i and j are odd.
inline bool turn(Granularity g, long long i, long long j, long long k) {
  const int two_m = 2 * g.m();
  const int centered = sector_mod(g, static_cast<long long>(sector_mod(g, i)) + sector_mod(g, j) +
                                         sector_mod(g, k) + two_m) -
                       two_m;
#ifdef OPRA_INJECT_TURN_FAULT
  const int tolerance = 0;
#else
  const int tolerance = (sector_mod(g, i) % 2) * (sector_mod(g, j) % 2);
#endif
  return std::abs(centered) <= tolerance;
}

/// 0 on the rays 0 and pi, +1 on the left half, -1 on the right half.
inline int sign(Granularity g, long long i) {
  const int r = sector_mod(g, i);
  const int two_m = 2 * g.m();
  if (r == 0 || r == two_m) return 0;
  return r < two_m ? 1 : -1;
}

/// True iff a (possibly degenerate) triangle with angles in [i], [j], [k]
/// exists. Three points on a line count; three angles of pi do not.
inline bool triangle(Granularity g, long long i, long long j, long long k) {
  const int two_m = 2 * g.m();
  const int ri = sector_mod(g, i), rj = sector_mod(g, j), rk = sector_mod(g, k);
  if (ri == two_m && rj == two_m && rk == two_m) return false;
  const int s = sign(g, ri);
  if (sign(g, rj) != s || sign(g, rk) != s) return false;
  return turn(g, ri, rj, static_cast<long long>(rk) - two_m);
}

namespace detail {

// Triangle-angle sectors (u, v, w) at the corners A, B, C compatible with
// A DiffPos(i,j) B, B DiffPos(k,l) C, A DiffPos(s,t) C.
template <class F>
void for_each_corner_triple(Granularity g, int i, int j, int k, int l, int s, int t, OpraMode mode, F&& f) {
  const int n = g.sectors();
  if (mode == OpraMode::naive) {
    for (int u = 0; u < n; ++u) {
      if (!turn(g, u, -i, s)) continue;
      for (int v = 0; v < n; ++v) {
        if (!turn(g, v, -k, j)) continue;
        for (int w = 0; w < n; ++w) {
          if (!turn(g, w, -t, l)) continue;
          if (triangle(g, u, v, w) && f(u, v, w)) return;
        }
      }
    }
    return;
  }
  // u - i + s must land in {-1, 0, 1}, so u is one of i - s + {-1, 0, 1};
  // the same holds for v and w. The turn predicate then re-checks parity.
  auto candidates = [&](int base, int a, int b, int out[3]) {
    int count = 0;
    for (int d = -1; d <= 1; ++d) {
      int c = sector_mod(g, static_cast<long long>(base) + d);
      if (turn(g, c, a, b)) out[count++] = c;
    }
    return count;
  };
  int us[3], vs[3], ws[3];
  const int nu = candidates(i - s, -i, s, us);
  if (nu == 0) return;
  const int nv = candidates(k - j, -k, j, vs);
  if (nv == 0) return;
  const int nw = candidates(t - l, -t, l, ws);
  for (int a = 0; a < nu; ++a)
    for (int b = 0; b < nv; ++b)
      for (int c = 0; c < nw; ++c)
        if (triangle(g, us[a], vs[b], ws[c]) && f(us[a], vs[b], ws[c])) return;
}

}  // namespace detail

/// Decides whether o-points A, B, C exist with A r_ab B, B r_bc C and
/// A r_ac C.
inline bool opra(const BaseRelation& r_ab, const BaseRelation& r_bc, const BaseRelation& r_ac,
                 OpraMode mode = OpraMode::optimized) {
  const Granularity g = r_ab.granularity();
  require_same(g, r_bc.granularity());
  require_same(g, r_ac.granularity());

  const bool ab_same = r_ab.is_same_pos(), bc_same = r_bc.is_same_pos(), ac_same = r_ac.is_same_pos();
  const int i = r_ab.i(), j = r_ab.j();
  const int k = r_bc.i(), l = r_bc.j();
  const int s = r_ac.i(), t = r_ac.j();

  if (ab_same && bc_same && ac_same) return turn(g, i, k, -s);
  // Sameness of position is transitive.
  if (static_cast<int>(ab_same) + static_cast<int>(bc_same) + static_cast<int>(ac_same) == 2) return false;
  if (ab_same) return l == t && turn(g, i, k, -s);
  if (bc_same) return i == s && turn(g, t, k, -j);
  if (ac_same) return j == k && turn(g, i, -l, -s);

  bool found = false;
  detail::for_each_corner_triple(g, i, j, k, l, s, t, mode, [&](int, int, int) { return found = true; });
  return found;
}

/// Weak composition: every base relation r3 with opra(r1, r2, r3).
inline RelationSet compose(const BaseRelation& r1, const BaseRelation& r2, OpraMode mode = OpraMode::optimized) {
  const Granularity g = r1.granularity();
  require_same(g, r2.granularity());
  std::vector<BaseRelation> members;
  for (std::size_t id = 0; id < g.relation_count(); ++id) {
    auto r3 = BaseRelation::from_id(g, id);
    if (opra(r1, r2, r3, mode)) members.push_back(r3);
  }
  return RelationSet::of(g, members);
}

inline RelationSet compose_sets(const RelationSet& a, const RelationSet& b, OpraMode mode = OpraMode::optimized) {
  const Granularity g = a.granularity();
  require_same(g, b.granularity());
  RelationSet out(g);
  a.for_each_id([&](std::size_t x) {
    b.for_each_id([&](std::size_t y) {
      out |= compose(BaseRelation::from_id(g, x), BaseRelation::from_id(g, y), mode);
    });
  });
  return out;
}

// Precomputed weak composition for every ordered pair of base relations.
// Entries are stored as packed words, row-major by (id1, id2).
class CompositionTable {
 public:
  static constexpr int max_granularity = 16;

  explicit CompositionTable(Granularity g)
      : g_(g),
        n_(g.relation_count()),
        words_per_entry_(RelationSet(g).words().size()),
        words_(n_ * n_ * words_per_entry_, 0) {}

  Granularity granularity() const noexcept { return g_; }
  std::size_t relation_count() const noexcept { return n_; }
  std::size_t entry_count() const noexcept { return n_ * n_; }

  RelationSet entry(std::size_t id1, std::size_t id2) const {
    return RelationSet::from_words(g_, {&words_[offset(id1, id2)], words_per_entry_});
  }
  RelationSet entry(const BaseRelation& r1, const BaseRelation& r2) const {
    require_same(g_, r1.granularity());
    require_same(g_, r2.granularity());
    return entry(r1.id(), r2.id());
  }

  void set_entry(std::size_t id1, std::size_t id2, const RelationSet& value) {
    require_same(g_, value.granularity());
    auto w = value.words();
    std::copy(w.begin(), w.end(), words_.begin() + static_cast<std::ptrdiff_t>(offset(id1, id2)));
  }

  /// Union of the entries over all member pairs.
  RelationSet compose(const RelationSet& a, const RelationSet& b) const {
    require_same(g_, a.granularity());
    require_same(g_, b.granularity());
    std::vector<RelationSet::word_type> acc(words_per_entry_, 0);
    a.for_each_id([&](std::size_t x) {
      b.for_each_id([&](std::size_t y) {
        const auto* e = &words_[offset(x, y)];
        for (std::size_t q = 0; q < words_per_entry_; ++q) acc[q] |= e[q];
      });
    });
    return RelationSet::from_words(g_, acc);
  }

  friend bool operator==(const CompositionTable&, const CompositionTable&) = default;

 private:
  std::size_t offset(std::size_t id1, std::size_t id2) const {
    if (id1 >= n_ || id2 >= n_) throw error("relation id out of range for composition table");
    return (id1 * n_ + id2) * words_per_entry_;
  }

  Granularity g_;
  std::size_t n_;
  std::size_t words_per_entry_;
  std::vector<RelationSet::word_type> words_;
};

inline CompositionTable build_table(Granularity g, OpraMode mode = OpraMode::optimized) {
  if (g.m() > CompositionTable::max_granularity)
    throw error("composition tables are limited to m <= " + std::to_string(CompositionTable::max_granularity));
  CompositionTable table(g);
  const auto n = g.relation_count();
  for (std::size_t a = 0; a < n; ++a) {
    const auto r1 = BaseRelation::from_id(g, a);
    for (std::size_t b = 0; b < n; ++b) table.set_entry(a, b, compose(r1, BaseRelation::from_id(g, b), mode));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Table file format (UTF-8, LF):
//
//   OPRA-TABLE v1 m=<m>
//   <r1> ; <r2> ; <r3a> <r3b> ...
//
// one line per ordered pair, pairs and members in canonical-id order.

inline void serialize_table(const CompositionTable& t, std::ostream& out) {
  const Granularity g = t.granularity();
  out << "OPRA-TABLE v1 m=" << g.m() << '\n';
  const auto n = t.relation_count();
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t id = 0; id < n; ++id) names.push_back(format_relation(BaseRelation::from_id(g, id)));
  std::string line;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      line.clear();
      line += names[a];
      line += " ; ";
      line += names[b];
      line += " ;";
      t.entry(a, b).for_each_id([&](std::size_t id) {
        line += ' ';
        line += names[id];
      });
      line += '\n';
      out << line;
    }
  }
}

inline std::string serialize_table(const CompositionTable& t) {
  std::ostringstream os;
  serialize_table(t, os);
  return os.str();
}

struct table_format_error : parse_error {
  table_format_error(std::size_t line, const std::string& what)
      : parse_error("table line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

inline CompositionTable load_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw table_format_error(line_no, "missing header");
  constexpr std::string_view prefix = "OPRA-TABLE v1 m=";
  if (line.rfind(prefix, 0) != 0) throw table_format_error(line_no, "malformed header '" + line + "'");
  auto m = detail::parse_uint(std::string_view(line).substr(prefix.size()));
  if (!m || *m < 1 || *m > CompositionTable::max_granularity)
    throw table_format_error(line_no, "bad granularity in header '" + line + "'");
  const Granularity g(static_cast<int>(*m));
  CompositionTable table(g);
  const auto n = g.relation_count();
  std::vector<bool> seen(n * n, false);
  std::size_t pairs = 0;

  auto relation_at = [&](std::string_view token) {
    try {
      return parse_relation(token, g);
    } catch (const error& e) {
      throw table_format_error(line_no, e.what());
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view rest(line);
    auto s1 = rest.find(';');
    auto s2 = s1 == std::string_view::npos ? s1 : rest.find(';', s1 + 1);
    if (s2 == std::string_view::npos || rest.find(';', s2 + 1) != std::string_view::npos)
      throw table_format_error(line_no, "expected '<r1> ; <r2> ; <members>'");
    const auto r1 = relation_at(rest.substr(0, s1));
    const auto r2 = relation_at(rest.substr(s1 + 1, s2 - s1 - 1));
    std::vector<BaseRelation> members;
    std::istringstream tokens{std::string(rest.substr(s2 + 1))};
    for (std::string tok; tokens >> tok;) members.push_back(relation_at(tok));
    const auto key = r1.id() * n + r2.id();
    if (seen[key]) throw table_format_error(line_no, "duplicate pair");
    seen[key] = true;
    table.set_entry(r1.id(), r2.id(), RelationSet::of(g, members));
    ++pairs;
  }
  if (pairs != n * n)
    throw table_format_error(line_no, "expected " + std::to_string(n * n) + " pairs, found " + std::to_string(pairs));
  return table;
}

inline CompositionTable load_table(const std::string& bytes) {
  std::istringstream is(bytes);
  return load_table(is);
}

}  // namespace opra
