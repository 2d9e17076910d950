#pragma once

// Binary constraint networks over o-point variables and algebraic closure.

#include <cstddef>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opra/algebra.hpp"
#include "opra/composition.hpp"
#include "opra/geometry.hpp"

namespace opra {

// Variables plus an n x n matrix of relation sets. The diagonal holds the
// identity relation and cell (y, x) is always the converse of cell (x, y).
// Unconstrained pairs hold the full set.
class ConstraintNetwork {
 public:
  explicit ConstraintNetwork(Granularity g) : g_(g) {}

  ConstraintNetwork(Granularity g, std::vector<std::string> names) : g_(g) {
    for (auto& n : names) add_variable(std::move(n));
  }

  Granularity granularity() const noexcept { return g_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& variables() const noexcept { return names_; }

  std::size_t add_variable(std::string name) {
    if (index_.count(name) != 0) throw error("duplicate variable '" + name + "'");
    const std::size_t n = names_.size();
    std::vector<RelationSet> cells;
    cells.reserve((n + 1) * (n + 1));
    for (std::size_t r = 0; r <= n; ++r)
      for (std::size_t c = 0; c <= n; ++c) {
        if (r == c)
          cells.push_back(RelationSet::singleton(identity_relation(g_)));
        else if (r < n && c < n)
          cells.push_back(cells_[r * n + c]);
        else
          cells.push_back(RelationSet::full(g_));
      }
    cells_ = std::move(cells);
    index_.emplace(name, n);
    names_.push_back(std::move(name));
    return n;
  }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw error("unknown variable '" + name + "'");
    return it->second;
  }

  const RelationSet& at(std::size_t x, std::size_t y) const { return cells_[cell(x, y)]; }
  const RelationSet& at(const std::string& x, const std::string& y) const { return at(index_of(x), index_of(y)); }

  /// Intersects cell (x, y) with r and mirrors the converse into (y, x).
  /// Returns true if the cell shrank.
  bool intersect(std::size_t x, std::size_t y, const RelationSet& r) {
    require_same(g_, r.granularity());
    RelationSet next = at(x, y) & r;
    if (next == at(x, y)) return false;
    if (x != y) cells_[cell(y, x)] = converse_set(next);
    cells_[cell(x, y)] = std::move(next);
    return true;
  }
  bool intersect(const std::string& x, const std::string& y, const RelationSet& r) {
    return intersect(index_of(x), index_of(y), r);
  }

  bool has_empty_cell() const {
    for (const auto& c : cells_)
      if (c.is_empty()) return true;
    return false;
  }

  friend bool operator==(const ConstraintNetwork&, const ConstraintNetwork&) = default;

 private:
  std::size_t cell(std::size_t x, std::size_t y) const {
    if (x >= names_.size() || y >= names_.size()) throw error("variable index out of range");
    return x * names_.size() + y;
  }

  Granularity g_;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<RelationSet> cells_;
};

inline ConstraintNetwork refine(ConstraintNetwork n, const std::string& x, const std::string& y,
                                const RelationSet& r) {
  n.intersect(x, y, r);
  return n;
}

enum class ClosureStatus { consistent_so_far, inconsistent };

// consistent_so_far only means no empty relation was derived; for OPRA
// algebraic closure does not decide consistency.
struct ClosureResult {
  ClosureStatus status;
  ConstraintNetwork network;
  std::size_t refinements = 0;
};

/// Applies R_ij <- R_ij & (R_ik o R_kj) until nothing changes.
inline ClosureResult algebraic_closure(ConstraintNetwork net, const CompositionTable& table) {
  require_same(net.granularity(), table.granularity());
  const std::size_t n = net.size();
  ClosureResult result{ClosureStatus::consistent_so_far, net, 0};
  auto& N = result.network;
  if (N.has_empty_cell()) {
    result.status = ClosureStatus::inconsistent;
    return result;
  }

  std::deque<std::pair<std::size_t, std::size_t>> queue;
  std::vector<char> queued(n * n, 0);
  auto push = [&](std::size_t x, std::size_t y) {
    if (!queued[x * n + y]) {
      queued[x * n + y] = 1;
      queue.emplace_back(x, y);
    }
  };
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) push(x, y);

  // Returns false once a cell becomes empty.
  auto revise = [&](std::size_t x, std::size_t y, const RelationSet& bound) {
    if (!N.intersect(x, y, bound)) return true;
    ++result.refinements;
    if (N.at(x, y).is_empty()) return false;
    push(x, y);
    push(y, x);
    return true;
  };

  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    queued[i * n + j] = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      if (!revise(i, k, table.compose(N.at(i, j), N.at(j, k))) ||
          !revise(k, j, table.compose(N.at(k, i), N.at(i, j)))) {
        result.status = ClosureStatus::inconsistent;
        return result;
      }
    }
  }
  return result;
}

/// True iff qualify of every pair of the scene lies in its constraint.
inline bool check_scenario_closure(const Scene& scene, const ConstraintNetwork& net, const QualifyOptions& opt = {}) {
  std::vector<const OPoint*> assigned(net.size(), nullptr);
  for (const auto& p : scene) {
    for (std::size_t v = 0; v < net.size(); ++v)
      if (net.variables()[v] == p.name) assigned[v] = &p.point;
  }
  for (std::size_t v = 0; v < net.size(); ++v)
    if (assigned[v] == nullptr) throw error("scene has no o-point for variable '" + net.variables()[v] + "'");
  for (std::size_t x = 0; x < net.size(); ++x)
    for (std::size_t y = 0; y < net.size(); ++y) {
      if (x == y) continue;
      if (!net.at(x, y).contains(qualify(*assigned[x], *assigned[y], net.granularity(), opt))) return false;
    }
  return true;
}

/// The network whose cells are the singleton relations of a concrete scene.
inline ConstraintNetwork network_from_scene(const Scene& scene, Granularity g, const QualifyOptions& opt = {}) {
  ConstraintNetwork net(g);
  for (const auto& p : scene) net.add_variable(p.name);
  for (std::size_t x = 0; x < scene.size(); ++x)
    for (std::size_t y = x + 1; y < scene.size(); ++y)
      net.intersect(x, y, RelationSet::singleton(qualify(scene[x].point, scene[y].point, g, opt)));
  return net;
}

// ---------------------------------------------------------------------------
// Network files:
//
//   m = <integer>
//   node <name>
//   rel <name> <name> { <relations separated by commas or spaces> }
//
// '#' starts a comment. Repeated rel lines for a pair intersect.

inline ConstraintNetwork parse_network(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<ConstraintNetwork> net;
  auto fail = [&](const std::string& what) -> void {
    throw parse_error("network line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string spaced;
    for (char c : line) {
      if (c == ',') c = ' ';
      if (c == '{' || c == '}') {
        spaced += ' ';
        spaced += c;
        c = ' ';
      }
      spaced += c;
    }
    line = std::move(spaced);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "m" || keyword.rfind("m=", 0) == 0) {
      if (net) fail("granularity given twice");
      std::string rest = keyword.substr(1), tok;
      while (ls >> tok) rest += tok;
      if (rest.empty() || rest.front() != '=') fail("expected 'm = <integer>'");
      auto m = detail::parse_uint(std::string_view(rest).substr(1));
      if (!m || *m < 1 || *m > 1 << 16) fail("bad granularity '" + rest.substr(1) + "'");
      net.emplace(Granularity(static_cast<int>(*m)));
      continue;
    }
    if (!net) fail("'m = <integer>' must come first");
    try {
      if (keyword == "node") {
        std::string name, extra;
        if (!(ls >> name) || (ls >> extra)) fail("expected 'node <name>'");
        net->add_variable(name);
      } else if (keyword == "rel") {
        std::string x, y, open;
        if (!(ls >> x >> y >> open) || open != "{") fail("expected 'rel <name> <name> { ... }'");
        std::vector<BaseRelation> members;
        bool closed = false;
        for (std::string tok; ls >> tok;) {
          if (tok == "}") {
            closed = true;
            break;
          }
          try {
            members.push_back(parse_relation(tok, net->granularity()));
          } catch (const parse_error& e) {
            fail(e.what());
          }
        }
        if (std::string extra; !closed || (ls >> extra)) fail("unterminated relation set");
        net->intersect(x, y, RelationSet::of(net->granularity(), members));
      } else {
        fail("unknown keyword '" + keyword + "'");
      }
    } catch (const parse_error&) {
      throw;
    } catch (const error& e) {
      fail(e.what());
    }
  }
  if (!net) throw parse_error("network: missing 'm = <integer>'");
  return *net;
}

inline ConstraintNetwork parse_network(const std::string& text) {
  std::istringstream is(text);
  return parse_network(is);
}

/// Writes the network back in file format; full cells are omitted.
inline void write_network(const ConstraintNetwork& net, std::ostream& out) {
  out << "m = " << net.granularity().m() << '\n';
  for (const auto& name : net.variables()) out << "node " << name << '\n';
  for (std::size_t x = 0; x < net.size(); ++x)
    for (std::size_t y = x + 1; y < net.size(); ++y) {
      const auto& r = net.at(x, y);
      if (r.is_full()) continue;
      out << "rel " << net.variables()[x] << ' ' << net.variables()[y] << " { " << format_relation_set(r)
          << (r.is_empty() ? "}" : " }") << '\n';
    }
}

inline std::string write_network(const ConstraintNetwork& net) {
  std::ostringstream os;
  write_network(net, os);
  return os.str();
}

}  // namespace opra
