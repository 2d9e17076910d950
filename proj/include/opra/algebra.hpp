#pragma once

// Granularity, base relations and relation sets of the oriented point
// relation algebra OPRA_m.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opra {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when relations or sets of different granularity meet.
struct granularity_mismatch : error {
  granularity_mismatch(int a, int b)
      : error("granularity mismatch: m=" + std::to_string(a) + " vs m=" + std::to_string(b)) {}
};

struct parse_error : error {
  using error::error;
};

/// Number m of the calculus OPRA_m; an o-point sees 4m sectors.
class Granularity {
 public:
  explicit Granularity(int m) : m_(m) {
    if (m < 1) throw error("granularity must be >= 1, got " + std::to_string(m));
  }

  int m() const noexcept { return m_; }
  int sectors() const noexcept { return 4 * m_; }
  /// 4m*4m relations with distinct positions plus 4m with coincident ones.
  std::size_t relation_count() const noexcept {
    auto s = static_cast<std::size_t>(sectors());
    return s * s + s;
  }

  friend bool operator==(Granularity, Granularity) = default;

 private:
  int m_;
};

inline void require_same(Granularity a, Granularity b) {
  if (a != b) throw granularity_mismatch(a.m(), b.m());
}

/// Mathematical modulo into [0, 4m).
inline int sector_mod(Granularity g, long long i) noexcept {
  long long n = g.sectors();
  long long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

/// A base relation: SamePos(i) when the two o-points share a position,
/// DiffPos(i, j) otherwise (i: where B lies seen from A, j: where A lies
/// seen from B).
class BaseRelation {
 public:
  enum class Kind : std::uint8_t { same_pos, diff_pos };

  static BaseRelation same_pos(Granularity g, int i) { return BaseRelation(g, Kind::same_pos, i, 0); }
  static BaseRelation diff_pos(Granularity g, int i, int j) { return BaseRelation(g, Kind::diff_pos, i, j); }

  static BaseRelation from_id(Granularity g, std::size_t id) {
    if (id >= g.relation_count()) throw error("relation id out of range: " + std::to_string(id));
    auto n = static_cast<std::size_t>(g.sectors());
    if (id < n) return same_pos(g, static_cast<int>(id));
    id -= n;
    return diff_pos(g, static_cast<int>(id / n), static_cast<int>(id % n));
  }

  Granularity granularity() const noexcept { return g_; }
  Kind kind() const noexcept { return kind_; }
  bool is_same_pos() const noexcept { return kind_ == Kind::same_pos; }
  bool is_diff_pos() const noexcept { return kind_ == Kind::diff_pos; }
  // For SamePos(i) only i is meaningful; j() is 0.
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

  /// SamePos(i) -> i; DiffPos(i, j) -> 4m + 4m*i + j.
  std::size_t id() const noexcept {
    auto n = static_cast<std::size_t>(g_.sectors());
    if (is_same_pos()) return static_cast<std::size_t>(i_);
    return n + n * static_cast<std::size_t>(i_) + static_cast<std::size_t>(j_);
  }

  friend bool operator==(const BaseRelation&, const BaseRelation&) = default;

 private:
  BaseRelation(Granularity g, Kind k, int i, int j) : g_(g), kind_(k), i_(i), j_(j) {
    auto in_range = [&](int s) { return s >= 0 && s < g.sectors(); };
    if (!in_range(i) || !in_range(j))
      throw error("sector index out of range for m=" + std::to_string(g.m()));
  }

  Granularity g_;
  Kind kind_;
  int i_;
  int j_;
};

inline BaseRelation identity_relation(Granularity g) { return BaseRelation::same_pos(g, 0); }

inline BaseRelation converse(const BaseRelation& r) {
  const auto g = r.granularity();
  if (r.is_same_pos()) return BaseRelation::same_pos(g, sector_mod(g, g.sectors() - r.i()));
  return BaseRelation::diff_pos(g, r.j(), r.i());
}

/// All base relations of OPRA_m in canonical-id order.
inline std::vector<BaseRelation> enumerate_base_relations(Granularity g) {
  std::vector<BaseRelation> out;
  out.reserve(g.relation_count());
  for (std::size_t id = 0; id < g.relation_count(); ++id) out.push_back(BaseRelation::from_id(g, id));
  return out;
}

// A general relation: a bit-packed subset of the base relations of one
// granularity. The empty set signals inconsistency.
class RelationSet {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  explicit RelationSet(Granularity g) : g_(g), words_(word_count(g), 0) {}

  RelationSet(Granularity g, std::initializer_list<BaseRelation> members) : RelationSet(g) {
    for (const auto& r : members) add(r);
  }

  template <class Range>
  static RelationSet of(Granularity g, const Range& members) {
    RelationSet s(g);
    for (const auto& r : members) s.add(r);
    return s;
  }

  static RelationSet empty(Granularity g) { return RelationSet(g); }

  static RelationSet full(Granularity g) {
    RelationSet s(g);
    for (auto& w : s.words_) w = ~word_type{0};
    s.trim();
    return s;
  }

  static RelationSet singleton(const BaseRelation& r) {
    RelationSet s(r.granularity());
    s.add(r);
    return s;
  }

  static RelationSet from_words(Granularity g, std::span<const word_type> words) {
    RelationSet s(g);
    if (words.size() != s.words_.size()) throw error("word count does not match granularity");
    std::copy(words.begin(), words.end(), s.words_.begin());
    s.trim();
    return s;
  }

  Granularity granularity() const noexcept { return g_; }
  std::span<const word_type> words() const noexcept { return words_; }

  bool contains(const BaseRelation& r) const {
    require_same(g_, r.granularity());
    return contains_id(r.id());
  }
  bool contains_id(std::size_t id) const noexcept {
    return (words_[id / word_bits] >> (id % word_bits)) & 1U;
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool is_empty() const noexcept {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }
  bool is_full() const noexcept { return size() == g_.relation_count(); }

  bool is_subset_of(const RelationSet& other) const {
    require_same(g_, other.g_);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

  /// Members in canonical-id order.
  std::vector<BaseRelation> members() const {
    std::vector<BaseRelation> out;
    for_each_id([&](std::size_t id) { out.push_back(BaseRelation::from_id(g_, id)); });
    return out;
  }

  template <class F>
  void for_each_id(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      word_type w = words_[k];
      while (w != 0) {
        auto bit = static_cast<std::size_t>(std::countr_zero(w));
        f(k * word_bits + bit);
        w &= w - 1;
      }
    }
  }

  RelationSet with(const BaseRelation& r) const {
    RelationSet s = *this;
    s.add(r);
    return s;
  }

  RelationSet complement() const {
    RelationSet s = *this;
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  RelationSet& operator|=(const RelationSet& o) {
    require_same(g_, o.g_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  RelationSet& operator&=(const RelationSet& o) {
    require_same(g_, o.g_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  friend RelationSet operator|(RelationSet a, const RelationSet& b) { return a |= b; }
  friend RelationSet operator&(RelationSet a, const RelationSet& b) { return a &= b; }

  friend bool operator==(const RelationSet&, const RelationSet&) = default;

 private:
  static std::size_t word_count(Granularity g) { return (g.relation_count() + word_bits - 1) / word_bits; }

  void add(const BaseRelation& r) {
    require_same(g_, r.granularity());
    auto id = r.id();
    words_[id / word_bits] |= word_type{1} << (id % word_bits);
  }

  // Clears the padding bits past relation_count().
  void trim() {
    auto used = g_.relation_count() % word_bits;
    if (used != 0) words_.back() &= (word_type{1} << used) - 1;
  }

  Granularity g_;
  std::vector<word_type> words_;
};

inline RelationSet converse_set(const RelationSet& s) {
  std::vector<BaseRelation> conv;
  s.for_each_id([&](std::size_t id) { conv.push_back(converse(BaseRelation::from_id(s.granularity(), id))); });
  return RelationSet::of(s.granularity(), conv);
}

// ---------------------------------------------------------------------------
// Textual notation
//
//   <i>-<j>   DiffPos(i, j)
//   s<i>      SamePos(i)
//
// For m = 2 the sectors also have names (counterclockwise from the o-point's
// own heading), usable on either side of a DiffPos token: "rf-lf".

inline constexpr std::array<std::string_view, 8> opra2_sector_names = {
    "front", "lf", "left", "lb", "back", "rb", "right", "rf"};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::optional<long long> parse_uint(std::string_view s) {
  if (s.empty() || s.size() > 12) return std::nullopt;
  long long v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

inline int parse_sector(std::string_view part, Granularity g, std::string_view whole) {
  if (auto v = parse_uint(part)) {
    if (*v >= g.sectors())
      throw parse_error("sector index " + std::string(part) + " out of range [0, " +
                        std::to_string(g.sectors() - 1) + "] in relation '" + std::string(whole) + "'");
    return static_cast<int>(*v);
  }
  for (std::size_t k = 0; k < opra2_sector_names.size(); ++k) {
    if (part == opra2_sector_names[k]) {
      if (g.m() != 2)
        throw parse_error("sector name '" + std::string(part) + "' is only defined for m=2 (got m=" +
                          std::to_string(g.m()) + ") in relation '" + std::string(whole) + "'");
      return static_cast<int>(k);
    }
  }
  throw parse_error("malformed relation '" + std::string(whole) + "'");
}

}  // namespace detail

inline BaseRelation parse_relation(std::string_view text, Granularity g) {
  const auto t = detail::trim(text);
  if (t.empty()) throw parse_error("empty relation token");
  if (t.front() == 's' && t.size() > 1 && t[1] >= '0' && t[1] <= '9')
    return BaseRelation::same_pos(g, detail::parse_sector(t.substr(1), g, t));
  auto dash = t.find('-');
  if (dash == std::string_view::npos || t.find('-', dash + 1) != std::string_view::npos)
    throw parse_error("malformed relation '" + std::string(t) + "'");
  int i = detail::parse_sector(t.substr(0, dash), g, t);
  int j = detail::parse_sector(t.substr(dash + 1), g, t);
  return BaseRelation::diff_pos(g, i, j);
}

inline std::string format_relation(const BaseRelation& r) {
  if (r.is_same_pos()) return "s" + std::to_string(r.i());
  if (r.granularity().m() == 2)
    return std::string(opra2_sector_names[static_cast<std::size_t>(r.i())]) + "-" +
           std::string(opra2_sector_names[static_cast<std::size_t>(r.j())]);
  return std::to_string(r.i()) + "-" + std::to_string(r.j());
}

/// Members separated by single spaces, canonical order.
inline std::string format_relation_set(const RelationSet& s) {
  std::string out;
  s.for_each_id([&](std::size_t id) {
    if (!out.empty()) out += ' ';
    out += format_relation(BaseRelation::from_id(s.granularity(), id));
  });
  return out;
}

}  // namespace opra
