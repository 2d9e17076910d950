#pragma once

// Cross-checks of the opra predicate against concrete geometry.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opra/composition.hpp"
#include "opra/geometry.hpp"

namespace opra {

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::vector<bool> witnessed;  // by relation id, over every qualified pair
  std::optional<std::string> first_counterexample;

  std::size_t witnessed_count() const {
    std::size_t n = 0;
    for (bool w : witnessed) n += w ? 1 : 0;
    return n;
  }
};

/// Qualifies sampled triples and checks each against opra.
inline SoundnessReport check_soundness(Granularity g, std::size_t samples, std::uint64_t seed,
                                       OpraMode mode = OpraMode::optimized, const QualifyOptions& opt = {}) {
  SoundnessReport rep;
  rep.witnessed.assign(g.relation_count(), false);
  ConfigurationSampler sampler(g, seed);
  for (std::size_t q = 0; q < samples; ++q) {
    const Triple tri = sampler.next();
    const auto r_ab = qualify(tri.a, tri.b, g, opt);
    const auto r_bc = qualify(tri.b, tri.c, g, opt);
    const auto r_ac = qualify(tri.a, tri.c, g, opt);
    rep.witnessed[r_ab.id()] = rep.witnessed[r_bc.id()] = rep.witnessed[r_ac.id()] = true;
    ++rep.samples;
    if (!opra(r_ab, r_bc, r_ac, mode)) {
      ++rep.violations;
      if (!rep.first_counterexample)
        rep.first_counterexample = "sample " + std::to_string(q) + ": " + format_relation(r_ab) + ", " +
                                   format_relation(r_bc) + ", " + format_relation(r_ac) +
                                   " is realized but rejected";
    }
  }
  return rep;
}

struct CompletenessReport {
  std::size_t triples = 0;   // all triples examined
  std::size_t accepted = 0;  // opra-true triples
  std::size_t realized = 0;  // accepted triples realized and round-tripped
  std::size_t failures = 0;
  std::optional<std::string> first_counterexample;
};

/// Realizes every opra-true triple of base relations.
inline CompletenessReport check_completeness(Granularity g, OpraMode mode = OpraMode::optimized) {
  CompletenessReport rep;
  const auto rels = enumerate_base_relations(g);
  for (const auto& r1 : rels)
    for (const auto& r2 : rels)
      for (const auto& r3 : rels) {
        ++rep.triples;
        if (!opra(r1, r2, r3, mode)) continue;
        ++rep.accepted;
        std::string why;
        try {
          if (realize_triple(r1, r2, r3))
            ++rep.realized;
          else
            why = "realizer rejects an accepted triple";
        } catch (const std::logic_error& e) {
          why = e.what();
        }
        if (!why.empty()) {
          ++rep.failures;
          if (!rep.first_counterexample)
            rep.first_counterexample = format_relation(r1) + ", " + format_relation(r2) + ", " +
                                       format_relation(r3) + ": " + why;
        }
      }
  return rep;
}

}  // namespace opra
