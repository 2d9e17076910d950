// opra: composition tables, relation queries, qualification, closure and
// verification for OPRA_m.
//
// Exit codes: 0 success, 1 semantic negative (inconsistent network or
// failed verification), 2 usage or I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "opra/opra.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  int m = 2;
  std::string out_path;
  std::string in_path;
  std::string table_path;
  std::string rel1, rel2;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  opra::QualifyOptions eps;
  bool naive_opra = false;

  opra::OpraMode mode() const { return naive_opra ? opra::OpraMode::naive : opra::OpraMode::optimized; }
  opra::Granularity granularity() const {
    if (m < 1) throw usage_error("-m must be >= 1, got " + std::to_string(m));
    return opra::Granularity(m);
  }
};

opra::BaseRelation relation_arg(const std::string& text, opra::Granularity g) {
  try {
    return opra::parse_relation(text, g);
  } catch (const opra::error& e) {
    throw usage_error("bad relation '" + text + "': " + e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read '" + path + "'");
  return in;
}

int cmd_table(const CliConfig& cfg) {
  const auto g = cfg.granularity();
  if (g.m() > opra::CompositionTable::max_granularity)
    throw usage_error("-m must be <= " + std::to_string(opra::CompositionTable::max_granularity) + " for tables");
  std::optional<std::ofstream> file;
  if (!cfg.out_path.empty()) {
    file.emplace(cfg.out_path, std::ios::binary);
    if (!*file) throw usage_error("cannot write '" + cfg.out_path + "'");
  }
  const auto table = opra::build_table(g, cfg.mode());
  opra::serialize_table(table, file ? *file : std::cout);
  if (file) {
    file->close();
    if (!*file) throw usage_error("write to '" + cfg.out_path + "' failed");
  }
  auto& report = file ? std::cout : std::cerr;
  report << "relations: " << table.relation_count() << '\n' << "entries: " << table.entry_count() << '\n';
  return exit_ok;
}

int cmd_compose(const CliConfig& cfg) {
  const auto g = cfg.granularity();
  const auto r1 = relation_arg(cfg.rel1, g);
  const auto r2 = relation_arg(cfg.rel2, g);
  for (const auto& r : opra::compose(r1, r2, cfg.mode()).members()) std::cout << opra::format_relation(r) << '\n';
  return exit_ok;
}

int cmd_converse(const CliConfig& cfg) {
  const auto g = cfg.granularity();
  std::cout << opra::format_relation(opra::converse(relation_arg(cfg.rel1, g))) << '\n';
  return exit_ok;
}

int cmd_qualify(const CliConfig& cfg) {
  const auto g = cfg.granularity();
  auto in = open_input(cfg.in_path);
  opra::Scene scene;
  try {
    scene = opra::parse_scene(in);
  } catch (const opra::error& e) {
    throw usage_error(e.what());
  }
  for (const auto& a : scene)
    for (const auto& b : scene) {
      if (&a == &b) continue;
      std::cout << a.name << ' ' << b.name << ' ' << opra::format_relation(opra::qualify(a.point, b.point, g, cfg.eps))
                << '\n';
    }
  return exit_ok;
}

int cmd_closure(const CliConfig& cfg) {
  auto in = open_input(cfg.in_path);
  std::optional<opra::ConstraintNetwork> net;
  try {
    net = opra::parse_network(in);
  } catch (const opra::error& e) {
    throw usage_error(e.what());
  }
  const auto g = net->granularity();
  std::optional<opra::CompositionTable> table;
  if (!cfg.table_path.empty()) {
    auto tin = open_input(cfg.table_path);
    try {
      table = opra::load_table(tin);
    } catch (const opra::error& e) {
      throw usage_error(e.what());
    }
    if (table->granularity() != g)
      throw usage_error("table granularity m=" + std::to_string(table->granularity().m()) +
                        " does not match network m=" + std::to_string(g.m()));
  } else {
    if (g.m() > opra::CompositionTable::max_granularity)
      throw usage_error("network granularity too large to build a table");
    table = opra::build_table(g, cfg.mode());
  }
  const auto result = opra::algebraic_closure(*net, *table);
  opra::write_network(result.network, std::cout);
  const bool ok = result.status == opra::ClosureStatus::consistent_so_far;
  std::cout << (ok ? "CONSISTENT-SO-FAR" : "INCONSISTENT") << '\n';
  std::cerr << "refinements: " << result.refinements << '\n';
  return ok ? exit_ok : exit_negative;
}

int cmd_verify(const CliConfig& cfg) {
  const auto g = cfg.granularity();
  if (cfg.samples < 1) throw usage_error("--samples must be >= 1");
  const auto sound = opra::check_soundness(g, cfg.samples, cfg.seed, cfg.mode(), cfg.eps);
  std::cout << "soundness: " << sound.samples << " samples, " << sound.violations << " violations\n";
  std::cout << "witnessed: " << sound.witnessed_count() << " of " << g.relation_count() << " relations\n";
  bool ok = sound.violations == 0;
  if (sound.first_counterexample) std::cout << "counterexample: " << *sound.first_counterexample << '\n';
  if (g.m() <= 2) {
    const auto comp = opra::check_completeness(g, cfg.mode());
    std::cout << "completeness: " << comp.accepted << " accepted triples of " << comp.triples << ", "
              << comp.realized << " realized, " << comp.failures << " failures\n";
    if (comp.first_counterexample) std::cout << "counterexample: " << *comp.first_counterexample << '\n';
    ok = ok && comp.failures == 0;
  } else {
    std::cout << "completeness: skipped for m > 2\n";
  }
  std::cout << (ok ? "VERIFIED" : "FAILED") << '\n';
  return ok ? exit_ok : exit_negative;
}

void add_m(CLI::App* cmd, CliConfig& cfg) { cmd->add_option("-m", cfg.m, "granularity m of OPRA_m")->required(); }

void add_eps(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--eps-pos", cfg.eps.eps_pos, "distance below which positions coincide")->check(CLI::NonNegativeNumber);
  cmd->add_option("--eps-ang", cfg.eps.eps_ang, "angular snap distance to rays (radians)")->check(CLI::NonNegativeNumber);
}

void add_naive(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_flag("--naive-opra", cfg.naive_opra, "use the full u,v,w loop instead of candidate sets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oriented point relation algebra OPRA_m"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* table = app.add_subcommand("table", "generate the composition table");
  add_m(table, cfg);
  table->add_option("-o", cfg.out_path, "output file (default: stdout)");
  add_naive(table, cfg);

  auto* compose = app.add_subcommand("compose", "weak composition of two base relations");
  add_m(compose, cfg);
  compose->add_option("r1", cfg.rel1, "first relation")->required();
  compose->add_option("r2", cfg.rel2, "second relation")->required();
  add_naive(compose, cfg);

  auto* conv = app.add_subcommand("converse", "converse of a base relation");
  add_m(conv, cfg);
  conv->add_option("r", cfg.rel1, "relation")->required();

  auto* qual = app.add_subcommand("qualify", "relations between all o-points of a scene file");
  add_m(qual, cfg);
  qual->add_option("scene", cfg.in_path, "scene file")->required();
  add_eps(qual, cfg);

  auto* closure = app.add_subcommand("closure", "algebraic closure of a network file");
  closure->add_option("network", cfg.in_path, "network file")->required();
  closure->add_option("--table", cfg.table_path, "precomputed composition table");
  add_naive(closure, cfg);

  auto* verify = app.add_subcommand("verify", "check opra against sampled and constructed geometry");
  add_m(verify, cfg);
  verify->add_option("--samples", cfg.samples, "number of sampled configurations");
  verify->add_option("--seed", cfg.seed, "random seed");
  add_eps(verify, cfg);
  add_naive(verify, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*table) return cmd_table(cfg);
    if (*compose) return cmd_compose(cfg);
    if (*conv) return cmd_converse(cfg);
    if (*qual) return cmd_qualify(cfg);
    if (*closure) return cmd_closure(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const usage_error& e) {
    std::cerr << "opra: " << e.what() << '\n';
    return exit_usage;
  } catch (const opra::error& e) {
    std::cerr << "opra: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
