#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "relcompose/engine.hpp"
#include "relcompose/formats.hpp"
#include "relcompose/generator.hpp"
#include "relcompose/random.hpp"
#include "relcompose/validator.hpp"

namespace relcompose::cli {

namespace {

namespace fs = std::filesystem;

enum class Level { error, warn, info, debug };

Level log_level() {
  const char* v = std::getenv("RELCOMPOSE_LOG");
  if (!v) return Level::warn;
  const std::string s(v);
  if (s == "error") return Level::error;
  if (s == "info") return Level::info;
  if (s == "debug") return Level::debug;
  return Level::warn;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level()) {}
  std::ostream* at(Level l) { return l <= level_ ? &err_ : nullptr; }
  void diagnostics(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) {
      const Level l = d.severity == Severity::error ? Level::error : Level::warn;
      if (auto* o = at(l)) *o << to_string(d) << '\n';
    }
  }
  void info(const std::string& msg) {
    if (auto* o = at(Level::info)) *o << msg << '\n';
  }
  void error(const std::string& msg) {
    if (auto* o = at(Level::error)) *o << "error: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  Level level_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct InstanceArgs {
  std::string dir, ontology, rules, repository, query;

  void add(CLI::App& app) {
    app.add_option("--instance", dir, "directory holding ontology.jsonld, rules.xml, repository.xml, query.xml");
    app.add_option("--ontology", ontology, "ontology file (JSON-LD)");
    app.add_option("--rules", rules, "inference rules file (XML)");
    app.add_option("--repository", repository, "service repository file (XML)");
    app.add_option("--query", query, "query file (XML)");
  }

  InstanceFiles files() const {
    auto f = dir.empty() ? InstanceFiles{} : InstanceFiles::in_directory(dir);
    if (!ontology.empty()) f.ontology = ontology;
    if (!rules.empty()) f.rules = rules;
    if (!repository.empty()) f.repository = repository;
    if (!query.empty()) f.query = query;
    return f;
  }
};

std::string format_report(const SearchResult& r, const EngineConfig& config, std::size_t repository) {
  std::ostringstream out;
  out << "verdict: " << to_string(r.report.verdict) << '\n';
  out << "repository: " << repository << '\n';
  out << "solution-length: " << (r.composition ? service_step_count(*r.composition) : 0) << '\n';
  out << "solution-rule-steps: " << (r.composition ? rule_step_count(*r.composition) : 0) << '\n';
  out << "sweeps: " << r.report.sweeps << '\n';
  out << "service-calls: " << r.report.service_calls << '\n';
  out << "rule-applications: " << r.report.rule_applications << '\n';
  out << "objects: " << r.report.objects << '\n';
  out << "facts: " << r.report.facts << '\n';
  out << "dedup: " << to_string(config.dedup) << '\n';
  out << "injective: " << (config.injective ? "yes" : "no") << '\n';
  out << "rules: " << (config.apply_rules ? "applied" : "ignored") << '\n';
  out << "wall-seconds: " << fixed(r.report.wall_seconds, 6) << '\n';
  return out.str();
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::composed: return ok;
    case Verdict::unsolvable: return negative;
    case Verdict::budget_exceeded: return budget;
  }
  return negative;
}

// --- compose -----------------------------------------------------------------

struct ComposeArgs {
  InstanceArgs instance;
  std::string out;
  std::uint32_t max_sweeps = EngineConfig{}.max_sweeps;
  bool injective = false;
  bool ignore_rules = false;
  bool no_prune = false;
  std::string dedup = "identity";
};

int run_compose(const ComposeArgs& a, std::ostream& out, Log& log) {
  const auto dedup = parse_dedup_mode(a.dedup);
  if (!dedup) {
    log.error("unknown dedup mode '" + a.dedup + "' (identity or type-level)");
    return input_error;
  }
  auto loaded = load_instance(a.instance.files());
  log.diagnostics(loaded.diagnostics);
  if (!loaded.value) return input_error;

  EngineConfig config;
  config.max_sweeps = a.max_sweeps;
  config.injective = a.injective;
  config.apply_rules = !a.ignore_rules;
  config.prune = !a.no_prune;
  config.dedup = *dedup;

  const Problem problem(*loaded.value);
  const auto result = search_composition(problem, config);
  const fs::path dir(a.out);
  ensure_dir(dir);
  write_file_atomic(dir / "plan.txt", write_plan(to_plan_document(result, config)));
  const auto report = format_report(result, config, loaded.value->repository.size());
  write_file_atomic(dir / "report.txt", report);
  out << report;
  return exit_for(result.report.verdict);
}

// --- generate ----------------------------------------------------------------

struct GenerateArgs {
  GenConfig config;
  std::string preset;
  std::string out;
};

void add_generator_options(CLI::App& app, GenerateArgs& a) {
  auto& c = a.config;
  app.add_option("--preset", a.preset, "relational-0..3 or hierarchy-0..2; explicit flags override it");
  app.add_option("--seed", c.seed);
  app.add_option("--stages", c.stages);
  app.add_option("--objects-per-stage", c.objects_per_stage);
  app.add_option("--relations-per-stage", c.relations_per_stage);
  app.add_option("--services-per-layer", c.services_per_layer);
  app.add_option("--params-min", c.params_min);
  app.add_option("--params-max", c.params_max);
  app.add_option("--concept-count", c.concept_count, "concepts in each stage subtree");
  app.add_option("--hierarchy-depth", c.hierarchy_depth);
  app.add_option("--relation-types", c.relation_type_count);
  app.add_option("--rule-count", c.rule_count);
  app.add_option("--noise-services", c.noise_services);
  app.add_option("--noise-concepts", c.noise_concepts);
  app.add_option("--query-outputs", c.query_outputs);
  app.add_flag("--hierarchy-only", c.hierarchy_only);
  app.add_flag("!--no-rule-detours", c.rule_detours, "no rule-free alternative to rule chains");
}

/// Preset values, then every flag given explicitly.
std::optional<GenConfig> resolve_config(CLI::App& app, const GenerateArgs& a, Log& log) {
  if (a.preset.empty()) return a.config;
  GenConfig base;
  try {
    const auto dash = a.preset.rfind('-');
    const auto kind = a.preset.substr(0, dash);
    const int row = dash == std::string::npos ? -1 : std::stoi(a.preset.substr(dash + 1));
    if (kind == "relational") {
      base = relational_preset(row, a.config.seed);
    } else if (kind == "hierarchy") {
      base = hierarchy_preset(row, a.config.seed);
    } else {
      throw Error("unknown preset");
    }
  } catch (const std::exception&) {
    log.error("unknown preset '" + a.preset + "'");
    return std::nullopt;
  }
  const auto& c = a.config;
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (given("--seed")) base.seed = c.seed;
  if (given("--stages")) base.stages = c.stages;
  if (given("--objects-per-stage")) base.objects_per_stage = c.objects_per_stage;
  if (given("--relations-per-stage")) base.relations_per_stage = c.relations_per_stage;
  if (given("--services-per-layer")) base.services_per_layer = c.services_per_layer;
  if (given("--params-min")) base.params_min = c.params_min;
  if (given("--params-max")) base.params_max = c.params_max;
  if (given("--concept-count")) base.concept_count = c.concept_count;
  if (given("--hierarchy-depth")) base.hierarchy_depth = c.hierarchy_depth;
  if (given("--relation-types")) base.relation_type_count = c.relation_type_count;
  if (given("--rule-count")) base.rule_count = c.rule_count;
  if (given("--noise-services")) base.noise_services = c.noise_services;
  if (given("--noise-concepts")) base.noise_concepts = c.noise_concepts;
  if (given("--query-outputs")) base.query_outputs = c.query_outputs;
  if (given("--hierarchy-only")) base.hierarchy_only = true;
  if (given("--no-rule-detours")) base.rule_detours = false;
  return base;
}

int run_generate(CLI::App& app, const GenerateArgs& a, std::ostream& out, Log& log) {
  const auto config = resolve_config(app, a, log);
  if (!config) return input_error;
  if (auto why = check_config(*config); !why.empty()) {
    for (const auto& w : why) log.error("infeasible configuration: " + w);
    return input_error;
  }
  const auto inst = generate_instance(*config);
  const fs::path dir(a.out);
  ensure_dir(dir);
  for (const auto& [name, text] : render_instance(inst, *config)) write_file_atomic(dir / name, text);
  out << "repository: " << inst.repository.size() << '\n'
      << "reference-length: " << service_step_count(inst.reference) << '\n'
      << "random: " << Rng::kAlgorithm << '\n';
  return ok;
}

// --- validate ----------------------------------------------------------------

struct ValidateArgs {
  InstanceArgs instance;
  std::string plan;
  std::string out;
};

int run_validate(const ValidateArgs& a, std::ostream& out, Log& log) {
  auto loaded = load_instance(a.instance.files());
  log.diagnostics(loaded.diagnostics);
  auto text = read_text_file(a.plan);
  log.diagnostics(text.diagnostics);
  if (!loaded.value || !text.value) return input_error;
  auto plan = read_plan(*text.value, a.plan);
  log.diagnostics(plan.diagnostics);
  if (!plan.value) return input_error;

  const auto report = validate_plan(*loaded.value, *plan.value);
  const auto body = format_validation(report);
  const fs::path target = a.out.empty() ? fs::path(a.plan).parent_path() / "validation.txt" : fs::path(a.out);
  if (!target.parent_path().empty()) ensure_dir(target.parent_path());
  write_file_atomic(target, body);
  out << body;
  return report.accepted ? ok : negative;
}

// --- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string suite = "table1";
  std::uint32_t seeds = 4;
  std::string out;
};

struct Run {
  SearchResult result;
  bool accepted = false;
};

Run compose_and_check(const InstanceBundle& bundle, bool rules) {
  EngineConfig config;
  config.apply_rules = rules;
  const Problem problem(bundle);
  Run run{search_composition(problem, config), false};
  if (run.result.composition) run.accepted = validate_plan(bundle, to_plan_document(run.result, config)).accepted;
  return run;
}

std::string length_or_dash(const Run& r) {
  return r.result.composition ? std::to_string(service_step_count(*r.result.composition)) : "-";
}

int run_bench(const BenchArgs& a, std::ostream& out, Log& log) {
  std::ostringstream table;
  bool all_ok = true;
  if (a.suite == "table1") {
    table << "# suite table1; columns: seed preset repository solution rules-applied seconds "
             "solution-ignoring-rules accepted shape\n";
    for (std::uint32_t k = 0; k < a.seeds; ++k) {
      const int row = static_cast<int>(k % kRelationalPresets);
      const auto inst = generate_instance(relational_preset(row, k + 1));
      const auto bundle = to_bundle(inst);
      const auto with = compose_and_check(bundle, true);
      const auto without = compose_and_check(bundle, false);
      // Rules never make the plan longer, or the instance needs them.
      const bool shape = with.result.composition &&
                         (!without.result.composition ||
                          service_step_count(*with.result.composition) <= service_step_count(*without.result.composition));
      all_ok = all_ok && with.accepted && shape;
      table << (k + 1) << ' ' << "relational-" << row << ' ' << bundle.repository.size() << ' ' << length_or_dash(with)
            << ' ' << with.result.report.rule_applications << ' ' << fixed(with.result.report.wall_seconds, 4) << ' '
            << length_or_dash(without) << ' ' << (with.accepted ? "yes" : "no") << ' ' << (shape ? "ok" : "violated")
            << '\n';
      log.info("table1 seed " + std::to_string(k + 1) + " done");
    }
  } else if (a.suite == "table2-shape") {
    table << "# suite table2-shape; columns: seed preset repository solution seconds accepted\n";
    for (std::uint32_t k = 0; k < a.seeds; ++k) {
      for (int row = 0; row < kHierarchyPresets; ++row) {
        const auto inst = generate_instance(hierarchy_preset(row, k + 1));
        const auto bundle = to_bundle(inst);
        const auto with = compose_and_check(bundle, true);
        all_ok = all_ok && with.accepted;
        table << (k + 1) << ' ' << "hierarchy-" << row << ' ' << bundle.repository.size() << ' '
              << length_or_dash(with) << ' ' << fixed(with.result.report.wall_seconds, 4) << ' '
              << (with.accepted ? "yes" : "no") << '\n';
      }
    }
  } else {
    log.error("unknown suite '" + a.suite + "' (table1 or table2-shape)");
    return input_error;
  }
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_file_atomic(fs::path(a.out) / "bench.txt", table.str());
  }
  out << table.str();
  return all_ok ? ok : negative;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app("relational service composition", "relcompose");
  app.require_subcommand(1);

  ComposeArgs compose;
  auto* c = app.add_subcommand("compose", "search for a composition; writes plan.txt and report.txt");
  compose.instance.add(*c);
  c->add_option("--out", compose.out, "output directory")->required();
  c->add_option("--max-sweeps", compose.max_sweeps, "sweep budget");
  c->add_flag("--injective", compose.injective, "never bind one object to two parameters");
  c->add_flag("--ignore-rules", compose.ignore_rules, "skip inference rules; closure stays active");
  c->add_flag("--no-prune", compose.no_prune, "report the full trace");
  c->add_option("--dedup", compose.dedup, "identity or type-level");

  GenerateArgs generate;
  auto* g = app.add_subcommand("generate", "write a random solvable instance and its reference solution");
  add_generator_options(*g, generate);
  g->add_option("--out", generate.out, "output directory")->required();

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "replay a plan; writes validation.txt");
  validate.instance.add(*v);
  v->add_option("--plan", validate.plan, "plan file")->required();
  v->add_option("--report", validate.out, "validation report path (default: next to the plan)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "generate a suite and compose it with and without rules");
  b->add_option("--suite", bench.suite, "table1 or table2-shape");
  b->add_option("--seeds", bench.seeds, "number of seeds");
  b->add_option("--out", bench.out, "directory for bench.txt");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  }

  try {
    if (c->parsed()) return run_compose(compose, out, log);
    if (g->parsed()) return run_generate(*g, generate, out, log);
    if (v->parsed()) return run_validate(validate, out, log);
    if (b->parsed()) return run_bench(bench, out, log);
  } catch (const std::exception& e) {
    log.error(e.what());
    return input_error;
  }
  return input_error;
}

}  // namespace relcompose::cli
