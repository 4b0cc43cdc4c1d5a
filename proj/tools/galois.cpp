#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "galois/csv.hpp"
#include "galois/errors.hpp"
#include "galois/executor.hpp"
#include "galois/harness.hpp"
#include "galois/http_backend.hpp"
#include "galois/mock_backend.hpp"
#include "galois/planner.hpp"
#include "galois/prompt.hpp"
#include "galois/relation.hpp"
#include "galois/sql_ast.hpp"
#include "galois/sql_binder.hpp"

namespace {

using namespace galois;

constexpr int kExitOk = 0;
constexpr int kExitQueryError = 1;
constexpr int kExitBackendError = 2;
constexpr int kExitUsage = 64;

// Options shared by run and bench.
struct EngineOpts {
  std::string backend_spec;
  std::string templates_dir;
  std::string noise_file;
  std::optional<std::uint64_t> seed;
  int max_iterations = 10;
  int batch_size = 8;
  std::optional<std::int64_t> row_cap;
  std::string filter_mode = "auto";
  std::string join_fold = "none";
  std::vector<std::string> join_aliases;
  int timeout = 60;
  std::string model = "gpt-3.5-turbo";
  bool optimize = false;
  bool stats = false;
  std::string reject_log;
};

void add_engine_opts(CLI::App* cmd, EngineOpts& opts) {
  cmd->add_option("--templates", opts.templates_dir, "directory overriding prompt templates");
  cmd->add_option("--noise", opts.noise_file, "noise config for the mock backend");
  cmd->add_option("--seed", opts.seed, "noise seed, overrides the noise file");
  cmd->add_option("--max-iterations", opts.max_iterations, "scan continuation cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", opts.batch_size, "concurrent prompts per operator")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--row-cap", opts.row_cap, "abort when an operator exceeds this many rows")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--filter-mode", opts.filter_mode, "auto, fetch, or ask")
      ->check(CLI::IsMember({"auto", "fetch", "ask"}));
  cmd->add_option("--join-fold", opts.join_fold, "join key folding: none or case")
      ->check(CLI::IsMember({"none", "case"}));
  cmd->add_option("--join-alias", opts.join_aliases,
                  "join key rewrite FROM=TO, repeatable");
  cmd->add_option("--timeout", opts.timeout, "http timeout in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--model", opts.model, "model name for the http backend");
  cmd->add_flag("--optimize", opts.optimize, "push selections into scan prompts");
  cmd->add_flag("--stats", opts.stats, "print backend call stats to stderr");
  cmd->add_option("--reject-log", opts.reject_log, "append domain rejections to this file");
}

plan::FilterMode parse_filter_mode(const std::string& name) {
  if (name == "fetch") return plan::FilterMode::Fetch;
  if (name == "ask") return plan::FilterMode::Ask;
  return plan::FilterMode::Auto;
}

exec::ExecConfig make_exec_config(const EngineOpts& opts) {
  exec::ExecConfig cfg;
  cfg.max_iterations = opts.max_iterations;
  cfg.batch_size = opts.batch_size;
  cfg.row_cap = opts.row_cap;
  cfg.join_fold = opts.join_fold == "case" ? exec::JoinFold::Case : exec::JoinFold::None;
  for (const std::string& pair : opts.join_aliases) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      throw ValidationError("--join-alias expects FROM=TO, got: " + pair);
    }
    cfg.join_alias[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return cfg;
}

prompt::TemplateSet load_templates(const EngineOpts& opts) {
  if (opts.templates_dir.empty()) return prompt::TemplateSet::default_set();
  return prompt::TemplateSet::load_dir(opts.templates_dir);
}

struct BackendSpec {
  bool http = false;
  std::string arg;  // facts file or base url
};

BackendSpec parse_backend_spec(const std::string& spec) {
  if (spec.rfind("mock:", 0) == 0) return {false, spec.substr(5)};
  if (spec.rfind("http:", 0) == 0) {
    std::string rest = spec.substr(5);
    // "http://host" keeps its scheme; "http:http://host" also works.
    if (rest.rfind("//", 0) == 0) return {true, "http:" + rest};
    return {true, rest};
  }
  throw ValidationError("--backend expects mock:<facts-file> or http:<base-url>, got: " +
                        spec);
}

backend::NoiseConfig load_noise(const EngineOpts& opts) {
  backend::NoiseConfig noise;
  if (!opts.noise_file.empty()) noise = backend::NoiseConfig::load_file(opts.noise_file);
  if (opts.seed) noise.seed = *opts.seed;
  return noise;
}

std::unique_ptr<backend::Backend> make_backend(const BackendSpec& spec, const EngineOpts& opts,
                                               const Catalog& catalog,
                                               const prompt::TemplateSet& templates) {
  if (spec.http) {
    backend::HttpConfig cfg;
    cfg.base_url = spec.arg;
    cfg.model = opts.model;
    cfg.timeout_seconds = opts.timeout;
    return std::make_unique<backend::HttpBackend>(std::move(cfg));
  }
  auto store = backend::FactStore::load_file(spec.arg);
  store.validate_against(catalog);
  return std::make_unique<backend::MockBackend>(std::move(store), load_noise(opts), templates);
}

void print_stats(const backend::Backend& backend) {
  auto stats = backend.stats();
  std::fprintf(stderr, "backend calls: %llu\nprompt chars: %llu\n",
               static_cast<unsigned long long>(stats.calls),
               static_cast<unsigned long long>(stats.prompt_chars));
}

norm::RejectionSink make_reject_sink(const std::string& path,
                                     std::shared_ptr<std::ofstream>& keep_alive) {
  if (path.empty()) return {};
  keep_alive = std::make_shared<std::ofstream>(path, std::ios::trunc);
  if (!*keep_alive) throw ValidationError("cannot open reject log: " + path);
  auto file = keep_alive;
  return [file](const norm::RejectionRecord& rec) {
    nlohmann::ordered_json line;
    line["attribute"] = rec.attribute;
    line["value"] = rec.value;
    line["constraint"] = rec.constraint;
    *file << line.dump() << "\n";
    file->flush();
  };
}

std::string read_query_text(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return read_text_file(arg);
  return arg;
}

struct RunOpts {
  std::string schema;
  std::string query;
  std::string out = "csv";
  bool explain = false;
  EngineOpts engine;
};

int cmd_run(const RunOpts& opts) {
  Catalog catalog = load_catalog(read_text_file(opts.schema),
                                 std::filesystem::path(opts.schema).parent_path());
  auto ast = sql::parse(read_query_text(opts.query));
  auto bound = sql::bind(ast, catalog);
  auto logical = plan::build_logical_plan(std::move(bound));
  if (opts.engine.optimize) logical = plan::push_down_selections(std::move(logical));
  auto physical =
      plan::lower_to_physical(logical, catalog, parse_filter_mode(opts.engine.filter_mode));

  if (opts.explain) {
    std::fputs(plan::explain(physical).c_str(), stdout);
    if (opts.engine.stats) std::fprintf(stderr, "backend calls: 0\nprompt chars: 0\n");
    return kExitOk;
  }

  if (opts.engine.backend_spec.empty()) {
    std::fprintf(stderr, "galois run: --backend is required unless --explain is given\n");
    return kExitUsage;
  }

  auto templates = load_templates(opts.engine);
  auto backend = make_backend(parse_backend_spec(opts.engine.backend_spec), opts.engine,
                              catalog, templates);
  prompt::Compiler compiler(templates, opts.engine.max_iterations);

  exec::ExecConfig cfg = make_exec_config(opts.engine);
  std::shared_ptr<std::ofstream> reject_file;
  cfg.on_reject = make_reject_sink(opts.engine.reject_log, reject_file);

  Relation result = exec::execute(physical, *backend, compiler, cfg);
  std::fputs(opts.out == "json" ? to_json(result).c_str() : to_csv(result).c_str(), stdout);
  if (opts.engine.stats) print_stats(*backend);
  return kExitOk;
}

struct BenchOpts {
  std::string suite;
  std::string report = "report.json";
  std::string modes = "sql";
  double tolerance = 0.05;
  EngineOpts engine;
};

int cmd_bench(const BenchOpts& opts) {
  harness::Suite suite = harness::load_suite(opts.suite);

  harness::BenchOptions bench;
  bench.modes.clear();
  std::string modes = opts.modes;
  for (std::size_t pos = 0; pos <= modes.size();) {
    std::size_t comma = modes.find(',', pos);
    if (comma == std::string::npos) comma = modes.size();
    std::string name = trim_copy(modes.substr(pos, comma - pos));
    if (!name.empty()) {
      auto mode = harness::parse_run_mode(name);
      if (!mode) throw ValidationError("unknown mode: " + name);
      bench.modes.push_back(*mode);
    }
    pos = comma + 1;
  }
  if (bench.modes.empty()) throw ValidationError("--modes lists no modes");
  bench.optimize = opts.engine.optimize;
  bench.filter_mode = parse_filter_mode(opts.engine.filter_mode);
  bench.exec = make_exec_config(opts.engine);
  bench.tolerance = opts.tolerance;

  auto templates = load_templates(opts.engine);
  std::unique_ptr<backend::Backend> backend;
  if (opts.engine.backend_spec.empty()) {
    backend = std::make_unique<backend::MockBackend>(suite.facts, load_noise(opts.engine),
                                                     templates);
  } else {
    backend = make_backend(parse_backend_spec(opts.engine.backend_spec), opts.engine,
                           suite.catalog, templates);
  }
  prompt::Compiler compiler(templates, opts.engine.max_iterations);

  auto report = harness::run_benchmark(suite, *backend, compiler, bench);
  std::ofstream out(opts.report, std::ios::trunc | std::ios::binary);
  if (!out) throw ValidationError("cannot write report: " + opts.report);
  out << harness::report_to_json(report);
  out.close();

  std::fputs(harness::render_report_table(report).c_str(), stdout);
  if (opts.engine.stats) print_stats(*backend);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SQL over a language model: compile, prompt, and evaluate"};
  app.require_subcommand(1);

  RunOpts run_opts;
  auto* run = app.add_subcommand("run", "execute one query and print the relation");
  run->add_option("--schema", run_opts.schema, "catalog file")->required();
  run->add_option("--query", run_opts.query, "SQL text or a file containing it")->required();
  run->add_option("--backend", run_opts.engine.backend_spec,
                  "mock:<facts-file> or http:<base-url>");
  run->add_option("--out", run_opts.out, "result format")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--explain", run_opts.explain, "print the plan, contact no backend");
  add_engine_opts(run, run_opts.engine);

  BenchOpts bench_opts;
  auto* bench = app.add_subcommand("bench", "run a suite and score it");
  bench->add_option("--suite", bench_opts.suite, "suite directory")->required();
  bench->add_option("--backend", bench_opts.engine.backend_spec,
                    "backend override; defaults to a mock over the suite facts");
  bench->add_option("--report", bench_opts.report, "report file to write");
  bench->add_option("--modes", bench_opts.modes, "comma separated: sql, nl, nl-cot");
  bench->add_option("--tolerance", bench_opts.tolerance, "numeric cell match tolerance")
      ->check(CLI::PositiveNumber);
  add_engine_opts(bench, bench_opts.engine);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    return cmd_bench(bench_opts);
  } catch (const BackendError& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return kExitBackendError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitQueryError;
  }
}
