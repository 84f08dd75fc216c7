// supc - SF rule composition and conflict checking front end.
//
//   supc compose --fw fw.rules --ids ids.rules -o table.json
//   supc check table.json -o report.json [--workers N]
//   supc gen --total N --distinct K --fw-fraction F --seed S --overlap P
//            -o fw.rules -o-ids ids.rules
//   supc bench --total N --distinct K --seed S [--json]
//
// Exit codes: 0 success (check: no conflicts), 1 check found conflicts,
// 2 fatal error.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supc/bench.hpp"
#include "supc/conflict.hpp"
#include "supc/flow_table.hpp"
#include "supc/generate.hpp"
#include "supc/ingest.hpp"
#include "supc/json_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConflicts = 1;
constexpr int kExitError = 2;

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out) {
    std::cerr << "supc: cannot write " << path << "\n";
    return false;
  }
  return true;
}

// Returns false (with a message) when SUPC_WORKERS is set but not a
// positive integer; otherwise overrides `workers` if the variable is set.
bool apply_workers_env(unsigned& workers) {
  const char* env = std::getenv("SUPC_WORKERS");
  if (!env) return true;
  std::string_view text(env);
  unsigned value = 0;
  auto [next, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                    value);
  if (ec != std::errc{} || next != text.data() + text.size() || value == 0) {
    std::cerr << "supc: invalid SUPC_WORKERS value '" << text << "'\n";
    return false;
  }
  workers = value;
  return true;
}

struct ComposeArgs {
  std::vector<std::string> fw_files;
  std::vector<std::string> ids_files;
  std::string out_path;
};

int run_compose(const ComposeArgs& args) {
  if (args.fw_files.empty() && args.ids_files.empty()) {
    std::cerr << "supc: compose needs at least one --fw or --ids file\n";
    return kExitError;
  }
  std::vector<supc::SfRule> rules;
  auto ingest = [&](const std::string& path, bool firewall) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "supc: cannot open " << path << "\n";
      return false;
    }
    auto result = firewall ? supc::parse_firewall_file(in, path)
                           : supc::parse_ids_file(in, path);
    for (const auto& diagnostic : result.diagnostics) {
      std::cerr << diagnostic.str() << "\n";
    }
    rules.insert(rules.end(), result.rules.begin(), result.rules.end());
    return true;
  };
  for (const auto& path : args.fw_files) {
    if (!ingest(path, true)) return kExitError;
  }
  for (const auto& path : args.ids_files) {
    if (!ingest(path, false)) return kExitError;
  }
  if (rules.empty()) {
    std::cerr << "supc: no rules composed\n";
    return kExitError;
  }
  supc::FlowTable table = supc::compose(rules);
  if (!write_file(args.out_path, supc::table_to_json_string(table))) {
    return kExitError;
  }
  return kExitOk;
}

struct CheckArgs {
  std::string table_path;
  std::string out_path;
  unsigned workers = 1;
};

int run_check(const CheckArgs& args) {
  unsigned workers = args.workers;
  if (!apply_workers_env(workers)) return kExitError;

  std::ifstream in(args.table_path, std::ios::binary);
  if (!in) {
    std::cerr << "supc: cannot open " << args.table_path << "\n";
    return kExitError;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  supc::FlowTable table;
  try {
    table = supc::table_from_json_string(buffer.str());
  } catch (const std::exception& e) {
    std::cerr << "supc: " << args.table_path << ": " << e.what() << "\n";
    return kExitError;
  }
  supc::ConflictReport report = supc::check_all(table, workers);
  if (!write_file(args.out_path, supc::report_to_json_string(report))) {
    return kExitError;
  }
  return report.conflicts.empty() ? kExitOk : kExitConflicts;
}

struct GenArgs {
  supc::GenSpec spec;
  std::string fw_path;
  std::string ids_path;
};

int run_gen(const GenArgs& args) {
  auto rules = supc::generate(args.spec);
  std::string fw_text, ids_text;
  for (const auto& rule : rules) {
    (rule.kind == supc::SfKind::Firewall ? fw_text : ids_text) +=
        rule.origin.raw + "\n";
  }
  if (!write_file(args.fw_path, fw_text)) return kExitError;
  if (!write_file(args.ids_path, ids_text)) return kExitError;
  return kExitOk;
}

struct BenchArgs {
  supc::GenSpec spec;
  bool json = false;
};

int run_bench_cmd(const BenchArgs& args) {
  unsigned workers = 1;
  if (!apply_workers_env(workers)) return kExitError;
  supc::BenchResult result = supc::run_bench(args.spec, workers);
  std::cout << (args.json ? supc::bench_to_json_string(result)
                          : supc::bench_to_text(result));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  // CLI11 would read "-o-ids x" as "-o -ids"; map the documented spelling
  // onto a regular long option before parsing.
  std::vector<std::string> storage(argv + (argc > 0 ? 1 : 0), argv + argc);
  for (auto& arg : storage) {
    if (arg == "-o-ids") arg = "--o-ids";
  }
  std::vector<char*> args;
  args.push_back(argv[0]);
  for (auto& arg : storage) args.push_back(arg.data());

  CLI::App app{"SF rule composition and conflict analysis"};
  app.require_subcommand(1);

  ComposeArgs compose_args;
  auto* compose_cmd = app.add_subcommand(
      "compose", "Parse SF rule files into a deduplicated flow table");
  compose_cmd->add_option("--fw", compose_args.fw_files,
                          "firewall rule file (repeatable)");
  compose_cmd->add_option("--ids", compose_args.ids_files,
                          "IDS rule file (repeatable)");
  compose_cmd->add_option("-o", compose_args.out_path, "flow table JSON path")
      ->required();

  CheckArgs check_args;
  auto* check_cmd =
      app.add_subcommand("check", "Detect conflicts in a flow table");
  check_cmd->add_option("table", check_args.table_path, "flow table JSON")
      ->required();
  check_cmd->add_option("-o", check_args.out_path, "conflict report path")
      ->required();
  check_cmd->add_option("--workers", check_args.workers,
                        "detection threads (SUPC_WORKERS overrides)");

  GenArgs gen_args;
  auto* gen_cmd =
      app.add_subcommand("gen", "Emit a synthetic rule corpus");
  gen_cmd->add_option("--total", gen_args.spec.total_rules, "total rules")
      ->required();
  gen_cmd->add_option("--distinct", gen_args.spec.distinct_patterns,
                      "distinct (match, action) patterns")
      ->required();
  gen_cmd->add_option("--fw-fraction", gen_args.spec.fw_fraction,
                      "fraction of patterns that are firewall rules");
  gen_cmd->add_option("--seed", gen_args.spec.seed, "RNG seed");
  gen_cmd->add_option("--overlap", gen_args.spec.overlap,
                      "fraction of patterns overlapping earlier ones");
  gen_cmd->add_option("-o", gen_args.fw_path, "firewall rules output path")
      ->required();
  gen_cmd->add_option("--o-ids", gen_args.ids_path, "IDS rules output path")
      ->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Time generate/compose/check on a synthetic corpus");
  bench_cmd->add_option("--total", bench_args.spec.total_rules, "total rules")
      ->required();
  bench_cmd->add_option("--distinct", bench_args.spec.distinct_patterns,
                        "distinct (match, action) patterns")
      ->required();
  bench_cmd->add_option("--seed", bench_args.spec.seed, "RNG seed");
  bench_cmd->add_option("--fw-fraction", bench_args.spec.fw_fraction,
                        "fraction of patterns that are firewall rules");
  bench_cmd->add_option("--overlap", bench_args.spec.overlap,
                        "fraction of patterns overlapping earlier ones");
  bench_cmd->add_flag("--json", bench_args.json, "emit JSON instead of text");

  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (compose_cmd->parsed()) return run_compose(compose_args);
    if (check_cmd->parsed()) return run_check(check_args);
    if (gen_cmd->parsed()) return run_gen(gen_args);
    if (bench_cmd->parsed()) return run_bench_cmd(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "supc: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
