#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "supc/conflict.hpp"
#include "supc/flow_table.hpp"
#include "supc/generate.hpp"

namespace supc {

struct BenchResult {
  std::size_t input_rule_count = 0;
  std::size_t composed_rule_count = 0;
  double compose_ms = 0.0;
  double check_ms = 0.0;
  ConflictCounts counts;
};

/// generate -> compose -> check_all, wall-clock timed around the pure
/// pipeline stages (generation and I/O excluded).
inline BenchResult run_bench(const GenSpec& spec, unsigned workers = 1) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start)
        .count();
  };

  const auto rules = generate(spec);

  const auto compose_start = clock::now();
  const FlowTable table = compose(rules);
  const double compose_ms = ms_since(compose_start);

  const auto check_start = clock::now();
  const ConflictReport report = check_all(table, workers);
  const double check_ms = ms_since(check_start);

  BenchResult result;
  result.input_rule_count = rules.size();
  result.composed_rule_count = table.size();
  result.compose_ms = compose_ms;
  result.check_ms = check_ms;
  result.counts = report.counts;
  return result;
}

inline Json bench_to_json(const BenchResult& r) {
  return Json{{"input_rule_count", r.input_rule_count},
              {"composed_rule_count", r.composed_rule_count},
              {"compose_ms", r.compose_ms},
              {"check_ms", r.check_ms},
              {"counts",
               Json{{"intersection", r.counts.intersection},
                    {"subsumption", r.counts.subsumption},
                    {"transitivity", r.counts.transitivity},
                    {"symmetry", r.counts.symmetry}}}};
}

inline std::string bench_to_json_string(const BenchResult& r) {
  return bench_to_json(r).dump(2) + "\n";
}

inline std::string bench_to_text(const BenchResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "input rules     %zu\n"
                "composed rules  %zu\n"
                "compose time    %.3f ms\n"
                "check time      %.3f ms\n"
                "conflicts       intersection=%zu subsumption=%zu "
                "transitivity=%zu symmetry=%zu\n",
                r.input_rule_count, r.composed_rule_count, r.compose_ms,
                r.check_ms, r.counts.intersection, r.counts.subsumption,
                r.counts.transitivity, r.counts.symmetry);
  return buf;
}

}  // namespace supc
