#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "supc/flow_table.hpp"
#include "supc/json_io.hpp"

// Classifies inter-rule conflicts in a composed flow table:
//
//   INTERSECTION  two rules whose match sets partially overlap
//   SUBSUMPTION   one rule's match set contained in another's (incl. equal)
//   TRANSITIVITY  two chained ALLOW rules imply an end-to-end flow that an
//                 explicit non-ALLOW rule contradicts
//   SYMMETRY      a non-ALLOW rule overlaps the return leg of a
//                 bidirectional ALLOW pair
//
// Every conflict carries a concrete witness header inside the overlap it
// reports. Priorities play no part in classification.

namespace supc {

enum class ConflictKind : std::uint8_t {
  Intersection,
  Subsumption,
  Transitivity,
  Symmetry,
};

inline std::string_view to_string(ConflictKind k) {
  switch (k) {
    case ConflictKind::Intersection: return "INTERSECTION";
    case ConflictKind::Subsumption: return "SUBSUMPTION";
    case ConflictKind::Transitivity: return "TRANSITIVITY";
    case ConflictKind::Symmetry: return "SYMMETRY";
  }
  return "?";
}

struct Conflict {
  ConflictKind kind = ConflictKind::Intersection;
  // Rule ids: (i, j) for pairwise kinds; (i, j, m) for TRANSITIVITY (the two
  // chained rules and the contradicted rule) and SYMMETRY (the forward and
  // return rules and the rule breaking the return leg).
  std::vector<int> participants;
  std::optional<MatchSet> inferred_match;  // TRANSITIVITY only
  PacketHeader witness;
  bool actions_differ = false;

  friend auto operator<=>(const Conflict&, const Conflict&) = default;
};

struct ConflictCounts {
  std::size_t intersection = 0;
  std::size_t subsumption = 0;
  std::size_t transitivity = 0;
  std::size_t symmetry = 0;

  std::size_t total() const {
    return intersection + subsumption + transitivity + symmetry;
  }

  friend auto operator<=>(const ConflictCounts&,
                          const ConflictCounts&) = default;
};

struct ConflictReport {
  std::string table_hash;
  std::vector<Conflict> conflicts;  // sorted by (kind, participants)
  ConflictCounts counts;
};

namespace detail {

inline bool conflict_order(const Conflict& a, const Conflict& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.participants < b.participants;
}

// Runs row_fn(i, sink) for every i in [0, n), round-robin across `workers`
// threads, and concatenates the per-worker sinks in worker order. The
// caller sorts; the final output is therefore independent of partitioning.
template <typename RowFn>
std::vector<Conflict> scan_rows(std::size_t n, unsigned workers,
                                RowFn row_fn) {
  if (workers <= 1 || n < 2) {
    std::vector<Conflict> out;
    for (std::size_t i = 0; i < n; ++i) row_fn(i, out);
    return out;
  }
  std::vector<std::vector<Conflict>> parts(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) row_fn(i, parts[w]);
    });
  }
  for (auto& t : threads) t.join();
  std::vector<Conflict> out;
  for (auto& part : parts) {
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline void pairwise_row(const FlowTable& table, std::size_t i,
                         std::vector<Conflict>& out) {
  const auto& rules = table.rules;
  const FlowRule& a = rules[i];
  for (std::size_t j = i + 1; j < rules.size(); ++j) {
    const FlowRule& b = rules[j];
    const bool a_in_b = is_subset(a.match, b.match);
    const bool b_in_a = is_subset(b.match, a.match);
    Conflict c;
    if (a_in_b || b_in_a) {
      c.kind = ConflictKind::Subsumption;
      c.witness = pick_witness(a_in_b ? a.match : b.match);
    } else {
      auto overlap = intersect(a.match, b.match);
      if (!overlap) continue;
      c.kind = ConflictKind::Intersection;
      c.witness = pick_witness(*overlap);
    }
    c.participants = {a.id, b.id};
    c.actions_differ = a.action != b.action;
    out.push_back(std::move(c));
  }
}

inline void transitivity_row(const FlowTable& table, std::size_t i,
                             std::vector<Conflict>& out) {
  const auto& rules = table.rules;
  const FlowRule& first = rules[i];
  if (first.action != Action::Allow) return;
  for (std::size_t j = 0; j < rules.size(); ++j) {
    if (j == i) continue;
    const FlowRule& second = rules[j];
    if (second.action != Action::Allow) continue;
    auto proto = intersect(first.match.proto, second.match.proto);
    if (!proto) continue;
    // Chaining point: the first rule's destination network must reach the
    // second rule's source network.
    if (!intersect(first.match.l3d, second.match.l3s)) continue;

    const MatchSet inferred{*proto,           first.match.l2s,
                            second.match.l2d, first.match.l3s,
                            second.match.l3d, first.match.l4s,
                            second.match.l4d};
    for (std::size_t m = 0; m < rules.size(); ++m) {
      if (m == i || m == j) continue;
      const FlowRule& existing = rules[m];
      if (existing.action == Action::Allow) continue;
      auto overlap = intersect(inferred, existing.match);
      if (!overlap) continue;
      Conflict c;
      c.kind = ConflictKind::Transitivity;
      c.participants = {first.id, second.id, existing.id};
      c.inferred_match = inferred;
      c.witness = pick_witness(*overlap);
      c.actions_differ = true;
      out.push_back(std::move(c));
    }
  }
}

inline void symmetry_row(const FlowTable& table, std::size_t i,
                         std::vector<Conflict>& out) {
  const auto& rules = table.rules;
  const FlowRule& forward = rules[i];
  if (forward.action != Action::Allow) return;
  const MatchSet forward_reversed = reversed(forward.match);
  for (std::size_t j = i + 1; j < rules.size(); ++j) {
    const FlowRule& back = rules[j];
    if (back.action != Action::Allow) continue;
    if (!intersect(forward_reversed, back.match)) continue;
    // (forward, back) carry a bidirectional session. Any non-ALLOW rule
    // overlapping the return leg breaks it.
    for (std::size_t m = 0; m < rules.size(); ++m) {
      if (m == i || m == j) continue;
      const FlowRule& breaker = rules[m];
      if (breaker.action == Action::Allow) continue;
      auto overlap = intersect(breaker.match, back.match);
      if (!overlap) continue;
      Conflict c;
      c.kind = ConflictKind::Symmetry;
      c.participants = {forward.id, back.id, breaker.id};
      c.witness = pick_witness(*overlap);
      c.actions_differ = true;
      out.push_back(std::move(c));
    }
  }
}

template <typename RowFn>
std::vector<Conflict> scan_sorted(const FlowTable& table, unsigned workers,
                                  RowFn row_fn) {
  auto out = scan_rows(
      table.rules.size(), workers,
      [&](std::size_t i, std::vector<Conflict>& sink) {
        row_fn(table, i, sink);
      });
  std::sort(out.begin(), out.end(), conflict_order);
  return out;
}

}  // namespace detail

/// Pairwise classification: a subset relation in either direction (equal
/// matches included) is SUBSUMPTION; any remaining nonempty overlap is
/// INTERSECTION. At most one conflict per unordered pair.
inline std::vector<Conflict> detect_pairwise(const FlowTable& table,
                                             unsigned workers = 1) {
  return detail::scan_sorted(table, workers, detail::pairwise_row);
}

/// Single-hop inference: for every ordered ALLOW pair whose L3
/// destination/source overlap with a compatible protocol, builds the
/// end-to-end inferred rule and reports every non-ALLOW rule it overlaps.
inline std::vector<Conflict> detect_transitivity(const FlowTable& table,
                                                 unsigned workers = 1) {
  return detail::scan_sorted(table, workers, detail::transitivity_row);
}

/// Bidirectional pairs: for every unordered ALLOW pair whose reversed first
/// match overlaps the second, reports every non-ALLOW rule overlapping the
/// return leg.
inline std::vector<Conflict> detect_symmetry(const FlowTable& table,
                                             unsigned workers = 1) {
  return detail::scan_sorted(table, workers, detail::symmetry_row);
}

/// Runs all three detectors and assembles the deterministic report:
/// conflicts sorted by (kind, participants), per-kind counts, and the
/// fingerprint of the analyzed table. Output is identical for any worker
/// count.
inline ConflictReport check_all(const FlowTable& table, unsigned workers = 1) {
  ConflictReport report;
  report.table_hash = table_fingerprint(table);

  auto pairwise = detect_pairwise(table, workers);
  auto transitive = detect_transitivity(table, workers);
  auto symmetric = detect_symmetry(table, workers);
  report.conflicts.reserve(pairwise.size() + transitive.size() +
                           symmetric.size());
  auto append = [&](std::vector<Conflict>& v) {
    report.conflicts.insert(report.conflicts.end(),
                            std::make_move_iterator(v.begin()),
                            std::make_move_iterator(v.end()));
  };
  append(pairwise);
  append(transitive);
  append(symmetric);
  std::sort(report.conflicts.begin(), report.conflicts.end(),
            detail::conflict_order);

  for (const Conflict& c : report.conflicts) {
    switch (c.kind) {
      case ConflictKind::Intersection: ++report.counts.intersection; break;
      case ConflictKind::Subsumption: ++report.counts.subsumption; break;
      case ConflictKind::Transitivity: ++report.counts.transitivity; break;
      case ConflictKind::Symmetry: ++report.counts.symmetry; break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization

inline Json header_to_json(const PacketHeader& h) {
  return Json{{"src_mac", format_mac(h.src_mac)},
              {"dst_mac", format_mac(h.dst_mac)},
              {"src_ip", format_ipv4(h.src_ip)},
              {"dst_ip", format_ipv4(h.dst_ip)},
              {"src_port", h.src_port},
              {"dst_port", h.dst_port},
              {"proto", to_string(h.proto)}};
}

inline Json report_to_json(const ConflictReport& report) {
  Json conflicts = Json::array();
  for (const Conflict& c : report.conflicts) {
    conflicts.push_back(
        Json{{"kind", to_string(c.kind)},
             {"participants", c.participants},
             {"inferred_match", c.inferred_match
                                    ? match_to_json(*c.inferred_match)
                                    : Json(nullptr)},
             {"witness", header_to_json(c.witness)},
             {"actions_differ", c.actions_differ}});
  }
  return Json{{"table_hash", report.table_hash},
              {"counts",
               Json{{"intersection", report.counts.intersection},
                    {"subsumption", report.counts.subsumption},
                    {"transitivity", report.counts.transitivity},
                    {"symmetry", report.counts.symmetry}}},
              {"conflicts", std::move(conflicts)}};
}

inline std::string report_to_json_string(const ConflictReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

}  // namespace supc
