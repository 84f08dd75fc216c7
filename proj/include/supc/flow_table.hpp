#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "supc/sf_rule.hpp"

namespace supc {

/// One origin entry of a composed rule (raw text dropped, kind kept).
struct FlowOrigin {
  std::string file;
  int line = 1;
  SfKind kind = SfKind::Firewall;

  friend auto operator<=>(const FlowOrigin&, const FlowOrigin&) = default;
};

/// A composed OpenFlow-style rule: match + action + priority. Higher
/// priority is matched first.
struct FlowRule {
  int id = 0;  // dense 1..n in table order
  MatchSet match;
  Action action = Action::Allow;
  int priority = 1;  // in [1, 65535]
  std::vector<FlowOrigin> origins;

  friend auto operator<=>(const FlowRule&, const FlowRule&) = default;
};

/// Ordered, deduplicated rule table. Rules are stored in descending
/// priority order: the firewall band first, then the IDS band, each in
/// first-occurrence order of the composed input.
struct FlowTable {
  std::vector<FlowRule> rules;
  // Lowest priority actually assigned to a firewall-band rule; empty when
  // the table has no firewall-derived rules.
  std::optional<int> fw_priority_floor;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

inline constexpr int kMaxPriority = 65535;
inline constexpr int kDefaultFwBandFloor = 32768;

/// Implements the one-one SF-rule mapping with deduplication and priority
/// bands. Every distinct (match, action) pair appears exactly once; origins
/// of duplicates are merged onto the first occurrence. Rules with at least
/// one firewall origin land in the [fw_band_floor, 65535] band, pure IDS
/// rules in [1, fw_band_floor-1], so firewall precedence holds by
/// construction. Throws std::length_error when a band runs out of values.
inline FlowTable compose(std::span<const SfRule> input,
                         int fw_band_floor = kDefaultFwBandFloor) {
  if (fw_band_floor < 2 || fw_band_floor > kMaxPriority) {
    throw std::invalid_argument("fw_band_floor out of range [2, 65535]");
  }

  struct Entry {
    MatchSet match;
    Action action;
    std::vector<FlowOrigin> origins;
    bool has_firewall_origin = false;
  };
  std::vector<Entry> entries;
  std::map<std::tuple<MatchSet, Action>, std::size_t> index;

  for (const SfRule& rule : input) {
    auto key = std::make_tuple(rule.match, rule.action);
    auto [it, inserted] = index.try_emplace(key, entries.size());
    if (inserted) {
      entries.push_back(Entry{rule.match, rule.action, {}, false});
    }
    Entry& entry = entries[it->second];
    entry.origins.push_back(
        FlowOrigin{rule.origin.file, rule.origin.line, rule.kind});
    if (rule.kind == SfKind::Firewall) entry.has_firewall_origin = true;
  }

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_partition(order.begin(), order.end(), [&](std::size_t i) {
    return entries[i].has_firewall_origin;
  });

  const std::size_t fw_count = static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(),
      [](const Entry& e) { return e.has_firewall_origin; }));
  const std::size_t ids_count = entries.size() - fw_count;
  const std::size_t fw_capacity =
      static_cast<std::size_t>(kMaxPriority - fw_band_floor + 1);
  const std::size_t ids_capacity = static_cast<std::size_t>(fw_band_floor - 1);
  if (fw_count > fw_capacity) {
    throw std::length_error("firewall priority band exhausted: " +
                            std::to_string(fw_count) + " rules > " +
                            std::to_string(fw_capacity) + " priorities");
  }
  if (ids_count > ids_capacity) {
    throw std::length_error("IDS priority band exhausted: " +
                            std::to_string(ids_count) + " rules > " +
                            std::to_string(ids_capacity) + " priorities");
  }

  FlowTable table;
  table.rules.reserve(entries.size());
  int next_fw = kMaxPriority;
  int next_ids = fw_band_floor - 1;
  for (std::size_t i : order) {
    Entry& entry = entries[i];
    FlowRule rule;
    rule.id = static_cast<int>(table.rules.size()) + 1;
    rule.match = entry.match;
    rule.action = entry.action;
    rule.priority = entry.has_firewall_origin ? next_fw-- : next_ids--;
    rule.origins = std::move(entry.origins);
    table.rules.push_back(std::move(rule));
  }
  if (fw_count > 0) table.fw_priority_floor = next_fw + 1;
  return table;
}

/// Composed-to-input size fraction (e.g. 54/2056 ~ 0.026).
inline double dedup_ratio(std::size_t input_count, const FlowTable& table) {
  if (input_count == 0) {
    throw std::domain_error("dedup_ratio: input_count must be positive");
  }
  if (table.size() > input_count) {
    throw std::invalid_argument(
        "dedup_ratio: table larger than the input it was composed from");
  }
  return static_cast<double>(table.size()) / static_cast<double>(input_count);
}

}  // namespace supc
