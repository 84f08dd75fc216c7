#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "supc/ingest.hpp"
#include "supc/sf_rule.hpp"

// Seeded synthetic corpus generator. Patterns draw from partitioned /24
// pools (sources from 10.0.0.0/9, destinations from 10.128.0.0/9), so with
// overlap 0 every pattern is pairwise disjoint and a composed table has no
// conflicts. The overlap knob replaces a fraction of patterns' addresses
// with hosts, supernets, or reversed/chained nets of earlier patterns to
// give conflict detection nonzero work.

namespace supc {

struct GenSpec {
  std::size_t total_rules = 0;
  std::size_t distinct_patterns = 0;
  double fw_fraction = 0.5;  // fraction of patterns marked FIREWALL
  std::uint64_t seed = 0;
  double overlap = 0.0;  // fraction of patterns overlapping earlier ones
};

namespace detail {

inline constexpr std::uint32_t kSrcPoolBase = 0x0A000000;  // 10.0.0.0/9
inline constexpr std::uint32_t kDstPoolBase = 0x0A800000;  // 10.128.0.0/9
inline constexpr std::size_t kPoolCapacity = 1u << 15;     // /24 nets per pool

inline Ipv4Prefix src_pool_net(std::size_t k) {
  return Ipv4Prefix(kSrcPoolBase + (static_cast<std::uint32_t>(k) << 8), 24);
}

inline Ipv4Prefix dst_pool_net(std::size_t k) {
  return Ipv4Prefix(kDstPoolBase + (static_cast<std::uint32_t>(k) << 8), 24);
}

}  // namespace detail

/// Produces exactly spec.total_rules rules drawn from exactly
/// spec.distinct_patterns distinct (match, action) patterns, each pattern
/// instantiated at least once. Deterministic for a given spec (seed
/// included). Throws std::domain_error on an infeasible spec.
inline std::vector<SfRule> generate(const GenSpec& spec) {
  if (spec.total_rules == 0 || spec.distinct_patterns == 0) {
    throw std::domain_error("generate: total and distinct must be positive");
  }
  if (spec.distinct_patterns > spec.total_rules) {
    throw std::domain_error(
        "generate: distinct_patterns exceeds total_rules (" +
        std::to_string(spec.distinct_patterns) + " > " +
        std::to_string(spec.total_rules) + ")");
  }
  if (spec.distinct_patterns > detail::kPoolCapacity) {
    throw std::domain_error("generate: at most " +
                            std::to_string(detail::kPoolCapacity) +
                            " distinct patterns are supported");
  }
  if (spec.fw_fraction < 0.0 || spec.fw_fraction > 1.0) {
    throw std::domain_error("generate: fw_fraction must lie in [0, 1]");
  }
  if (spec.overlap < 0.0 || spec.overlap > 1.0) {
    throw std::domain_error("generate: overlap must lie in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  };
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  const std::size_t n_patterns = spec.distinct_patterns;
  const std::size_t n_fw = static_cast<std::size_t>(
      std::lround(spec.fw_fraction * static_cast<double>(n_patterns)));

  struct Pattern {
    SfKind kind;
    MatchSet match;
    Action action;
  };
  std::vector<Pattern> patterns;
  patterns.reserve(n_patterns);
  std::set<std::tuple<MatchSet, Action>> used;

  for (std::size_t k = 0; k < n_patterns; ++k) {
    Pattern p;
    p.kind = k < n_fw ? SfKind::Firewall : SfKind::Ids;

    MatchSet& m = p.match;
    m.proto = ProtoField::exact(chance(0.6) ? Proto::Tcp : Proto::Udp);
    m.l3s = detail::src_pool_net(k);
    m.l3d = detail::dst_pool_net(k);
    if (chance(0.5)) {
      m.l4d = PortField::exact(
          static_cast<std::uint16_t>(1 + pick(65535)));
    }
    if (p.kind == SfKind::Firewall && chance(0.125)) {
      // Locally administered source address derived from the pattern index.
      m.l2s = MacField::exact(0x020000000000ull | k);
    }

    if (p.kind == SfKind::Firewall) {
      p.action = chance(0.5) ? Action::Allow : Action::Deny;
    } else {
      p.action = chance(0.5) ? Action::Inspect
                             : (chance(0.5) ? Action::Allow : Action::Deny);
    }

    if (k > 0 && chance(spec.overlap)) {
      const std::size_t j = pick(k);
      const Pattern& other = patterns[j];
      switch (pick(3)) {
        case 0:  // narrow: a host inside an earlier source net
          m.l3s = Ipv4Prefix::host(other.match.l3s.network() |
                                   static_cast<std::uint32_t>(pick(256)));
          m.l3d = other.match.l3d;
          break;
        case 1:  // widen: the /16 above an earlier source net
          m.l3s = Ipv4Prefix(other.match.l3s.network(), 16);
          m.l3d = other.match.l3d;
          break;
        default:  // reverse: the return direction of an earlier pattern
          m.l3s = other.match.l3d;
          m.l3d = other.match.l3s;
          p.action = Action::Allow;
          break;
      }
    }

    // Distinctness is load-bearing: composed size must equal the pattern
    // count. Collisions (only possible via overlap rewrites) fall back to
    // the pattern's own pool nets, which no rewrite can produce.
    int attempts = 0;
    while (used.count({m, p.action})) {
      if (++attempts > 8) {
        m.l3s = detail::src_pool_net(k);
        m.l3d = detail::dst_pool_net(k);
        m.l4s = PortField::wildcard();
        m.l4d = PortField::wildcard();
      } else {
        m.l4s = PortField::exact(
            static_cast<std::uint16_t>(1 + pick(65535)));
      }
    }
    used.insert({m, p.action});
    patterns.push_back(std::move(p));
  }

  // Every pattern once, the remainder spread uniformly.
  std::vector<std::size_t> instances(n_patterns);
  for (std::size_t k = 0; k < n_patterns; ++k) instances[k] = k;
  for (std::size_t extra = n_patterns; extra < spec.total_rules; ++extra) {
    instances.push_back(pick(n_patterns));
  }
  std::shuffle(instances.begin(), instances.end(), rng);

  std::vector<SfRule> rules;
  rules.reserve(spec.total_rules);
  int fw_line = 0, ids_line = 0;
  for (std::size_t k : instances) {
    const Pattern& p = patterns[k];
    SfRule rule;
    rule.kind = p.kind;
    rule.match = p.match;
    rule.action = p.action;
    if (p.kind == SfKind::Firewall) {
      rule.origin = RuleOrigin{"<gen:firewall>", ++fw_line,
                               render_firewall_line(rule)};
    } else {
      rule.origin = RuleOrigin{
          "<gen:ids>", ++ids_line,
          render_ids_line(rule, "pattern " + std::to_string(k))};
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace supc
