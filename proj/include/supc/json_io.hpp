#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "supc/flow_table.hpp"

namespace supc {

using Json = nlohmann::ordered_json;

inline Json match_to_json(const MatchSet& m) {
  return Json{{"proto", to_string(m.proto)}, {"l2s", to_string(m.l2s)},
              {"l2d", to_string(m.l2d)},     {"l3s", to_string(m.l3s)},
              {"l3d", to_string(m.l3d)},     {"l4s", to_string(m.l4s)},
              {"l4d", to_string(m.l4d)}};
}

namespace detail {

[[noreturn]] inline void bad_field(std::string_view what,
                                   const std::string& value) {
  throw std::runtime_error("invalid " + std::string(what) + " '" + value +
                           "'");
}

inline std::string get_string(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw std::runtime_error(std::string("missing or non-string field \"") +
                             key + "\"");
  }
  return obj[key].get<std::string>();
}

inline ProtoField proto_field_from_text(const std::string& s) {
  if (s == "*") return ProtoField::wildcard();
  auto proto = proto_from_string(s);
  if (!proto) bad_field("protocol", s);
  return ProtoField::exact(*proto);
}

inline MacField mac_field_from_text(const std::string& s) {
  if (s == "*") return MacField::wildcard();
  auto mac = parse_mac(s);
  if (!mac) bad_field("MAC address", s);
  return MacField::exact(*mac);
}

inline Ipv4Prefix prefix_from_text(const std::string& s) {
  auto prefix = parse_prefix(s);  // parse_prefix already accepts "*"
  if (!prefix) bad_field("IPv4/CIDR", s);
  return *prefix;
}

inline PortField port_field_from_text(const std::string& s) {
  if (s == "*") return PortField::wildcard();
  auto port = parse_port(s);
  if (!port) bad_field("port", s);
  return PortField::exact(*port);
}

}  // namespace detail

inline MatchSet match_from_json(const Json& obj) {
  MatchSet m;
  m.proto = detail::proto_field_from_text(detail::get_string(obj, "proto"));
  m.l2s = detail::mac_field_from_text(detail::get_string(obj, "l2s"));
  m.l2d = detail::mac_field_from_text(detail::get_string(obj, "l2d"));
  m.l3s = detail::prefix_from_text(detail::get_string(obj, "l3s"));
  m.l3d = detail::prefix_from_text(detail::get_string(obj, "l3d"));
  m.l4s = detail::port_field_from_text(detail::get_string(obj, "l4s"));
  m.l4d = detail::port_field_from_text(detail::get_string(obj, "l4d"));
  return m;
}

inline Json table_to_json(const FlowTable& table) {
  Json rules = Json::array();
  for (const FlowRule& rule : table.rules) {
    Json origins = Json::array();
    for (const FlowOrigin& origin : rule.origins) {
      origins.push_back(Json{{"file", origin.file},
                             {"line", origin.line},
                             {"kind", to_string(origin.kind)}});
    }
    rules.push_back(Json{{"id", rule.id},
                         {"priority", rule.priority},
                         {"match", match_to_json(rule.match)},
                         {"action", to_string(rule.action)},
                         {"origins", std::move(origins)}});
  }
  return rules;
}

/// Canonical table serialization: two-space indent plus trailing newline.
inline std::string table_to_json_string(const FlowTable& table) {
  return table_to_json(table).dump(2) + "\n";
}

/// Parses and validates a serialized FlowTable. Throws std::runtime_error
/// (or nlohmann::json::exception) on malformed input.
inline FlowTable table_from_json(const Json& doc) {
  if (!doc.is_array()) {
    throw std::runtime_error("flow table JSON must be an array of rules");
  }
  FlowTable table;
  std::vector<bool> seen;
  for (const Json& entry : doc) {
    FlowRule rule;
    if (!entry.contains("id") || !entry["id"].is_number_integer()) {
      throw std::runtime_error("rule missing integer \"id\"");
    }
    rule.id = entry["id"].get<int>();
    if (rule.id < 1) throw std::runtime_error("rule id must be >= 1");
    if (!entry.contains("priority") ||
        !entry["priority"].is_number_integer()) {
      throw std::runtime_error("rule missing integer \"priority\"");
    }
    rule.priority = entry["priority"].get<int>();
    if (rule.priority < 1 || rule.priority > kMaxPriority) {
      throw std::runtime_error("rule priority out of range [1, 65535]");
    }
    if (!entry.contains("match") || !entry["match"].is_object()) {
      throw std::runtime_error("rule missing \"match\" object");
    }
    rule.match = match_from_json(entry["match"]);
    auto action = action_from_string(detail::get_string(entry, "action"));
    if (!action) {
      throw std::runtime_error("unknown action '" +
                               detail::get_string(entry, "action") + "'");
    }
    rule.action = *action;
    if (!entry.contains("origins") || !entry["origins"].is_array() ||
        entry["origins"].empty()) {
      throw std::runtime_error("rule missing nonempty \"origins\" array");
    }
    for (const Json& origin : entry["origins"]) {
      FlowOrigin o;
      o.file = detail::get_string(origin, "file");
      if (!origin.contains("line") || !origin["line"].is_number_integer()) {
        throw std::runtime_error("origin missing integer \"line\"");
      }
      o.line = origin["line"].get<int>();
      auto kind = sf_kind_from_string(detail::get_string(origin, "kind"));
      if (!kind) {
        throw std::runtime_error("unknown origin kind '" +
                                 detail::get_string(origin, "kind") + "'");
      }
      o.kind = *kind;
      rule.origins.push_back(std::move(o));
    }

    if (static_cast<std::size_t>(rule.id) > seen.size()) {
      seen.resize(rule.id, false);
    }
    if (seen[rule.id - 1]) {
      throw std::runtime_error("duplicate rule id " + std::to_string(rule.id));
    }
    seen[rule.id - 1] = true;

    bool fw = std::any_of(rule.origins.begin(), rule.origins.end(),
                          [](const FlowOrigin& o) {
                            return o.kind == SfKind::Firewall;
                          });
    if (fw && (!table.fw_priority_floor ||
               rule.priority < *table.fw_priority_floor)) {
      table.fw_priority_floor = rule.priority;
    }
    table.rules.push_back(std::move(rule));
  }
  return table;
}

inline FlowTable table_from_json_string(std::string_view text) {
  return table_from_json(Json::parse(text));
}

// ---------------------------------------------------------------------------
// Content fingerprint

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

/// Hash of the canonical serialization; identifies the analyzed table in
/// conflict reports.
inline std::string table_fingerprint(const FlowTable& table) {
  return to_hex(fnv1a64(table_to_json_string(table)));
}

}  // namespace supc
