#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "supc/sf_rule.hpp"

// Parsers for the two supported rule file formats, one rule per line:
//
//   firewall (Netfilter-style flags):
//     -p tcp -s 192.168.1.0/24 -d 192.168.2.20 --dport 443 -j ACCEPT
//   IDS (Snort-style header):
//     alert tcp 192.168.1.0/24 any -> 192.168.2.0/28 443 (msg:"...")
//
// Blank lines and `#` comments are skipped. Malformed lines are reported as
// diagnostics and skipped; only an unreadable stream is fatal.

namespace supc {

struct ParseResult {
  std::vector<SfRule> rules;
  std::vector<ParseDiagnostic> diagnostics;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::string quoted(std::string_view s) {
  return "'" + std::string(s) + "'";
}

// Parses one firewall line into `rule`; returns false with `error` set on
// any syntax problem.
inline bool parse_firewall_line(std::string_view line, SfRule& rule,
                                std::string& error) {
  rule = SfRule{};
  rule.kind = SfKind::Firewall;
  bool have_action = false;
  bool seen_proto = false, seen_src = false, seen_dst = false;
  bool seen_sport = false, seen_dport = false;
  bool seen_mac_src = false, seen_mac_dst = false;

  auto tokens = split_ws(line);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string_view flag = tokens[i];
    if (i + 1 >= tokens.size()) {
      error = "missing value for " + quoted(flag);
      return false;
    }
    std::string_view value = tokens[++i];

    auto mark_once = [&](bool& seen) {
      if (seen) {
        error = "duplicate flag " + quoted(flag);
        return false;
      }
      seen = true;
      return true;
    };

    if (flag == "-p") {
      if (!mark_once(seen_proto)) return false;
      auto proto = proto_from_string(value);
      if (!proto) {
        error = "unknown protocol " + quoted(value);
        return false;
      }
      rule.match.proto = ProtoField::exact(*proto);
    } else if (flag == "-s" || flag == "-d") {
      if (!mark_once(flag == "-s" ? seen_src : seen_dst)) return false;
      auto prefix = parse_prefix(value);
      if (!prefix) {
        error = "invalid IPv4/CIDR " + quoted(value);
        return false;
      }
      (flag == "-s" ? rule.match.l3s : rule.match.l3d) = *prefix;
    } else if (flag == "--sport" || flag == "--dport") {
      if (!mark_once(flag == "--sport" ? seen_sport : seen_dport)) return false;
      auto port = parse_port(value);
      if (!port) {
        error = "invalid port " + quoted(value);
        return false;
      }
      (flag == "--sport" ? rule.match.l4s : rule.match.l4d) =
          PortField::exact(*port);
    } else if (flag == "--mac-source" || flag == "--mac-dest") {
      if (!mark_once(flag == "--mac-source" ? seen_mac_src : seen_mac_dst)) {
        return false;
      }
      auto mac = parse_mac(value);
      if (!mac) {
        error = "invalid MAC address " + quoted(value);
        return false;
      }
      (flag == "--mac-source" ? rule.match.l2s : rule.match.l2d) =
          MacField::exact(*mac);
    } else if (flag == "-j") {
      if (have_action) {
        error = "duplicate flag '-j'";
        return false;
      }
      have_action = true;
      if (value == "ACCEPT") {
        rule.action = Action::Allow;
      } else if (value == "DROP") {
        rule.action = Action::Deny;
      } else {
        error = "unknown target " + quoted(value);
        return false;
      }
    } else {
      error = "unknown flag " + quoted(flag);
      return false;
    }
  }
  if (!have_action) {
    error = "missing -j target";
    return false;
  }
  return true;
}

inline bool parse_ids_endpoint(std::string_view ip_token,
                               std::string_view port_token, Ipv4Prefix& ip,
                               PortField& port, std::string& error) {
  if (ip_token == "any") {
    ip = Ipv4Prefix::wildcard();
  } else {
    auto prefix = parse_prefix(ip_token);
    if (!prefix) {
      error = "invalid IPv4/CIDR " + quoted(ip_token);
      return false;
    }
    ip = *prefix;
  }
  if (port_token == "any") {
    port = PortField::wildcard();
  } else {
    auto value = parse_port(port_token);
    if (!value) {
      error = "invalid port " + quoted(port_token);
      return false;
    }
    port = PortField::exact(*value);
  }
  return true;
}

inline bool parse_ids_line(std::string_view line, SfRule& rule,
                           std::string& error) {
  rule = SfRule{};
  rule.kind = SfKind::Ids;

  // Split off the option parenthetical; it is kept only in the raw text.
  std::string_view header = line;
  auto paren = line.find('(');
  if (paren != std::string_view::npos) {
    header = line.substr(0, paren);
    std::string_view options = trim(line.substr(paren));
    if (options.back() != ')') {
      error = "unterminated option list";
      return false;
    }
  }

  auto tokens = split_ws(header);
  if (tokens.size() != 7) {
    error = "malformed rule header (expected: action proto src sport -> dst "
            "dport)";
    return false;
  }

  if (tokens[0] == "alert") {
    rule.action = Action::Inspect;
  } else if (tokens[0] == "drop") {
    rule.action = Action::Deny;
  } else if (tokens[0] == "pass") {
    rule.action = Action::Allow;
  } else {
    error = "unknown action " + quoted(tokens[0]);
    return false;
  }

  auto proto = proto_from_string(tokens[1]);
  if (!proto) {
    error = "unknown protocol " + quoted(tokens[1]);
    return false;
  }
  rule.match.proto = ProtoField::exact(*proto);

  if (tokens[4] == "<>") {
    error = "bidirectional operator '<>' is not supported";
    return false;
  }
  if (tokens[4] != "->") {
    error = "expected '->' direction operator, got " + quoted(tokens[4]);
    return false;
  }

  return parse_ids_endpoint(tokens[2], tokens[3], rule.match.l3s,
                            rule.match.l4s, error) &&
         parse_ids_endpoint(tokens[5], tokens[6], rule.match.l3d,
                            rule.match.l4d, error);
}

template <typename LineParser>
ParseResult parse_lines(std::istream& in, std::string_view name,
                        LineParser parse_line) {
  ParseResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;

    SfRule rule;
    std::string error;
    if (parse_line(text, rule, error)) {
      rule.origin = RuleOrigin{std::string(name), line_no, std::string(text)};
      result.rules.push_back(std::move(rule));
    } else {
      result.diagnostics.push_back(
          ParseDiagnostic{std::string(name), line_no, std::move(error)});
    }
  }
  if (in.bad()) {
    throw std::runtime_error("I/O error while reading " + std::string(name));
  }
  return result;
}

}  // namespace detail

/// Parses Netfilter-style firewall rules. Throws std::runtime_error only on
/// stream failure; per-line problems come back as diagnostics.
inline ParseResult parse_firewall_file(std::istream& in,
                                       std::string_view name) {
  return detail::parse_lines(in, name, detail::parse_firewall_line);
}

/// Parses Snort-style IDS rules. MAC fields are always wildcard here: the
/// grammar has no hardware-address syntax.
inline ParseResult parse_ids_file(std::istream& in, std::string_view name) {
  return detail::parse_lines(in, name, detail::parse_ids_line);
}

// ---------------------------------------------------------------------------
// Renderers (inverse of the parsers; used by the synthetic generator)

/// Renders a firewall rule in the input grammar. The rule's action must be
/// ALLOW or DENY; the grammar has no inspect target.
inline std::string render_firewall_line(const SfRule& rule) {
  std::string out;
  const MatchSet& m = rule.match;
  if (!m.proto.is_wildcard()) {
    out += "-p " + to_string(m.proto) + " ";
  }
  if (!m.l3s.is_wildcard()) out += "-s " + to_string(m.l3s) + " ";
  if (!m.l3d.is_wildcard()) out += "-d " + to_string(m.l3d) + " ";
  if (!m.l4s.is_wildcard()) out += "--sport " + to_string(m.l4s) + " ";
  if (!m.l4d.is_wildcard()) out += "--dport " + to_string(m.l4d) + " ";
  if (!m.l2s.is_wildcard()) out += "--mac-source " + to_string(m.l2s) + " ";
  if (!m.l2d.is_wildcard()) out += "--mac-dest " + to_string(m.l2d) + " ";
  out += rule.action == Action::Allow ? "-j ACCEPT" : "-j DROP";
  return out;
}

/// Renders an IDS rule in the input grammar. The match must carry a concrete
/// protocol and wildcard MACs, as every parsed IDS rule does.
inline std::string render_ids_line(const SfRule& rule, std::string_view msg) {
  const MatchSet& m = rule.match;
  std::string out;
  switch (rule.action) {
    case Action::Allow: out = "pass"; break;
    case Action::Deny: out = "drop"; break;
    case Action::Inspect: out = "alert"; break;
  }
  auto endpoint = [](const Ipv4Prefix& ip, PortField port) {
    std::string s = ip.is_wildcard() ? "any" : to_string(ip);
    s += " ";
    s += port.is_wildcard() ? "any" : to_string(port);
    return s;
  };
  out += " " + to_string(m.proto);
  out += " " + endpoint(m.l3s, m.l4s);
  out += " -> " + endpoint(m.l3d, m.l4d);
  out += " (msg:\"" + std::string(msg) + "\")";
  return out;
}

}  // namespace supc
