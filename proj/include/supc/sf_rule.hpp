#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "supc/header_space.hpp"

namespace supc {

/// Which service function a rule was written for.
enum class SfKind : std::uint8_t { Firewall, Ids };

inline std::string_view to_string(SfKind k) {
  return k == SfKind::Firewall ? "FIREWALL" : "IDS";
}

inline std::optional<SfKind> sf_kind_from_string(std::string_view s) {
  if (s == "FIREWALL") return SfKind::Firewall;
  if (s == "IDS") return SfKind::Ids;
  return std::nullopt;
}

enum class Action : std::uint8_t { Allow, Deny, Inspect };

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::Allow: return "ALLOW";
    case Action::Deny: return "DENY";
    case Action::Inspect: return "INSPECT";
  }
  return "?";
}

inline std::optional<Action> action_from_string(std::string_view s) {
  if (s == "ALLOW") return Action::Allow;
  if (s == "DENY") return Action::Deny;
  if (s == "INSPECT") return Action::Inspect;
  return std::nullopt;
}

/// Where a rule came from: file, 1-based line, and the verbatim line text.
struct RuleOrigin {
  std::string file;
  int line = 1;
  std::string raw;

  friend auto operator<=>(const RuleOrigin&, const RuleOrigin&) = default;
};

/// Parsed, source-attributed form of one firewall or IDS rule.
struct SfRule {
  SfKind kind = SfKind::Firewall;
  MatchSet match;
  Action action = Action::Allow;
  RuleOrigin origin;

  friend auto operator<=>(const SfRule&, const SfRule&) = default;
};

/// Non-fatal per-line parse problem; rendered as `<file>:<line>: <message>`.
struct ParseDiagnostic {
  std::string file;
  int line = 0;
  std::string message;

  std::string str() const {
    return file + ":" + std::to_string(line) + ": " + message;
  }

  friend auto operator<=>(const ParseDiagnostic&,
                          const ParseDiagnostic&) = default;
};

}  // namespace supc
