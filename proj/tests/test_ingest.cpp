#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "support/toy.hpp"
#include "supc/ingest.hpp"

using namespace supc;

namespace {

ParseResult parse_fw(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_firewall_file(in, "fw.rules");
}

ParseResult parse_ids(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ids_file(in, "ids.rules");
}

}  // namespace

TEST_CASE("firewall line with source network and host destination") {
  auto result =
      parse_fw("-p tcp -s 192.168.1.0/24 -d 192.168.2.20 -j ACCEPT\n");
  REQUIRE(result.diagnostics.empty());
  REQUIRE(result.rules.size() == 1);
  const SfRule& r = result.rules[0];
  CHECK(r.kind == SfKind::Firewall);
  CHECK(r.action == Action::Allow);
  CHECK(to_string(r.match) ==
        "proto=tcp l2s=* l2d=* l3s=192.168.1.0/24 l3d=192.168.2.20/32 "
        "l4s=* l4d=*");
  CHECK(r.origin.file == "fw.rules");
  CHECK(r.origin.line == 1);
}

TEST_CASE("firewall DROP maps to DENY") {
  auto result = parse_fw("-p tcp -s 192.168.1.18 -d 192.168.2.0/24 -j DROP\n");
  REQUIRE(result.rules.size() == 1);
  CHECK(result.rules[0].action == Action::Deny);
}

TEST_CASE("firewall ports and MACs") {
  auto result = parse_fw(
      "-p udp --sport 53 --dport 5353 --mac-source 00:1a:2b:3c:4d:5e "
      "--mac-dest 00:1A:2B:3C:4D:5F -j ACCEPT\n");
  REQUIRE(result.diagnostics.empty());
  REQUIRE(result.rules.size() == 1);
  const MatchSet& m = result.rules[0].match;
  CHECK(m.l4s == PortField::exact(53));
  CHECK(m.l4d == PortField::exact(5353));
  CHECK(m.l2s == MacField::exact(0x001a2b3c4d5eull));
  CHECK(m.l2d == MacField::exact(0x001a2b3c4d5full));
  CHECK(m.l3s.is_wildcard());
  CHECK(m.l3d.is_wildcard());
}

TEST_CASE("firewall diagnostics") {
  SECTION("invalid address") {
    auto result = parse_fw("-p tcp -s bogus -j ACCEPT\n");
    CHECK(result.rules.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].line == 1);
    CHECK(result.diagnostics[0].str() ==
          "fw.rules:1: invalid IPv4/CIDR 'bogus'");
  }
  SECTION("missing target") {
    auto result = parse_fw("-p tcp -s 10.0.0.0/8\n");
    CHECK(result.rules.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].message == "missing -j target");
  }
  SECTION("unknown flag, duplicate flag, bad port, bad target") {
    auto result = parse_fw(
        "-x 1 -j ACCEPT\n"
        "-p tcp -p udp -j ACCEPT\n"
        "--dport 99999 -j ACCEPT\n"
        "-p tcp -j REJECT\n");
    CHECK(result.rules.empty());
    REQUIRE(result.diagnostics.size() == 4);
    CHECK(result.diagnostics[0].message == "unknown flag '-x'");
    CHECK(result.diagnostics[1].message == "duplicate flag '-p'");
    CHECK(result.diagnostics[2].message == "invalid port '99999'");
    CHECK(result.diagnostics[3].message == "unknown target 'REJECT'");
  }
  SECTION("flag without value") {
    auto result = parse_fw("-p tcp -j ACCEPT -s\n");
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].message == "missing value for '-s'");
  }
}

TEST_CASE("malformed lines are skipped, well-formed ones survive in order") {
  auto result = parse_fw(
      "# comment\n"
      "\n"
      "-p tcp -s 10.0.1.0/24 -j ACCEPT\n"
      "-p tcp -s bad -j ACCEPT\r\n"
      "-p udp -s 10.0.2.0/24 -j DROP\r\n");
  REQUIRE(result.rules.size() == 2);
  CHECK(result.rules[0].origin.line == 3);
  CHECK(result.rules[1].origin.line == 5);
  CHECK(result.rules[1].action == Action::Deny);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].line == 4);
}

TEST_CASE("ids alert rule") {
  auto result = parse_ids(
      "alert tcp 192.168.1.0/24 any -> 192.168.2.0/28 443 (msg:\"x\")\n");
  REQUIRE(result.diagnostics.empty());
  REQUIRE(result.rules.size() == 1);
  const SfRule& r = result.rules[0];
  CHECK(r.kind == SfKind::Ids);
  CHECK(r.action == Action::Inspect);
  CHECK(to_string(r.match) ==
        "proto=tcp l2s=* l2d=* l3s=192.168.1.0/24 l3d=192.168.2.0/28 "
        "l4s=* l4d=443");
  CHECK(r.origin.raw ==
        "alert tcp 192.168.1.0/24 any -> 192.168.2.0/28 443 (msg:\"x\")");
}

TEST_CASE("ids pass and drop actions") {
  auto result = parse_ids(
      "pass tcp any any -> any any (msg:\"allow\")\n"
      "drop udp 10.0.0.0/8 53 -> any any (msg:\"deny\")\n");
  REQUIRE(result.rules.size() == 2);
  CHECK(result.rules[0].action == Action::Allow);
  CHECK(result.rules[0].match.l3s.is_wildcard());
  CHECK(result.rules[0].match.l4d.is_wildcard());
  CHECK(result.rules[1].action == Action::Deny);
  CHECK(result.rules[1].match.l4s == PortField::exact(53));
  CHECK(result.rules[1].match.proto == ProtoField::exact(Proto::Udp));
}

TEST_CASE("ids diagnostics") {
  auto result = parse_ids(
      "alert tcp any any <> any any (msg:\"bidir\")\n"
      "block tcp any any -> any any (msg:\"action\")\n"
      "alert tcp any any -> any (msg:\"short\")\n"
      "alert tcp any any -> any any (msg:\"unterminated\"\n"
      "alert gre any any -> any any (msg:\"proto\")\n");
  CHECK(result.rules.empty());
  REQUIRE(result.diagnostics.size() == 5);
  CHECK(result.diagnostics[0].message ==
        "bidirectional operator '<>' is not supported");
  CHECK(result.diagnostics[1].message == "unknown action 'block'");
  CHECK(result.diagnostics[2].message ==
        "malformed rule header (expected: action proto src sport -> dst "
        "dport)");
  CHECK(result.diagnostics[3].message == "unterminated option list");
  CHECK(result.diagnostics[4].message == "unknown protocol 'gre'");
}

TEST_CASE("parsed ids rules never carry MAC fields") {
  auto result = parse_ids(
      "alert tcp 10.1.2.3 any -> 10.9.0.17 80 (msg:\"a\")\n"
      "pass udp any 53 -> 10.0.0.0/8 any (msg:\"b\")\n");
  for (const auto& rule : result.rules) {
    CHECK(rule.match.l2s.is_wildcard());
    CHECK(rule.match.l2d.is_wildcard());
  }
}

TEST_CASE("origin round-trip: re-parsing the recorded raw text reproduces "
          "the rule") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    SfRule rule = toy::random_rule(rng, 1);
    std::string line;
    ParseResult reparsed;
    if (rule.kind == SfKind::Firewall) {
      // the firewall grammar has no INSPECT and no wildcard-proto issue
      if (rule.action == Action::Inspect) rule.action = Action::Deny;
      line = render_firewall_line(rule);
      reparsed = parse_fw(line + "\n");
    } else {
      if (rule.match.proto.is_wildcard()) {
        rule.match.proto = ProtoField::exact(Proto::Tcp);
      }
      line = render_ids_line(rule, "roundtrip");
      reparsed = parse_ids(line + "\n");
    }
    CAPTURE(line);
    REQUIRE(reparsed.diagnostics.empty());
    REQUIRE(reparsed.rules.size() == 1);
    CHECK(reparsed.rules[0].kind == rule.kind);
    CHECK(reparsed.rules[0].action == rule.action);
    CHECK(reparsed.rules[0].match == rule.match);
  }
}

TEST_CASE("parse order equals input order") {
  auto result = parse_fw(
      "-p tcp -s 10.0.3.0/24 -j ACCEPT\n"
      "-p tcp -s 10.0.1.0/24 -j ACCEPT\n"
      "-p tcp -s 10.0.2.0/24 -j ACCEPT\n");
  REQUIRE(result.rules.size() == 3);
  CHECK(result.rules[0].match.l3s == *parse_prefix("10.0.3.0/24"));
  CHECK(result.rules[1].match.l3s == *parse_prefix("10.0.1.0/24"));
  CHECK(result.rules[2].match.l3s == *parse_prefix("10.0.2.0/24"));
}
