#include <catch2/catch_amalgamated.hpp>

#include "support/golden.hpp"
#include "support/toy.hpp"
#include "supc/conflict.hpp"
#include "supc/json_io.hpp"

using namespace supc;

TEST_CASE("table serialization carries the documented shape") {
  std::istringstream in(
      "-p tcp -s 192.168.1.0/24 -d 192.168.2.20 -j ACCEPT\n");
  auto parsed = parse_firewall_file(in, "one.rules");
  FlowTable table = compose(parsed.rules);
  Json doc = table_to_json(table);

  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 1);
  const Json& rule = doc[0];
  CHECK(rule["id"] == 1);
  CHECK(rule["priority"] == 65535);
  CHECK(rule["action"] == "ALLOW");
  CHECK(rule["match"]["proto"] == "tcp");
  CHECK(rule["match"]["l2s"] == "*");
  CHECK(rule["match"]["l3s"] == "192.168.1.0/24");
  CHECK(rule["match"]["l3d"] == "192.168.2.20/32");
  CHECK(rule["match"]["l4d"] == "*");
  REQUIRE(rule["origins"].size() == 1);
  CHECK(rule["origins"][0]["file"] == "one.rules");
  CHECK(rule["origins"][0]["line"] == 1);
  CHECK(rule["origins"][0]["kind"] == "FIREWALL");

  // key order is part of the format
  std::string text = table_to_json_string(table);
  CHECK(text.find("\"id\"") < text.find("\"priority\""));
  CHECK(text.find("\"priority\"") < text.find("\"match\""));
  CHECK(text.find("\"proto\"") < text.find("\"l2s\""));
  CHECK(text.find("\"match\"") < text.find("\"action\""));
  CHECK(text.find("\"action\"") < text.find("\"origins\""));
  CHECK(text.back() == '\n');
}

TEST_CASE("tables sort by descending priority in serialized form") {
  FlowTable table = golden::make_table();
  Json doc = table_to_json(table);
  for (std::size_t i = 1; i < doc.size(); ++i) {
    CHECK(doc[i - 1]["priority"].get<int>() > doc[i]["priority"].get<int>());
  }
}

TEST_CASE("table round-trips bit-exactly through its serialization") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    FlowTable table = toy::random_table(seed, 80);
    std::string once = table_to_json_string(table);
    FlowTable reloaded = table_from_json_string(once);
    std::string twice = table_to_json_string(reloaded);
    CHECK(once == twice);
    CHECK(reloaded.rules == table.rules);
    CHECK(reloaded.fw_priority_floor == table.fw_priority_floor);
    CHECK(table_fingerprint(reloaded) == table_fingerprint(table));
  }
}

TEST_CASE("table parsing rejects malformed documents") {
  CHECK_THROWS(table_from_json_string("{}"));
  CHECK_THROWS(table_from_json_string("not json"));
  // missing origins
  CHECK_THROWS(table_from_json_string(
      R"([{"id":1,"priority":10,"match":{"proto":"tcp","l2s":"*","l2d":"*",
          "l3s":"*","l3d":"*","l4s":"*","l4d":"*"},"action":"ALLOW",
          "origins":[]}])"));
  // duplicate id
  CHECK_THROWS_WITH(
      table_from_json_string(
          R"([{"id":1,"priority":10,
               "match":{"proto":"tcp","l2s":"*","l2d":"*","l3s":"*","l3d":"*",
                        "l4s":"*","l4d":"*"},
               "action":"ALLOW",
               "origins":[{"file":"a","line":1,"kind":"FIREWALL"}]},
              {"id":1,"priority":9,
               "match":{"proto":"tcp","l2s":"*","l2d":"*","l3s":"*","l3d":"*",
                        "l4s":"*","l4d":"*"},
               "action":"DENY",
               "origins":[{"file":"a","line":2,"kind":"FIREWALL"}]}])"),
      Catch::Matchers::ContainsSubstring("duplicate rule id"));
  // bad priority
  CHECK_THROWS_WITH(
      table_from_json_string(
          R"([{"id":1,"priority":70000,
               "match":{"proto":"tcp","l2s":"*","l2d":"*","l3s":"*","l3d":"*",
                        "l4s":"*","l4d":"*"},
               "action":"ALLOW",
               "origins":[{"file":"a","line":1,"kind":"FIREWALL"}]}])"),
      Catch::Matchers::ContainsSubstring("priority"));
  // bad match field
  CHECK_THROWS_WITH(
      table_from_json_string(
          R"([{"id":1,"priority":10,
               "match":{"proto":"tcp","l2s":"*","l2d":"*","l3s":"512.0.0.1",
                        "l3d":"*","l4s":"*","l4d":"*"},
               "action":"ALLOW",
               "origins":[{"file":"a","line":1,"kind":"FIREWALL"}]}])"),
      Catch::Matchers::ContainsSubstring("IPv4"));
}

TEST_CASE("report serialization carries counts, hash and witnesses") {
  FlowTable table = golden::make_table();
  ConflictReport report = check_all(table);
  Json doc = report_to_json(report);

  CHECK(doc["table_hash"] == table_fingerprint(table));
  CHECK(doc["counts"]["intersection"] == 4);
  CHECK(doc["counts"]["subsumption"] == 4);
  CHECK(doc["counts"]["transitivity"] == 3);
  CHECK(doc["counts"]["symmetry"] == 3);
  REQUIRE(doc["conflicts"].size() == report.conflicts.size());

  const Json& first = doc["conflicts"][0];
  CHECK(first["kind"] == "INTERSECTION");
  CHECK(first["participants"] == Json::array({1, 2}));
  CHECK(first["inferred_match"].is_null());
  CHECK(first["actions_differ"] == false);
  CHECK(first["witness"]["proto"] == "tcp");
  CHECK(first["witness"]["src_mac"] == "00:00:00:00:00:00");
  CHECK(first["witness"]["src_ip"].is_string());
  CHECK(first["witness"]["src_port"].is_number_integer());

  bool saw_inferred = false;
  for (const auto& conflict : doc["conflicts"]) {
    if (conflict["kind"] == "TRANSITIVITY") {
      REQUIRE(conflict["inferred_match"].is_object());
      CHECK(conflict["inferred_match"]["l3d"] == "192.168.3.0/24");
      saw_inferred = true;
    } else {
      CHECK(conflict["inferred_match"].is_null());
    }
  }
  CHECK(saw_inferred);
  CHECK(report_to_json_string(report).back() == '\n');
}

TEST_CASE("fingerprint is stable and content-sensitive") {
  FlowTable table = golden::make_table();
  std::string hash = table_fingerprint(table);
  CHECK(hash.size() == 16);
  CHECK(hash == table_fingerprint(table));

  FlowTable other = table;
  other.rules[0].action = Action::Deny;
  CHECK(table_fingerprint(other) != hash);

  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(to_hex(fnv1a64("a")) == "af63dc4c8601ec8c");
}
