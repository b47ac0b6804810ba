#include <doctest.h>

#include <string>
#include <vector>

#include "metaweave/csv.hpp"
#include "metaweave/errors.hpp"
#include "metaweave/toml.hpp"

using namespace metaweave;

TEST_CASE("csv parses plain rows") {
    const csv::Table t = csv::parse("a,b,c\n1,2,3\n4,5,6\n");
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1] == std::vector<std::string>{"4", "5", "6"});
}

TEST_CASE("csv handles quoting") {
    const csv::Table t = csv::parse("name,note\n\"Smith, A.\",\"says \"\"hi\"\"\"\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "Smith, A.");
    CHECK(t.rows[0][1] == "says \"hi\"");
}

TEST_CASE("csv handles embedded newlines and CRLF line endings") {
    const csv::Table t = csv::parse("a,b\r\n\"line1\nline2\",x\r\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "line1\nline2");
    CHECK(t.rows[0][1] == "x");
}

TEST_CASE("csv without trailing newline keeps the last row") {
    const csv::Table t = csv::parse("a,b\n1,2");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "2");
}

TEST_CASE("csv rejects an unterminated quote") {
    CHECK_THROWS_AS(csv::parse("a,b\n\"oops,2\n"), InputError);
}

TEST_CASE("csv writer quotes only when needed and round-trips") {
    csv::Table t;
    t.header = {"k", "v"};
    t.rows = {{"plain", "a,b"}, {"quote\"inside", "multi\nline"}};
    const std::string text = csv::write(t);
    CHECK(text == "k,v\nplain,\"a,b\"\n\"quote\"\"inside\",\"multi\nline\"\n");
    const csv::Table back = csv::parse(text);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
}

TEST_CASE("toml parses tables with typed values") {
    const std::string text =
        "# top comment\n"
        "[columns]\n"
        "study_id = \"study\"  # trailing comment\n"
        "yi = \"effect\"\n"
        "count = 12\n"
        "rho = 0.5\n"
        "enabled = true\n"
        "moderators = [\"biome\", \"taxon\"]\n"
        "\n"
        "[other]\n"
        "x = -3.5\n";
    const toml::Document doc = toml::parse(text);
    REQUIRE(doc.tables.count("columns") == 1);
    const toml::TableData& cols = doc.tables.at("columns");
    CHECK(cols.at("study_id").as_string() == "study");
    CHECK(cols.at("count").as_integer() == 12);
    CHECK(cols.at("rho").as_number() == doctest::Approx(0.5));
    CHECK(cols.at("enabled").type == toml::Value::Type::Boolean);
    CHECK(cols.at("moderators").as_string_array() ==
          std::vector<std::string>{"biome", "taxon"});
    CHECK(doc.tables.at("other").at("x").as_number() == doctest::Approx(-3.5));
}

TEST_CASE("toml supports multi-line arrays and escapes") {
    const std::string text =
        "[t]\n"
        "names = [\n"
        "  \"a\\\"b\",\n"
        "  \"c\\\\d\",\n"
        "]\n";
    const toml::Document doc = toml::parse(text);
    CHECK(doc.tables.at("t").at("names").as_string_array() ==
          std::vector<std::string>{"a\"b", "c\\d"});
}

TEST_CASE("toml reports the offending line") {
    try {
        toml::parse("[t]\nkey = \n");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("toml rejects duplicate keys within a table") {
    CHECK_THROWS_AS(toml::parse("[t]\na = 1\na = 2\n"), InputError);
}
