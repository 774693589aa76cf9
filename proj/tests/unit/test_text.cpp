#include <doctest.h>

#include "stylevis/csv.hpp"
#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <random>

using namespace stylevis;

TEST_CASE("collapse_whitespace trims and folds runs") {
  CHECK(text::collapse_whitespace("  a \t\n b  ") == "a b");
  CHECK(text::collapse_whitespace("") == "");
  CHECK(text::collapse_whitespace(" \n ") == "");
}

TEST_CASE("split and join are inverse") {
  const auto parts = text::split("a, b, , c", ", ");
  REQUIRE(parts.size() == 4);
  CHECK(parts[2] == "");
  CHECK(text::join(parts, ", ") == "a, b, , c");
  CHECK(text::count_occurrences("masterpiece, masterpiece", "masterpiece") == 2);
}

TEST_CASE("rational_half_up rounds ties away from zero") {
  CHECK(text::rational_half_up(33, 98, 4) == "0.3367");
  CHECK(text::rational_half_up(1, 8, 2) == "0.13");
  CHECK(text::rational_half_up(1, 200, 2) == "0.01");
  CHECK(text::rational_half_up(0, 7, 2) == "0.00");
  CHECK(text::rational_half_up(59, 49, 3) == "1.204");
  CHECK(text::rational_half_up(5, 1, 0) == "5");
}

TEST_CASE("double_half_up matches decimal ties") {
  CHECK(text::double_half_up(0.125, 2) == "0.13");
  CHECK(text::double_half_up(2.675, 2) == "2.68");
  CHECK(text::double_half_up(4.0, 2) == "4.00");
  CHECK(text::double_half_up(-1.5, 0) == "-2");
}

TEST_CASE("sha256 of the empty string") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv escaping") {
  CHECK(csv::escape_field("plain") == "plain");
  CHECK(csv::escape_field("a,b") == "\"a,b\"");
  CHECK(csv::escape_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::escape_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv::escape_field(" padded") == "\" padded\"");
}

TEST_CASE("csv parser handles CRLF and quoted newlines") {
  const auto rows = csv::parse("a,b\r\n\"x\r\ny\",\"q\"\"q\"\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "x\r\ny");
  CHECK(rows[1][1] == "q\"q");
  CHECK_THROWS_AS(csv::parse("a,\"open\n"), Error);
}

TEST_CASE("csv rows survive format and parse on random text") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab ,\"\n\r;x";
  for (int trial = 0; trial < 200; ++trial) {
    csv::Row row;
    const int fields = 1 + static_cast<int>(rng() % 5);
    for (int f = 0; f < fields; ++f) {
      std::string s;
      const int len = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      row.push_back(s);
    }
    const auto parsed = csv::parse(csv::format_row(row));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == row);
  }
}
