#include <random>

#include "doctest.h"
#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"
#include "emogap/keyed_text.hpp"

using namespace emogap;

TEST_CASE("escape round trip over arbitrary bytes") {
  std::mt19937_64 gen(5);
  const std::string alphabet = "ab=\\\t\n\r ";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const auto len = gen() % 20;
    for (std::size_t j = 0; j < len; ++j) s += alphabet[gen() % alphabet.size()];
    CHECK(unescape_field(escape_field(s)) == s);
    CHECK(escape_field(s).find_first_of("\t\n\r") == std::string::npos);
  }
}

TEST_CASE("line and block forms") {
  KeyedRecord r;
  r.set("a", "1");
  r.set("text", "x=y\tz");
  r.set_number("pi", 3.25);
  CHECK(KeyedRecord::from_line(r.to_line()).fields() == r.fields());
  CHECK(KeyedRecord::from_block(r.to_block()).fields() == r.fields());
  CHECK(r.get_double("pi") == 3.25);
  CHECK(r.get_int("a") == 1);
  CHECK_THROWS_AS(r.get("missing"), IoError);
  CHECK_THROWS_AS(r.get_int("text"), IoError);
}

TEST_CASE("block comments and blank lines") {
  const auto r = KeyedRecord::from_block("# comment\n\nseed = 7\nemotion=anger\n");
  CHECK(r.get("seed") == "7");
  CHECK(r.get("emotion") == "anger");
  CHECK_THROWS_AS(KeyedRecord::from_block("no equals sign\n"), IoError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 2e-5, 1.0 / 3.0, 0.772, 123456.789}) {
    CHECK(std::stod(KeyedRecord::format_number(v)) == v);
  }
}

TEST_CASE("hashing") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(stage_seed(1, "split") != stage_seed(1, "train"));
  CHECK(stage_seed(1, "split") == stage_seed(1, "split"));
}
