#include "doctest.h"
#include "planverify/config.hpp"

using namespace planverify;

TEST_CASE("config parsing") {
  const auto c = ConfigFile::parse(
      "# comment\n"
      "window = 7\n"
      "  ltl_enabled=false  \n"
      "\n"
      "endpoint.url = http://localhost:9/x # trailing comment\n"
      "name = \"  spaced # kept  \"\n"
      "windows = 3, 5 ,,7\n"
      "window = 3\n");
  CHECK(c.get_int("window") == 3);
  CHECK(c.get_bool("ltl_enabled") == false);
  CHECK(c.get("endpoint.url") == "http://localhost:9/x");
  CHECK(c.get("name") == "  spaced # kept  ");
  CHECK(c.get_list("windows") == std::vector<std::string>{"3", "5", "7"});
  CHECK_FALSE(c.get("missing"));
  CHECK_FALSE(c.get_int("missing"));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ConfigFile::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("= value"), ConfigError);
  const auto c = ConfigFile::parse("window = five\nflag = maybe\nratio = 0.5x");
  CHECK_THROWS_AS(c.get_int("window"), ConfigError);
  CHECK_THROWS_AS(c.get_bool("flag"), ConfigError);
  CHECK_THROWS_AS(c.get_double("ratio"), ConfigError);
  CHECK_THROWS_AS(c.require_known({"window", "flag"}), ConfigError);
  CHECK_NOTHROW(c.require_known({"window", "flag", "ratio"}));
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent.conf"), ConfigError);
}
