#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gbh/csv.hpp"

using namespace gbh;

TEST_CASE("split and escape") {
    CHECK(csv::split_line("a, b ,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(csv::split_line("\"x,y\",\"he said \"\"hi\"\"\",") ==
          std::vector<std::string>{"x,y", "he said \"hi\"", ""});
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::split_line(csv::escape("q\"x,")) == std::vector<std::string>{"q\"x,"});
}

TEST_CASE("read skips comments and reports field counts") {
    std::istringstream in("\xEF\xBB\xBF# note\nx,y\n\n1,2\n# mid\n3,4\n");
    const auto t = csv::read(in);
    CHECK(t.header == std::vector<std::string>{"x", "y"});
    CHECK(t.rows.size() == 2);
    CHECK(t.lines == std::vector<std::size_t>{4, 6});
    CHECK(t.column("y") == 1);
    CHECK_FALSE(t.column("z"));

    std::istringstream bad("x,y\n1,2\n3\n");
    try {
        csv::read(bad);
        FAIL("expected error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 0.0, 1.0, 123456.789}) {
        CHECK(csv::parse_double(csv::format_full(v)) == v);
    }
    CHECK(csv::format_full(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(csv::format_sig6(0.123456789) == "0.123457");
    CHECK(csv::parse_double("+0.5") == 0.5);
    CHECK_FALSE(csv::parse_double("0.5x"));
    CHECK_FALSE(csv::parse_double(""));
    CHECK_FALSE(csv::parse_double("abc"));
}
