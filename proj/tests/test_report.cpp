#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "fsoacq/report.hpp"

using namespace fsoacq;

TEST_SUITE("report") {
  TEST_CASE("numbers round-trip through text") {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308, -1.5e-7}) {
      CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
  }

  TEST_CASE("CSV round trip") {
    Table t{{"a", "b", "c"}, {}};
    t.add_row({"1", "x", ""});
    t.add_row({"2.5", "y", "3"});
    const auto text = to_csv(t);
    CHECK(text == "a,b,c\n1,x,\n2.5,y,3\n");
    const auto back = parse_csv(text);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.column("c") == 2);
    CHECK_THROWS(back.column("d"));
    CHECK_THROWS(t.add_row({"1"}));
    Table bad{{"a"}, {}};
    bad.add_row({"x,y"});
    CHECK_THROWS(to_csv(bad));
  }

  TEST_CASE("SVG depends only on the table") {
    Table t{{"x", "y", "s"}, {}};
    for (int i = 1; i <= 10; ++i) {
      t.add_row({format_number(i), format_number(std::pow(10.0, -i)), "one"});
      t.add_row({format_number(i), format_number(2 * std::pow(10.0, -i)), "two"});
    }
    t.add_row({"11", "0", "one"});  // not drawable on a log axis
    PlotSpec spec{"title", "x", "y", "s", "x", "y"};
    const auto a = render_svg(t, spec);
    const auto b = render_svg(parse_csv(to_csv(t)), spec);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("one") != std::string::npos);
    CHECK(a.find("two") != std::string::npos);
  }

  TEST_CASE("git blob hashes") {
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  }

  TEST_CASE("files and manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "fsoacq_report_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_text(dir / "f.txt", "abc\n");
    CHECK(read_text(dir / "f.txt") == "abc\n");
    std::filesystem::remove_all(dir.parent_path());
    const auto m = make_manifest("policy", "cfg.yaml", "hello\n", 42);
    CHECK(m["command"] == "policy");
    CHECK(m["seed"] == 42);
    CHECK(m["version"] == kToolVersion);
    CHECK(m.dump().find("ce013625030ba8dba906f756967f9e9ca394464a") != std::string::npos);
  }
}
