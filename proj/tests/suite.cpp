#include <cstdio>

#include "qexch/matrix_io.hpp"
#include "test_util.hpp"

using namespace qexch;

TEST_SUITE("verifier-cli") {
  TEST_CASE("config JSON round trips and rejects unknown keys") {
    SuiteConfig c;
    c.quadruple = "yangian";
    c.gamma = ExactScalar::rational(1, 2);
    c.checks = {"yb", "exchange"};
    c.k_file = "k.json";
    auto j = config_to_json(c);
    CHECK(config_to_json(config_from_json(j)) == j);
    j["colour"] = "blue";
    CHECK_THROWS_AS(config_from_json(j), StructuralError);
    CHECK_THROWS_AS(config_from_json({{"checks", {"everything"}}}), StructuralError);
    CHECK_THROWS_AS(config_from_json({{"n", "two"}}), StructuralError);
    CHECK_THROWS_AS(config_from_json({{"n", 1}}), StructuralError);
  }

  TEST_CASE("a small suite is deterministic and passes") {
    SuiteConfig c;
    c.quadruple = "rs";
    c.samples = 2;
    c.m_size = 2;
    c.np_size = 1;
    auto a = run_suite(c), b = run_suite(c);
    CHECK(dump_json(a) == dump_json(b));
    CHECK(report_exit_code(a) == 0);
    CHECK(a["summary"]["fail"] == 0);
    for (const auto& ch : a["checks"]) {
      CHECK(ch["runtime_ms"].is_null());
      CHECK_FALSE(ch["anchor"].get<std::string>().empty());
    }
  }

  TEST_CASE("groups draw independent sample streams") {
    SuiteConfig all;
    all.samples = 2;
    all.m_size = 1;
    all.np_size = 1;
    SuiteConfig one = all;
    one.checks = {"exchange"};
    auto full = run_suite(all), part = run_suite(one);
    nlohmann::json from_full = nlohmann::json::array();
    for (const auto& ch : full["checks"])
      if (ch["group"] == "exchange") from_full.push_back(ch);
    CHECK(from_full == part["checks"]);
  }

  TEST_CASE("a missing dual solution is reported as a gap") {
    nlohmann::json b = bundle_to_json(catalog_entry("rs", 2));
    auto e = catalog_entry("identity", 2);
    e.q.metadata.erase("catalog");
    e.solution.K = nullptr;
    std::string path = "suite_test_bundle.json";
    write_text_file(path, dump_json(bundle_to_json(e)));
    SuiteConfig c;
    c.quadruple = path;
    c.samples = 2;
    c.m_size = 1;
    c.np_size = 1;
    c.checks = {"exchange", "commutation"};
    auto r = run_suite(c);
    CHECK(r["dual_solution"]["k_gap"] == true);
    for (const auto& ch : r["checks"])
      if (ch["group"] == "commutation") CHECK(ch["status"] == "skipped");
    std::remove(path.c_str());
  }

  TEST_CASE("unreadable quadruple sources are structural errors") {
    SuiteConfig c;
    c.quadruple = "no-such-file.json";
    CHECK_THROWS_AS(run_suite(c), StructuralError);
    c.quadruple = "rs";
    c.regime = Regime::Nondynamical;
    CHECK_THROWS_AS(run_suite(c), StructuralError);
  }
}
